#include <algorithm>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "helpers.hpp"

#include "cursive/corpus.hpp"
#include "cursive/error.hpp"

using namespace cursive;
namespace fs = std::filesystem;

namespace {

// Maximum bipartite matching between predicted and ground-truth columns by
// augmenting paths; the greedy matcher must reach the same cardinality.
int max_matching(const std::vector<int>& pred, const std::vector<int>& gt, int tol) {
    std::vector<int> owner(pred.size(), -1);
    std::function<bool(std::size_t, std::vector<char>&)> augment = [&](std::size_t g, std::vector<char>& seen) {
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (std::abs(pred[p] - gt[g]) > tol || seen[p]) continue;
            seen[p] = 1;
            if (owner[p] < 0 || augment(static_cast<std::size_t>(owner[p]), seen)) {
                owner[p] = static_cast<int>(g);
                return true;
            }
        }
        return false;
    };
    int n = 0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        std::vector<char> seen(pred.size(), 0);
        n += augment(g, seen);
    }
    return n;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

// Words built from plain vertical bars far apart, which the heuristics cut exactly.
std::vector<WordRecord> bar_corpus(const fs::path& dir, int words) {
    std::vector<WordRecord> out;
    for (int w = 0; w < words; ++w) {
        GrayImage img(120, 24, 255);
        for (int b = 0; b < 4; ++b)
            for (int y = 4; y < 20; ++y) img.at(10 + 30 * b, y) = 0;
        WordRecord r;
        r.word_id = "bars" + std::to_string(w);
        r.image_path = dir / (r.word_id + ".pgm");
        save_pgm(img, r.image_path);
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("manifest loading") {
    const auto dir = testutil::scratch_dir("manifest");
    CHECK_THROWS_AS(load_corpus(dir), IoError);

    write_text(dir / kManifestName, "");
    CHECK(load_corpus(dir).empty());

    save_pgm(GrayImage(4, 4, 255), dir / "a.pgm");
    write_text(dir / kManifestName,
               "{\"word_id\":\"w1\",\"image\":\"a.pgm\",\"gt_boundaries\":[1,2]}\n"
               "{\"word_id\":\"w2\",\"image\":\"missing.pgm\",\"gt_boundaries\":[]}\n");
    try {
        load_corpus(dir);
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("w2") != std::string::npos);
    }

    write_text(dir / kManifestName, "{\"word_id\":\"w1\",\"image\":\"a.pgm\",\"gt_boundaries\":[3,2]}\n");
    CHECK_THROWS_AS(load_corpus(dir), FormatError);
    write_text(dir / kManifestName, "{\"word_id\":\"w1\",\"image\":\"a.pgm\",\"split\":\"dev\"}\n");
    CHECK_THROWS_AS(load_corpus(dir), FormatError);

    std::vector<WordRecord> recs;
    for (const char* id : {"zeta", "alpha", "mid"}) {
        WordRecord r;
        r.word_id = id;
        r.image_path = dir / "a.pgm";
        r.gt_boundaries = {1};
        r.cuts = {{2, CutLabel::valid}};
        recs.push_back(r);
    }
    write_manifest(dir, recs);
    const auto back = load_corpus(dir);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].word_id == recs[i].word_id);
        CHECK(back[i].gt_boundaries == recs[i].gt_boundaries);
        CHECK(back[i].cuts == recs[i].cuts);
        CHECK(fs::equivalent(back[i].image_path, recs[i].image_path));
    }
}

TEST_CASE("synthesis is deterministic and self-consistent") {
    const auto a = testutil::scratch_dir("synth_a");
    const auto b = testutil::scratch_dir("synth_b");
    write_corpus(a, synthesize_corpus(42, 10));
    write_corpus(b, synthesize_corpus(42, 10));
    for (const auto& e : fs::directory_iterator(a)) CHECK(read_file(e.path()) == read_file(b / e.path().filename()));
    CHECK(fs::exists(a / "word_s42_w0001.pgm"));

    SynthOptions three;
    three.min_glyphs = three.max_glyphs = 3;
    for (const auto& w : synthesize_corpus(7, 5, three)) CHECK(w.record.gt_boundaries.size() == 2);

    for (const auto& w : synthesize_corpus(42, 30)) {
        const auto& gt = w.record.gt_boundaries;
        CHECK(gt.size() + 1 == w.glyphs.size());
        CHECK(std::is_sorted(gt.begin(), gt.end()));
        CHECK(std::adjacent_find(gt.begin(), gt.end()) == gt.end());
        for (int c : gt) {
            CHECK(c > 0);
            CHECK(c < w.image.width - 1);
            // Only the ligature pixel on the baseline is inked between the core bounds.
            for (int y = w.core_top; y < w.baseline; ++y) CHECK(w.image.at(c, y) > 128);
            CHECK(w.image.at(c, w.baseline) < 128);
        }
    }
    CHECK_THROWS_AS(synthesize_corpus(1, 0), InvalidArgument);
}

TEST_CASE("seg_rate examples") {
    const SegScore s = seg_rate({30, 60}, {28, 61, 90}, 3);
    CHECK(s.hits == 2);
    CHECK(s.over_seg == 0);
    CHECK(s.missed == 1);
    CHECK(s.rate == doctest::Approx(200.0 / 3));

    const SegScore t = seg_rate({30, 60}, {28, 61}, 3);
    CHECK(t.rate == 100.0);
    CHECK(t.over_seg == 0);
    CHECK(t.missed == 0);

    const SegScore u = seg_rate({10, 11, 12}, {11}, 3);
    CHECK(u.hits == 1);
    CHECK(u.over_seg == 2);

    CHECK(seg_rate({5}, {}, 3).rate == 100.0);
    CHECK(seg_rate({}, {5}, 3).rate == 0.0);
    CHECK_THROWS_AS(seg_rate({}, {}, -1), InvalidArgument);
}

TEST_CASE("seg_rate properties") {
    Rng rng(12);
    for (int t = 0; t < 300; ++t) {
        std::vector<int> pred, gt;
        const int np = static_cast<int>(rng.below(12)), ng = static_cast<int>(rng.below(12));
        for (int i = 0; i < np; ++i) pred.push_back(static_cast<int>(rng.below(80)));
        for (int i = 0; i < ng; ++i) gt.push_back(static_cast<int>(rng.below(80)));
        std::sort(gt.begin(), gt.end());
        gt.erase(std::unique(gt.begin(), gt.end()), gt.end());
        const int tol = static_cast<int>(rng.below(5));
        const SegScore s = seg_rate(pred, gt, tol);
        CHECK(s.hits + s.missed == static_cast<int>(gt.size()));
        CHECK(s.hits + s.over_seg == static_cast<int>(pred.size()));
        CHECK(s.hits == max_matching(pred, gt, tol));
        std::vector<int> shuffled = pred;
        std::reverse(shuffled.begin(), shuffled.end());
        CHECK(seg_rate(shuffled, gt, tol).hits == s.hits);
    }
}

TEST_CASE("evaluation on a corpus the heuristics cut perfectly") {
    const auto dir = testutil::scratch_dir("bars");
    auto corpus = bar_corpus(dir, 3);
    EvalOptions opts;
    opts.pipeline.seg.n = 12;
    // Find where the heuristics cut, then declare exactly those as ground truth.
    for (auto& r : corpus) {
        const WordAnalysis a = analyze_word(load_pgm(r.image_path), opts.pipeline, nullptr, false);
        REQUIRE(a.pre.slant.angle == 0);
        const auto cols = boundary_columns(a.cuts);
        r.gt_boundaries.clear();
        for (int c : cols) r.gt_boundaries.push_back(c + a.pre.slant.source_box.left);
        CHECK(map_ground_truth(r.gt_boundaries, a.pre) == cols);
    }
    corpus[0].split = "train";
    const EvalReport rep = evaluate_heuristics(corpus, opts);
    CHECK(rep.word_count == 3);
    REQUIRE(rep.test_rate);
    REQUIRE(rep.train_rate);
    CHECK(*rep.test_rate == 100.0);
    CHECK(*rep.train_rate == 100.0);
    CHECK(rep.over_seg == 0);
    CHECK(rep.missed == 0);

    auto doubled = corpus;
    doubled.insert(doubled.end(), corpus.begin(), corpus.end());
    const EvalReport rep2 = evaluate_heuristics(doubled, opts);
    CHECK(*rep2.test_rate == *rep.test_rate);
    CHECK(rep2.points == 2 * rep.points);

    opts.jobs = 3;
    CHECK(report_text(evaluate_heuristics(doubled, opts)) == report_text(rep2));

    CHECK_THROWS_AS(evaluate_pipeline(corpus, EnsembleModel{}, opts), InvalidArgument);
}

TEST_CASE("averaging is per word and per split") {
    const auto dir = testutil::scratch_dir("bars_avg");
    auto corpus = bar_corpus(dir, 2);
    EvalOptions opts;
    opts.pipeline.seg.n = 12;
    opts.trace_paths = false;
    const WordAnalysis a = analyze_word(load_pgm(corpus[0].image_path), opts.pipeline, nullptr, false);
    const auto cols = boundary_columns(a.cuts);
    REQUIRE(cols.size() >= 2);
    const int off = a.pre.slant.source_box.left;
    for (int c : cols) corpus[0].gt_boundaries.push_back(c + off);  // 100 %
    corpus[1].gt_boundaries = {cols.front() + off, 1000};           // 50 %
    const auto rep = evaluate_heuristics(corpus, opts);
    CHECK(*rep.test_rate == doctest::Approx(75.0));
    CHECK_FALSE(rep.train_rate);
    CHECK(report_text(rep).find("n/a") != std::string::npos);
}

TEST_CASE("report shape") {
    EvalReport r;
    r.word_count = 317;
    r.points = 1829;
    r.train_rate = 100.0;
    r.test_rate = 97.98;
    r.over_seg = 4;
    r.missed = 2;
    const std::string text = report_text(r);
    for (const char* h : {"Number of Words", "Segmentation Points", "Avg. Seg. Rate of Training set (%)",
                          "Avg. Seg. Testing Rate on Testing set (%)"})
        CHECK(text.find(h) != std::string::npos);
    CHECK(text.find("317") != std::string::npos);
    CHECK(text.find("1829") != std::string::npos);
    CHECK(text.find("97.98") != std::string::npos);
    CHECK(text.find("100.00") != std::string::npos);
    CHECK(text == report_text(r));
    const auto j = report_json(r);
    CHECK(j["words"] == 317);
    CHECK(j["segmentation_points"] == 1829);
    CHECK(j["avg_test_rate"].get<double>() == 97.98);
}

TEST_CASE("training set export") {
    const auto dir = testutil::scratch_dir("export");
    auto words = synthesize_corpus(5, 3);
    auto corpus = write_corpus(dir, words);
    PipelineOptions opts;
    opts.seg.n = 30;

    CHECK_THROWS_AS(export_training_set(corpus, opts, dir / "none.jsonl"), InvalidArgument);

    int labelled = 0;
    for (auto& r : corpus) {
        const auto labels = label_from_ground_truth(load_pgm(r.image_path), r.gt_boundaries, opts, 3);
        for (const auto& l : labels) {
            if (labelled == 5) break;
            r.cuts.push_back(l);
            ++labelled;
        }
    }
    REQUIRE(labelled == 5);
    CHECK(export_training_set(corpus, opts, dir / "a.jsonl") == 5);
    CHECK(export_training_set(corpus, opts, dir / "b.jsonl") == 5);
    CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));

    const auto rows = load_training_set(dir / "a.jsonl");
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::make_pair(rows[i - 1].word_id, rows[i - 1].column) < std::make_pair(rows[i].word_id, rows[i].column));
    for (const auto& row : rows) CHECK(static_cast<int>(row.features.size()) == opts.features.dim());
    CHECK(to_dataset(rows).size() == 5);

    // A labelled column that is not a candidate cut is a data error.
    corpus[0].cuts.push_back({-5, CutLabel::valid});
    CHECK_THROWS_AS(export_training_set(corpus, opts, dir / "c.jsonl"), InvalidArgument);
}

TEST_CASE("ground-truth labels follow the tolerance") {
    const auto w = synthesize_corpus(42, 1)[0];
    PipelineOptions opts;
    opts.seg.n = 30;
    const auto labels = label_from_ground_truth(w.image, w.record.gt_boundaries, opts, 3);
    const auto a = analyze_word(w.image, opts, nullptr, false);
    const auto gt = map_ground_truth(w.record.gt_boundaries, a.pre);
    REQUIRE(labels.size() == boundary_columns(a.cuts).size());
    for (const auto& l : labels) {
        const bool near = std::any_of(gt.begin(), gt.end(), [&](int g) { return std::abs(g - l.column) <= 3; });
        CHECK((l.label == CutLabel::valid) == near);
    }
}

#include "cursive/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "cursive/error.hpp"

namespace fs = std::filesystem;

namespace cursive {

std::string_view to_string(CutLabel l) {
    switch (l) {
        case CutLabel::valid: return "valid";
        case CutLabel::invalid: return "invalid";
        case CutLabel::unlabeled: break;
    }
    return "unlabeled";
}

CutLabel cut_label_from_string(std::string_view s) {
    if (s == "valid") return CutLabel::valid;
    if (s == "invalid") return CutLabel::invalid;
    if (s == "unlabeled") return CutLabel::unlabeled;
    throw FormatError("unknown cut label '" + std::string(s) + "'");
}

std::string_view to_string(Glyph g) {
    switch (g) {
        case Glyph::ring: return "ring";
        case Glyph::arch: return "arch";
        case Glyph::double_arch: return "double_arch";
        case Glyph::cup: return "cup";
        case Glyph::double_cup: return "double_cup";
        case Glyph::bar: return "bar";
    }
    return "?";
}

// ---------------------------------------------------------------- manifest

nlohmann::json record_to_json(const WordRecord& r, const fs::path& base) {
    nlohmann::json j;
    j["word_id"] = r.word_id;
    j["image"] = base.empty() ? r.image_path.generic_string() : r.image_path.lexically_relative(base).generic_string();
    j["gt_boundaries"] = r.gt_boundaries;
    j["split"] = r.split;
    auto cuts = nlohmann::json::array();
    for (const auto& c : r.cuts) cuts.push_back({{"column", c.column}, {"label", std::string(to_string(c.label))}});
    j["cuts"] = std::move(cuts);
    return j;
}

WordRecord record_from_json(const nlohmann::json& j, const fs::path& base) {
    try {
        WordRecord r;
        r.word_id = j.at("word_id").get<std::string>();
        r.image_path = base / fs::path(j.at("image").get<std::string>());
        r.gt_boundaries = j.value("gt_boundaries", std::vector<int>{});
        r.split = j.value("split", std::string("test"));
        if (r.split != "train" && r.split != "test")
            throw FormatError("word " + r.word_id + ": split must be 'train' or 'test'");
        for (std::size_t i = 1; i < r.gt_boundaries.size(); ++i)
            if (r.gt_boundaries[i] <= r.gt_boundaries[i - 1])
                throw FormatError("word " + r.word_id + ": gt_boundaries must be strictly increasing");
        if (j.contains("cuts"))
            for (const auto& c : j.at("cuts"))
                r.cuts.push_back({c.at("column").get<int>(),
                                  cut_label_from_string(c.value("label", std::string("unlabeled")))});
        return r;
    } catch (const nlohmann::json::exception& err) {
        throw FormatError(std::string("malformed manifest entry: ") + err.what());
    }
}

std::vector<WordRecord> load_corpus(const fs::path& dir) {
    const fs::path manifest = dir / kManifestName;
    std::ifstream in(manifest);
    if (!in) throw IoError("missing manifest " + manifest.string());
    std::vector<WordRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw FormatError(manifest.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        }
        WordRecord r = record_from_json(j, dir);
        if (!fs::exists(r.image_path))
            throw IoError("word " + r.word_id + ": image not found: " + r.image_path.string());
        out.push_back(std::move(r));
    }
    return out;
}

void write_manifest(const fs::path& dir, const std::vector<WordRecord>& records) {
    std::string text;
    for (const auto& r : records) text += record_to_json(r, dir).dump() + "\n";
    write_file(dir / kManifestName, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------- synthesis

namespace {

int rand_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1))); }

// Draws thick strokes clipped to one glyph's box.
class Pen {
public:
    Pen(BinaryImage& canvas, int thickness, Box clip) : canvas_(canvas), t_(thickness), clip_(clip) {}

    void dot(int x, int y) {
        for (int dy = 0; dy < t_; ++dy)
            for (int dx = 0; dx < t_; ++dx) {
                const int px = x + dx;
                const int py = y - dy;  // grow upwards so strokes never dip below the baseline
                if (px >= clip_.left && px <= clip_.right && py >= clip_.top && py <= clip_.bottom)
                    canvas_.set(px, py);
            }
    }

    void line(int x0, int y0, int x1, int y1) {
        const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            dot(x0, y0);
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }

    void polyline(std::initializer_list<std::pair<int, int>> pts) {
        auto it = pts.begin();
        auto prev = *it;
        for (++it; it != pts.end(); ++it) {
            line(prev.first, prev.second, it->first, it->second);
            prev = *it;
        }
    }

    void ellipse(double cx, double cy, double rx, double ry) {
        constexpr int kSteps = 96;
        int px = static_cast<int>(std::lround(cx + rx)), py = static_cast<int>(std::lround(cy));
        for (int s = 1; s <= kSteps; ++s) {
            const double a = 2.0 * std::numbers::pi * s / kSteps;
            const int x = static_cast<int>(std::lround(cx + rx * std::cos(a)));
            const int y = static_cast<int>(std::lround(cy + ry * std::sin(a)));
            line(px, py, x, y);
            px = x;
            py = y;
        }
    }

private:
    BinaryImage& canvas_;
    int t_;
    Box clip_;
};

int glyph_width(Glyph g, Rng& rng) {
    switch (g) {
        case Glyph::ring: return rand_int(rng, 10, 14);
        case Glyph::arch: return rand_int(rng, 9, 13);
        case Glyph::double_arch: return rand_int(rng, 15, 21);
        case Glyph::cup: return rand_int(rng, 9, 13);
        case Glyph::double_cup: return rand_int(rng, 15, 21);
        case Glyph::bar: return rand_int(rng, 5, 7);
    }
    return 10;
}

// Every template has ink at (x0, base) and (x1, base) so ligatures attach.
void draw_glyph(Pen& pen, Glyph g, int x0, int x1, int top, int base, int ascender) {
    const int xm = (x0 + x1) / 2;
    switch (g) {
        case Glyph::ring: {
            const double cx = (x0 + x1) / 2.0;
            const double rx = (x1 - x0) / 2.0 - 1.0;
            const double ry = (base - 2 - top) / 2.0;
            const double cy = top + ry;
            pen.ellipse(cx, cy, rx, ry);
            const double c = std::cos(std::numbers::pi / 4);
            pen.line(x0, base, static_cast<int>(std::lround(cx - rx * c)), static_cast<int>(std::lround(cy + ry * c)));
            pen.line(static_cast<int>(std::lround(cx + rx * c)), static_cast<int>(std::lround(cy + ry * c)), x1, base);
            break;
        }
        case Glyph::arch:
            pen.polyline({{x0, base}, {x0, top + 2}, {x0 + 2, top}, {x1 - 2, top}, {x1, top + 2}, {x1, base}});
            break;
        case Glyph::double_arch:
            pen.polyline({{x0, base}, {x0, top + 2}, {x0 + 2, top}, {xm - 2, top}, {xm, top + 2}, {xm, base}});
            pen.polyline({{xm, top + 2}, {xm + 2, top}, {x1 - 2, top}, {x1, top + 2}, {x1, base}});
            break;
        case Glyph::cup:
            pen.polyline({{x0, top}, {x0, base}, {x1, base}, {x1, top}});
            break;
        case Glyph::double_cup:
            pen.polyline({{x0, top}, {x0, base}, {x1, base}, {x1, top}});
            pen.line(xm, top, xm, base);
            break;
        case Glyph::bar:
            pen.line(xm, ascender, xm, base);
            pen.line(x0, base, x1, base);
            break;
    }
}

constexpr int kMargin = 4;

SynthWord synthesize_word(Rng& rng, int index, std::uint64_t seed, const SynthOptions& opts) {
    SynthWord w;
    const int count = rand_int(rng, opts.min_glyphs, opts.max_glyphs);
    const int x_height = rand_int(rng, 12, 18);
    const int ascender = rand_int(rng, 6, 10);
    const int thickness = rand_int(rng, 1, 2);
    const int top = kMargin + ascender;
    const int base = top + x_height;

    std::vector<int> widths, ligatures;
    for (int i = 0; i < count; ++i) {
        w.glyphs.push_back(opts.alphabet[rng.below(opts.alphabet.size())]);
        widths.push_back(glyph_width(w.glyphs.back(), rng));
        if (i + 1 < count) ligatures.push_back(rand_int(rng, 6, 10));
    }
    int width = 2 * kMargin;
    for (int v : widths) width += v;
    for (int v : ligatures) width += v;
    const int height = base + 1 + kMargin;

    BinaryImage ink(width, height);
    int x = kMargin;
    for (int i = 0; i < count; ++i) {
        const int x0 = x, x1 = x + widths[static_cast<std::size_t>(i)] - 1;
        Pen pen(ink, thickness, Box{x0, 0, x1, base});
        draw_glyph(pen, w.glyphs[static_cast<std::size_t>(i)], x0, x1, top, base, kMargin);
        x = x1 + 1;
        if (i + 1 < count) {
            const int a = x, b = x + ligatures[static_cast<std::size_t>(i)] - 1;
            for (int c = a; c <= b; ++c) ink.set(c, base);
            w.record.gt_boundaries.push_back((a + b) / 2);
            x = b + 1;
        }
    }

    // Self-check: a boundary column carries no ink except the ligature pixel.
    for (int gt : w.record.gt_boundaries)
        for (int y = 0; y < height; ++y)
            if (ink.at(gt, y) != (y == base))
                throw Error("synthesis: boundary column " + std::to_string(gt) + " is not a clean ligature");

    w.image = GrayImage(width, height);
    for (int yy = 0; yy < height; ++yy)
        for (int xx = 0; xx < width; ++xx)
            w.image.at(xx, yy) = ink.at(xx, yy) ? static_cast<std::uint8_t>(rand_int(rng, 0, 40))
                                                 : static_cast<std::uint8_t>(rand_int(rng, 225, 255));

    char id[48];
    std::snprintf(id, sizeof id, "s%llu_w%04d", static_cast<unsigned long long>(seed), index + 1);
    w.record.word_id = id;
    w.record.image_path = std::string("word_") + id + ".pgm";
    w.record.split = opts.split;
    w.baseline = base;
    w.core_top = top;
    return w;
}

}  // namespace

std::vector<SynthWord> synthesize_corpus(std::uint64_t seed, int word_count, const SynthOptions& opts) {
    if (word_count < 1) throw InvalidArgument("synthesize_corpus: word_count must be >= 1");
    if (opts.alphabet.empty()) throw InvalidArgument("synthesize_corpus: empty glyph alphabet");
    if (opts.min_glyphs < 1 || opts.max_glyphs < opts.min_glyphs)
        throw InvalidArgument("synthesize_corpus: bad glyph count range");
    Rng rng(seed);
    std::vector<SynthWord> words;
    for (int i = 0; i < word_count; ++i) words.push_back(synthesize_word(rng, i, seed, opts));
    return words;
}

std::vector<WordRecord> write_corpus(const fs::path& dir, const std::vector<SynthWord>& words) {
    fs::create_directories(dir);
    std::vector<WordRecord> records;
    for (const auto& w : words) {
        WordRecord r = w.record;
        r.image_path = dir / w.record.image_path.filename();
        save_pgm(w.image, r.image_path);
        records.push_back(std::move(r));
    }
    write_manifest(dir, records);
    return records;
}

// ---------------------------------------------------------------- scoring

std::vector<int> map_ground_truth(const std::vector<int>& gt, const Preprocessed& pre) {
    const Box& src = pre.slant.source_box;
    const int row = src.empty() ? 0 : (src.top + src.bottom) / 2;
    std::vector<int> out;
    for (int g : gt) out.push_back(pre.slant.map_column(g, row));
    return out;
}

std::vector<LabeledCut> label_from_ground_truth(const GrayImage& img, const std::vector<int>& gt,
                                                const PipelineOptions& opts, int tolerance) {
    const Preprocessed pre = preprocess(img);
    const auto mapped = map_ground_truth(gt, pre);
    const auto heur = run_heuristics(pre.skeleton, opts.seg);
    std::vector<LabeledCut> labels;
    for (const auto& c : heur.cuts) {
        if (c.status != CutStatus::heuristic_valid) continue;
        const bool near = std::any_of(mapped.begin(), mapped.end(), [&](int g) { return std::abs(g - c.column) <= tolerance; });
        labels.push_back({c.column, near ? CutLabel::valid : CutLabel::invalid});
    }
    return labels;
}

SegScore seg_rate(std::vector<int> predicted, std::vector<int> gt, int tolerance) {
    if (tolerance < 0) throw InvalidArgument("seg_rate: tolerance must be >= 0");
    std::sort(predicted.begin(), predicted.end());
    std::sort(gt.begin(), gt.end());
    SegScore s;
    std::size_t p = 0;
    for (int g : gt) {
        while (p < predicted.size() && predicted[p] < g - tolerance) ++p;
        if (p < predicted.size() && predicted[p] <= g + tolerance) {
            ++s.hits;
            ++p;
        }
    }
    s.missed = static_cast<int>(gt.size()) - s.hits;
    s.over_seg = static_cast<int>(predicted.size()) - s.hits;
    s.rate = gt.empty() ? 100.0 : 100.0 * s.hits / static_cast<double>(gt.size());
    return s;
}

namespace {

EvalReport evaluate(const std::vector<WordRecord>& corpus, const EnsembleModel* model, const EvalOptions& opts) {
    std::vector<WordEval> evals(corpus.size());
    auto work = [&](std::size_t i) {
        const WordRecord& r = corpus[i];
        const GrayImage img = load_pgm(r.image_path);
        const WordAnalysis a = analyze_word(img, opts.pipeline, model, opts.trace_paths);
        const auto predicted = boundary_columns(a.cuts);
        const auto gt = map_ground_truth(r.gt_boundaries, a.pre);
        evals[i] = {r.word_id, r.split, static_cast<int>(gt.size()), static_cast<int>(predicted.size()),
                    seg_rate(predicted, gt, opts.tolerance)};
    };

    const std::size_t jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
    if (jobs == 1 || corpus.size() < 2) {
        for (std::size_t i = 0; i < corpus.size(); ++i) work(i);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < jobs; ++t)
                pool.emplace_back([&, t] {
                    try {
                        for (std::size_t i = t; i < corpus.size(); i += jobs) work(i);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    EvalReport rep;
    rep.word_count = static_cast<int>(corpus.size());
    double train_sum = 0.0, test_sum = 0.0;
    int train_n = 0, test_n = 0;
    for (const auto& e : evals) {
        rep.points += e.gt_count;
        rep.over_seg += e.score.over_seg;
        rep.missed += e.score.missed;
        if (e.split == "train") {
            train_sum += e.score.rate;
            ++train_n;
        } else {
            test_sum += e.score.rate;
            ++test_n;
        }
    }
    if (train_n) rep.train_rate = train_sum / train_n;
    if (test_n) rep.test_rate = test_sum / test_n;
    rep.words = std::move(evals);
    return rep;
}

std::string format_rate(const std::optional<double>& r) {
    if (!r) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *r);
    return buf;
}

}  // namespace

EvalReport evaluate_pipeline(const std::vector<WordRecord>& corpus, const EnsembleModel& model, const EvalOptions& opts) {
    if (!model.trained()) throw InvalidArgument("evaluate_pipeline: model is not trained");
    return evaluate(corpus, &model, opts);
}

EvalReport evaluate_heuristics(const std::vector<WordRecord>& corpus, const EvalOptions& opts) {
    return evaluate(corpus, nullptr, opts);
}

std::string report_text(const EvalReport& r) {
    const char* cols[] = {"Number of Words", "Segmentation Points", "Avg. Seg. Rate of Training set (%)",
                          "Avg. Seg. Testing Rate on Testing set (%)"};
    const std::string vals[] = {std::to_string(r.word_count), std::to_string(r.points), format_rate(r.train_rate),
                                format_rate(r.test_rate)};
    std::string head, row;
    for (int i = 0; i < 4; ++i) {
        const std::size_t w = std::string(cols[i]).size();
        std::string v = vals[i];
        v.resize(w, ' ');
        head += cols[i];
        row += v;
        if (i < 3) {
            head += "  ";
            row += "  ";
        }
    }
    while (!row.empty() && row.back() == ' ') row.pop_back();
    std::string out = head + "\n" + row + "\n";
    out += "Over-segmentation: " + std::to_string(r.over_seg) + "\n";
    out += "Missed boundaries: " + std::to_string(r.missed) + "\n";
    return out;
}

nlohmann::json report_json(const EvalReport& r) {
    nlohmann::json j;
    j["words"] = r.word_count;
    j["segmentation_points"] = r.points;
    j["avg_train_rate"] = r.train_rate ? nlohmann::json(*r.train_rate) : nlohmann::json(nullptr);
    j["avg_test_rate"] = r.test_rate ? nlohmann::json(*r.test_rate) : nlohmann::json(nullptr);
    j["over_segmentation"] = r.over_seg;
    j["missed"] = r.missed;
    auto per = nlohmann::json::array();
    for (const auto& w : r.words)
        per.push_back({{"word_id", w.word_id},
                       {"split", w.split},
                       {"gt", w.gt_count},
                       {"predicted", w.predicted},
                       {"hits", w.score.hits},
                       {"over_seg", w.score.over_seg},
                       {"missed", w.score.missed},
                       {"rate", w.score.rate}});
    j["per_word"] = std::move(per);
    return j;
}

// ---------------------------------------------------------------- training set

std::vector<TrainingRow> build_training_set(const std::vector<WordRecord>& corpus, const PipelineOptions& opts) {
    std::vector<const WordRecord*> order;
    for (const auto& r : corpus) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->word_id < b->word_id; });

    std::vector<TrainingRow> rows;
    for (const WordRecord* r : order) {
        std::vector<LabeledCut> labelled;
        for (const auto& c : r->cuts)
            if (c.label != CutLabel::unlabeled) labelled.push_back(c);
        if (labelled.empty()) continue;
        std::sort(labelled.begin(), labelled.end(), [](auto& a, auto& b) { return a.column < b.column; });

        const Preprocessed pre = preprocess(load_pgm(r->image_path));
        const auto heur = run_heuristics(pre.skeleton, opts.seg);
        for (const auto& l : labelled) {
            if (l.column < 0 || l.column >= pre.skeleton.width)
                throw InvalidArgument("word " + r->word_id + ": labelled column " + std::to_string(l.column) +
                                      " is outside the preprocessed image");
            CandidateCut cut{l.column, CutStatus::heuristic_valid, crossing_count(pre.skeleton, l.column)};
            rows.push_back({r->word_id, l.column, extract_features(pre.skeleton, cut, heur.cuts, opts.features, heur.char_width),
                            l.label == CutLabel::valid ? 1 : 0});
        }
    }
    return rows;
}

std::size_t export_training_set(const std::vector<WordRecord>& corpus, const PipelineOptions& opts, const fs::path& out) {
    const auto rows = build_training_set(corpus, opts);
    if (rows.empty()) throw InvalidArgument("export: no labelled cuts in corpus");
    std::string text;
    for (const auto& r : rows) {
        nlohmann::json j{{"word_id", r.word_id}, {"column", r.column}, {"features", r.features}, {"label", r.label}};
        text += j.dump() + "\n";
    }
    write_file(out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    return rows.size();
}

std::vector<TrainingRow> load_training_set(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open training set " + path.string());
    std::vector<TrainingRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            TrainingRow r{j.value("word_id", std::string()), j.value("column", 0),
                          j.at("features").get<std::vector<double>>(), j.at("label").get<int>()};
            if (r.label != 0 && r.label != 1) throw FormatError("label must be 0 or 1");
            rows.push_back(std::move(r));
        } catch (const std::exception& err) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
    return rows;
}

Dataset to_dataset(const std::vector<TrainingRow>& rows) {
    Dataset d;
    d.reserve(rows.size());
    for (const auto& r : rows) d.push_back({r.features, static_cast<double>(r.label)});
    return d;
}

}  // namespace cursive

#include "cursive/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "cursive/annotation.hpp"
#include "cursive/corpus.hpp"
#include "cursive/error.hpp"
#include "cursive/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cursive::cli {

namespace {

// Bad invocation or configuration: exit code 2.
struct UsageError : Error {
    using Error::Error;
};

template <class T>
void take(const json& obj, const char* key, T& dst) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(std::string("config: bad value for '") + key + "'");
    }
}

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InvalidArgument(std::string("config: '") + section + "' must be an object");
    for (const auto& [key, _] : obj.items())
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
            throw InvalidArgument(std::string("config: unknown key '") + section + "." + key + "'");
}

}  // namespace

void CliConfig::validate() const {
    pipeline.seg.validate();
    if (pipeline.features.grid < 2) throw InvalidArgument("grid must be >= 2");
    if (pipeline.features.window_cols && *pipeline.features.window_cols < 2)
        throw InvalidArgument("window_cols must be >= 2");
    if (!(pipeline.trace.lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    train.validate();
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidArgument("threshold must lie in [0,1]");
    if (tolerance < 0) throw InvalidArgument("tolerance must be >= 0");
    if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
    if (synth_count < 1) throw InvalidArgument("count must be >= 1");
    if (port < 0 || port > 65535) throw InvalidArgument("port must lie in [0,65535]");
}

CliConfig config_from_json(const json& j, CliConfig c) {
    check_keys(j, "config", {"seg", "features", "train", "trace", "eval", "synth", "serve"});
    if (j.contains("seg")) {
        const auto& s = j["seg"];
        check_keys(s, "seg", {"n", "char_width", "core_fraction"});
        take(s, "n", c.pipeline.seg.n);
        if (s.contains("char_width")) {
            if (s["char_width"].is_null() || s["char_width"] == "auto")
                c.pipeline.seg.char_width.reset();
            else
                take(s, "char_width", c.pipeline.seg.char_width.emplace());
        }
        take(s, "core_fraction", c.pipeline.seg.core_fraction);
    }
    if (j.contains("features")) {
        const auto& f = j["features"];
        check_keys(f, "features", {"window_cols", "grid"});
        if (f.contains("window_cols")) {
            if (f["window_cols"].is_null())
                c.pipeline.features.window_cols.reset();
            else
                take(f, "window_cols", c.pipeline.features.window_cols.emplace());
        }
        take(f, "grid", c.pipeline.features.grid);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        check_keys(t, "train", {"learning_rate", "momentum", "max_epochs", "target_mse", "seed", "hidden", "rbf_centers",
                                "rbf_ridge", "threshold"});
        take(t, "learning_rate", c.train.learning_rate);
        take(t, "momentum", c.train.momentum);
        take(t, "max_epochs", c.train.max_epochs);
        take(t, "target_mse", c.train.target_mse);
        take(t, "seed", c.train.rng_seed);
        take(t, "hidden", c.train.hidden);
        take(t, "rbf_centers", c.train.rbf_centers);
        take(t, "rbf_ridge", c.train.rbf_ridge);
        take(t, "threshold", c.threshold);
    }
    if (j.contains("trace")) {
        check_keys(j["trace"], "trace", {"lambda"});
        take(j["trace"], "lambda", c.pipeline.trace.lambda);
    }
    if (j.contains("eval")) {
        check_keys(j["eval"], "eval", {"tolerance", "jobs"});
        take(j["eval"], "tolerance", c.tolerance);
        take(j["eval"], "jobs", c.jobs);
    }
    if (j.contains("synth")) {
        check_keys(j["synth"], "synth", {"seed", "count"});
        take(j["synth"], "seed", c.synth_seed);
        take(j["synth"], "count", c.synth_count);
    }
    if (j.contains("serve")) {
        check_keys(j["serve"], "serve", {"port"});
        take(j["serve"], "port", c.port);
    }
    return c;
}

json config_to_json(const CliConfig& c) {
    const auto& s = c.pipeline.seg;
    const auto& f = c.pipeline.features;
    return {{"seg",
             {{"n", s.n},
              {"char_width", s.char_width ? json(*s.char_width) : json("auto")},
              {"core_fraction", s.core_fraction}}},
            {"features", {{"window_cols", f.window_cols ? json(*f.window_cols) : json(nullptr)}, {"grid", f.grid}}},
            {"train",
             {{"learning_rate", c.train.learning_rate},
              {"momentum", c.train.momentum},
              {"max_epochs", c.train.max_epochs},
              {"target_mse", c.train.target_mse},
              {"seed", c.train.rng_seed},
              {"hidden", c.train.hidden},
              {"rbf_centers", c.train.rbf_centers},
              {"rbf_ridge", c.train.rbf_ridge},
              {"threshold", c.threshold}}},
            {"trace", {{"lambda", c.pipeline.trace.lambda}}},
            {"eval", {{"tolerance", c.tolerance}, {"jobs", c.jobs}}},
            {"synth", {{"seed", c.synth_seed}, {"count", c.synth_count}}},
            {"serve", {{"port", c.port}}}};
}

namespace {

// Command-line values that override the config file when given.
struct Flags {
    std::string config;
    std::string format = "text";
    std::optional<std::uint64_t> seed;
    std::optional<int> n, char_width, tolerance, jobs, port, window, grid, hidden, epochs, rbf_centers, count;
    std::optional<double> core_fraction, lr, momentum, target_mse, rbf_ridge, threshold, lambda;
};

CliConfig resolve_config(const Flags& f) {
    CliConfig c;
    std::string path = f.config;
    if (path.empty())
        if (const char* env = std::getenv(kConfigEnv); env != nullptr) path = env;
    try {
        if (!path.empty()) {
            if (!fs::is_regular_file(path)) throw UsageError("config not found: " + path);
            std::ifstream in(path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error&) {
                throw UsageError("config is not valid JSON: " + path);
            }
            c = config_from_json(j, c);
        }
        if (f.seed) c.train.rng_seed = c.synth_seed = *f.seed;
        if (f.n) c.pipeline.seg.n = *f.n;
        if (f.char_width) c.pipeline.seg.char_width = *f.char_width;
        if (f.core_fraction) c.pipeline.seg.core_fraction = *f.core_fraction;
        if (f.window) c.pipeline.features.window_cols = *f.window;
        if (f.grid) c.pipeline.features.grid = *f.grid;
        if (f.lambda) c.pipeline.trace.lambda = *f.lambda;
        if (f.lr) c.train.learning_rate = *f.lr;
        if (f.momentum) c.train.momentum = *f.momentum;
        if (f.epochs) c.train.max_epochs = *f.epochs;
        if (f.target_mse) c.train.target_mse = *f.target_mse;
        if (f.hidden) c.train.hidden = *f.hidden;
        if (f.rbf_centers) c.train.rbf_centers = *f.rbf_centers;
        if (f.rbf_ridge) c.train.rbf_ridge = *f.rbf_ridge;
        if (f.threshold) c.threshold = *f.threshold;
        if (f.tolerance) c.tolerance = *f.tolerance;
        if (f.jobs) c.jobs = *f.jobs;
        if (f.count) c.synth_count = *f.count;
        if (f.port) c.port = *f.port;
        c.validate();
    } catch (const InvalidArgument& err) {
        throw UsageError(err.what());
    }
    return c;
}

struct Ctx {
    const CliConfig& cfg;
    bool json_out;
    std::ostream& out;
    std::ostream& err;
};

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw UsageError(what + " not found: " + p.string());
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

EnsembleModel load_checked_model(const Ctx& ctx, const fs::path& path) {
    require_file(path, "model");
    EnsembleModel m = load_model(path);
    const int dim = ctx.cfg.pipeline.features.dim();
    if (m.input_dim() != dim)
        throw Error("model expects " + std::to_string(m.input_dim()) + " features but the feature config gives " +
                    std::to_string(dim));
    return m;
}

json read_json_file(const fs::path& p, const std::string& what) {
    require_file(p, what);
    std::ifstream in(p);
    try {
        return json::parse(in);
    } catch (const json::parse_error&) {
        throw FormatError(what + " is not valid JSON: " + p.string());
    }
}

// ---------------------------------------------------------------- commands

int cmd_preprocess(const Ctx& ctx, const fs::path& in, const fs::path& out, const std::string& stage) {
    require_file(in, "input image");
    const Preprocessed pre = preprocess(load_pgm(in));
    const BinaryImage& result = stage == "binary" ? static_cast<const BinaryImage&>(pre.slant.image) : pre.skeleton;
    save_pgm(result, out);
    if (ctx.json_out) {
        ctx.out << json{{"threshold", pre.threshold},
                        {"slant_degrees", pre.slant.angle},
                        {"width", result.width},
                        {"height", result.height},
                        {"stage", stage},
                        {"output", out.string()}}
                       .dump()
                << "\n";
    } else {
        ctx.out << "threshold " << pre.threshold << "\nslant " << pre.slant.angle << "\nsize " << result.width << "x"
                << result.height << "\n";
    }
    return kExitOk;
}

int cmd_cuts(const Ctx& ctx, const fs::path& in, const std::string& out_path, const std::string& model_path) {
    require_file(in, "input image");
    std::optional<EnsembleModel> model;
    if (!model_path.empty()) model = load_checked_model(ctx, model_path);
    const Preprocessed pre = preprocess(load_pgm(in));
    auto heur = run_heuristics(pre.skeleton, ctx.cfg.pipeline.seg);
    auto cuts = model ? validate_cuts(pre.skeleton, std::move(heur.cuts), heur.char_width, ctx.cfg.pipeline.features, *model)
                      : std::move(heur.cuts);
    const json doc{{"width", pre.skeleton.width},
                   {"height", pre.skeleton.height},
                   {"char_width", heur.char_width},
                   {"cuts", cuts_to_json(cuts)}};
    if (!out_path.empty()) {
        const std::string text = doc.dump(2) + "\n";
        write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }
    if (ctx.json_out) {
        ctx.out << doc.dump() << "\n";
    } else {
        ctx.out << "width " << pre.skeleton.width << " height " << pre.skeleton.height << " char_width " << heur.char_width
                << "\n";
        for (const auto& c : cuts) ctx.out << c.column << "\t" << to_string(c.status) << "\t" << c.crossing_count << "\n";
    }
    return kExitOk;
}

json metrics_json(const FitMetrics& m) {
    return {{"rmse", m.rmse}, {"r", m.r ? json(*m.r) : json(nullptr)}, {"si", m.si ? json(*m.si) : json(nullptr)}};
}

Dataset load_rows(const Ctx& ctx, const fs::path& p) {
    if (fs::is_directory(p)) return to_dataset(build_training_set(load_corpus(p), ctx.cfg.pipeline));
    require_file(p, "training set");
    return to_dataset(load_training_set(p));
}

int cmd_train(const Ctx& ctx, const fs::path& in, const fs::path& model_out, const std::string& holdout_path) {
    if (!fs::exists(in)) throw UsageError("training set not found: " + in.string());
    const Dataset train = load_rows(ctx, in);
    if (train.empty()) throw Error("training set is empty");
    for (const auto& s : train)
        if (s.x.size() != train.front().x.size()) throw Error("training rows differ in feature count");
    Dataset holdout;
    if (!holdout_path.empty()) {
        if (!fs::exists(holdout_path)) throw UsageError("holdout set not found: " + holdout_path);
        holdout = load_rows(ctx, holdout_path);
    }

    auto t = train_ensemble(train, holdout, ctx.cfg.train);
    t.model.threshold = ctx.cfg.threshold;
    save_model(t.model, model_out);

    std::size_t positives = 0;
    for (const auto& s : train) positives += s.label > 0.5;
    if (ctx.json_out) {
        auto split = [](const TrainLog::Split& s) {
            return json{{"rows", s.rows},
                        {"mlp", metrics_json(s.mlp)},
                        {"rbf", metrics_json(s.rbf)},
                        {"ensemble", metrics_json(s.ensemble)}};
        };
        json j{{"rows", train.size()},
               {"positive", positives},
               {"mlp_epochs", t.log.mlp.mse.size()},
               {"mlp_final_mse", t.log.mlp.mse.back()},
               {"rbf_centers", t.model.rbf.centers.size()},
               {"train", split(t.log.train)},
               {"model", model_out.string()}};
        if (t.log.holdout) j["holdout"] = split(*t.log.holdout);
        ctx.out << j.dump() << "\n";
        return kExitOk;
    }
    ctx.out << "rows " << train.size() << " (" << positives << " valid)\n";
    ctx.out << "mlp: " << t.log.mlp.mse.size() << " epochs, final mse " << fixed(t.log.mlp.mse.back(), 6) << "\n";
    ctx.out << "rbf: " << t.model.rbf.centers.size() << " centres\n";
    auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("n/a"); };
    auto rows = [&](const char* name, const TrainLog::Split& s) {
        const std::pair<const char*, const FitMetrics*> members[] = {{"mlp", &s.mlp}, {"rbf", &s.rbf}, {"ensemble", &s.ensemble}};
        for (const auto& [member, m] : members)
            ctx.out << std::left << std::setw(9) << name << std::setw(10) << member << "RMSE " << fixed(m->rmse, 4)
                    << "  R " << opt(m->r) << "  SI " << opt(m->si) << "\n";
    };
    rows("train", t.log.train);
    if (t.log.holdout) rows("holdout", *t.log.holdout);
    ctx.out << "model written to " << model_out.string() << "\n";
    return kExitOk;
}

int cmd_segment(const Ctx& ctx, const fs::path& in, const fs::path& model_path, const fs::path& outdir) {
    const EnsembleModel model = load_checked_model(ctx, model_path);
    require_file(in, "input image");
    const WordAnalysis a = analyze_word(load_pgm(in), ctx.cfg.pipeline, &model, true);
    const auto segments = segment_characters(a.pre.slant.image, a.paths);

    fs::create_directories(outdir);
    std::vector<std::string> files;
    for (const auto& s : segments) {
        const std::string name = in.stem().string() + "_char_" + std::to_string(s.index) + ".pgm";
        save_pgm(s.image, outdir / name);
        files.push_back(name);
    }
    const json cuts_doc{{"width", a.pre.skeleton.width},
                        {"height", a.pre.skeleton.height},
                        {"char_width", a.char_width},
                        {"cuts", cuts_to_json(a.cuts)}};
    const json paths_doc{{"paths", paths_to_json(a.paths)}};
    for (const auto& [name, doc] : {std::pair{"cuts.json", &cuts_doc}, std::pair{"paths.json", &paths_doc}}) {
        const std::string text = doc->dump(2) + "\n";
        write_file(outdir / name, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }
    save_pgm(a.pre.slant.image, outdir / "word.pgm");

    const auto boundaries = boundary_columns(a.cuts);
    if (ctx.json_out) {
        ctx.out << json{{"characters", segments.size()}, {"boundaries", boundaries}, {"files", files}, {"outdir", outdir.string()}}
                       .dump()
                << "\n";
    } else {
        ctx.out << "characters " << segments.size() << "\nboundaries";
        for (int b : boundaries) ctx.out << " " << b;
        ctx.out << "\n";
    }
    return kExitOk;
}

int cmd_eval(const Ctx& ctx, const fs::path& corpus_dir, const std::string& model_path, bool heuristics_only,
             const std::string& out_path) {
    if (model_path.empty() && !heuristics_only) throw UsageError("eval needs a model (or --heuristics-only)");
    if (!model_path.empty() && heuristics_only) throw UsageError("--heuristics-only takes no model");
    if (!fs::is_directory(corpus_dir)) throw UsageError("corpus not found: " + corpus_dir.string());
    std::optional<EnsembleModel> model;
    if (!model_path.empty()) model = load_checked_model(ctx, model_path);
    const auto corpus = load_corpus(corpus_dir);
    EvalOptions opts;
    opts.pipeline = ctx.cfg.pipeline;
    opts.tolerance = ctx.cfg.tolerance;
    opts.jobs = ctx.cfg.jobs;
    const EvalReport report = model ? evaluate_pipeline(corpus, *model, opts) : evaluate_heuristics(corpus, opts);
    const json j = report_json(report);
    if (!out_path.empty()) {
        const std::string text = j.dump(2) + "\n";
        write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }
    if (ctx.json_out)
        ctx.out << j.dump() << "\n";
    else
        ctx.out << report_text(report);
    return kExitOk;
}

int cmd_synth(const Ctx& ctx, const fs::path& outdir, const std::string& split, bool label) {
    if (split != "train" && split != "test") throw UsageError("split must be train or test");
    SynthOptions opts;
    opts.split = split;
    const auto words = synthesize_corpus(ctx.cfg.synth_seed, ctx.cfg.synth_count, opts);
    auto records = write_corpus(outdir, words);
    std::size_t boundaries = 0, labelled = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        boundaries += records[i].gt_boundaries.size();
        if (!label) continue;
        records[i].cuts = label_from_ground_truth(words[i].image, records[i].gt_boundaries, ctx.cfg.pipeline, ctx.cfg.tolerance);
        labelled += records[i].cuts.size();
    }
    if (label) write_manifest(outdir, records);
    if (ctx.json_out) {
        ctx.out << json{{"words", records.size()}, {"boundaries", boundaries}, {"labelled_cuts", labelled}, {"dir", outdir.string()}}
                       .dump()
                << "\n";
    } else {
        ctx.out << "wrote " << records.size() << " words (" << boundaries << " boundaries";
        if (label) ctx.out << ", " << labelled << " labelled cuts";
        ctx.out << ") to " << outdir.string() << "\n";
    }
    return kExitOk;
}

int cmd_render(const Ctx& ctx, const fs::path& in, const fs::path& cuts_path, const fs::path& paths_path, const fs::path& out) {
    require_file(in, "input image");
    const json cj = read_json_file(cuts_path, "cut list");
    const json pj = read_json_file(paths_path, "path list");
    const auto cuts = cuts_from_json(cj.is_object() && cj.contains("cuts") ? cj["cuts"] : cj);
    const auto paths = paths_from_json(pj.is_object() && pj.contains("paths") ? pj["paths"] : pj);
    const Preprocessed pre = preprocess(load_pgm(in));
    const BinaryImage& word = pre.slant.image;
    for (const auto& c : cuts)
        if (c.column < 0 || c.column >= word.width) throw Error("cut column " + std::to_string(c.column) + " is outside the word");
    for (const auto& p : paths)
        if (static_cast<int>(p.columns.size()) != word.height) throw Error("path height does not match the word");
    render_overlay(word, cuts, paths, out);
    if (ctx.json_out)
        ctx.out << json{{"output", out.string()}, {"cuts", cuts.size()}, {"paths", paths.size()}}.dump() << "\n";
    else
        ctx.out << "overlay written to " << out.string() << "\n";
    return kExitOk;
}

int cmd_serve(const Ctx& ctx, const fs::path& corpus_dir, const fs::path& labels, const std::string& static_dir,
              const std::string& export_path) {
    if (!fs::is_directory(corpus_dir)) throw UsageError("corpus not found: " + corpus_dir.string());
    if (!static_dir.empty() && !fs::is_directory(static_dir)) throw UsageError("static directory not found: " + static_dir);
    ServiceOptions opts;
    opts.corpus_dir = corpus_dir;
    opts.labels_file = labels;
    opts.static_dir = static_dir;
    opts.export_path = export_path;
    opts.pipeline = ctx.cfg.pipeline;
    AnnotationService svc(std::move(opts));
    const int port = svc.bind(ctx.cfg.port);
    const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/";
    if (ctx.json_out)
        ctx.out << json{{"url", url}}.dump() << std::endl;
    else
        ctx.out << "serving on " << url << std::endl;
    svc.listen();
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Character segmentation of cursive word images", "cursive_cut"};
    app.fallthrough();
    app.require_subcommand(1);

    Flags f;
    app.add_option("--config", f.config, "JSON config file (fallback: $" + std::string(kConfigEnv) + ")");
    app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--seed", f.seed, "Seed for synthesis and training");
    app.add_option("--n", f.n, "Over-segmentation divisor");
    app.add_option("--char-width", f.char_width, "Character width in pixels (default: estimated)");
    app.add_option("--core-fraction", f.core_fraction, "Core-zone projection fraction");
    app.add_option("--window", f.window, "Feature window width in columns (default: 2 x char width)");
    app.add_option("--grid", f.grid, "Feature density grid size");
    app.add_option("--lambda", f.lambda, "Path deviation cost per column");
    app.add_option("--tolerance", f.tolerance, "Boundary matching tolerance in pixels");
    app.add_option("--jobs", f.jobs, "Worker threads for eval");
    app.add_option("--port", f.port, "Port for serve (0 = any free port)");
    app.add_option("--hidden", f.hidden, "MLP hidden units");
    app.add_option("--lr", f.lr, "MLP learning rate");
    app.add_option("--momentum", f.momentum, "MLP momentum");
    app.add_option("--epochs", f.epochs, "MLP epoch limit");
    app.add_option("--target-mse", f.target_mse, "MLP stopping MSE");
    app.add_option("--rbf-centers", f.rbf_centers, "RBF centre count");
    app.add_option("--rbf-ridge", f.rbf_ridge, "RBF ridge penalty");
    app.add_option("--threshold", f.threshold, "Ensemble decision threshold");
    app.add_option("--count", f.count, "Words to synthesise");

    std::string in, out_file, model, outdir, cuts_file, paths_file, corpus, labels, stage = "skeleton", split = "test",
                                                                             holdout, static_dir, export_path;
    bool heuristics_only = false, label = false;

    auto* pre = app.add_subcommand("preprocess", "Binarise, deslant and thin a word image");
    pre->add_option("input", in, "Input PGM")->required();
    pre->add_option("output", out_file, "Output PGM")->required();
    pre->add_option("--stage", stage, "Image to write")->check(CLI::IsMember({"binary", "skeleton"}));

    auto* cuts = app.add_subcommand("cuts", "Propose and filter candidate cuts");
    cuts->add_option("input", in, "Input PGM")->required();
    cuts->add_option("--out", out_file, "Also write the cut list JSON here");
    cuts->add_option("--model", model, "Validate cuts with this ensemble");

    auto* train = app.add_subcommand("train", "Train the MLP/RBF ensemble");
    train->add_option("training", in, "Training set (JSON lines) or labelled corpus directory")->required();
    train->add_option("model", out_file, "Output model JSON")->required();
    train->add_option("--holdout", holdout, "Held-out set reported alongside training fit");

    auto* seg = app.add_subcommand("segment", "Segment a word into character images");
    seg->add_option("input", in, "Input PGM")->required();
    seg->add_option("model", model, "Model JSON")->required();
    seg->add_option("outdir", outdir, "Output directory")->required();

    auto* ev = app.add_subcommand("eval", "Score the pipeline on a corpus");
    ev->add_option("corpus", corpus, "Corpus directory")->required();
    ev->add_option("model", model, "Model JSON");
    ev->add_flag("--heuristics-only", heuristics_only, "Skip the networks");
    ev->add_option("--out", out_file, "Also write the JSON report here");

    auto* syn = app.add_subcommand("synth", "Generate a synthetic corpus");
    syn->add_option("outdir", outdir, "Output directory")->required();
    syn->add_option("--split", split, "Split written to the manifest")->check(CLI::IsMember({"train", "test"}));
    syn->add_flag("--label", label, "Label candidate cuts from the ground truth");

    auto* ren = app.add_subcommand("render", "Draw cuts and paths over the preprocessed word");
    ren->add_option("input", in, "Input PGM")->required();
    ren->add_option("cuts", cuts_file, "Cut list JSON")->required();
    ren->add_option("paths", paths_file, "Path list JSON")->required();
    ren->add_option("output", out_file, "Output PGM")->required();

    auto* srv = app.add_subcommand("serve", "Run the annotation service");
    srv->add_option("corpus", corpus, "Corpus directory")->required();
    srv->add_option("labels", labels, "Label log (JSON lines)")->required();
    srv->add_option("--static-dir", static_dir, "UI assets served at /");
    srv->add_option("--export", export_path, "Where POST /api/export writes the training set");

    bool json_out = false;
    try {
        app.parse(argc, argv);
        json_out = f.format == "json";
        const CliConfig cfg = resolve_config(f);
        const Ctx ctx{cfg, json_out, out, err};
        if (pre->parsed()) return cmd_preprocess(ctx, in, out_file, stage);
        if (cuts->parsed()) return cmd_cuts(ctx, in, out_file, model);
        if (train->parsed()) return cmd_train(ctx, in, out_file, holdout);
        if (seg->parsed()) return cmd_segment(ctx, in, model, outdir);
        if (ev->parsed()) return cmd_eval(ctx, corpus, model, heuristics_only, out_file);
        if (syn->parsed()) return cmd_synth(ctx, outdir, split, label);
        if (ren->parsed()) return cmd_render(ctx, in, cuts_file, paths_file, out_file);
        if (srv->parsed()) return cmd_serve(ctx, corpus, labels, static_dir, export_path);
        throw UsageError("no command given");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        if (json_out) out << json{{"error", e.what()}, {"exit_code", kExitUsage}}.dump() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        if (json_out) out << json{{"error", e.what()}, {"exit_code", kExitRuntime}}.dump() << "\n";
        return kExitRuntime;
    }
}

}  // namespace cursive::cli

#include "cursive/pipeline.hpp"

namespace cursive {

Preprocessed preprocess(const GrayImage& img) {
    Preprocessed p;
    auto otsu = otsu_threshold(img);
    p.threshold = otsu.threshold;
    p.slant = correct_slant_with_transform(otsu.image);
    p.skeleton = thin(p.slant.image);
    return p;
}

std::vector<CandidateCut> validate_cuts(const SkeletonImage& img, std::vector<CandidateCut> cuts, int char_width,
                                        const FeatureConfig& cfg, const EnsembleModel& model) {
    const auto context = cuts;
    for (auto& c : cuts) {
        if (c.status != CutStatus::heuristic_valid) continue;
        const auto f = extract_features(img, c, context, cfg, char_width);
        c.status = classify_cut(model, f) == Verdict::valid ? CutStatus::nn_valid : CutStatus::nn_invalid;
    }
    return cuts;
}

std::vector<int> boundary_columns(const std::vector<CandidateCut>& cuts) {
    std::vector<int> cols;
    for (const auto& c : cuts)
        if (c.status == CutStatus::heuristic_valid || c.status == CutStatus::nn_valid) cols.push_back(c.column);
    return cols;
}

WordAnalysis analyze_word(const GrayImage& img, const PipelineOptions& opts, const EnsembleModel* model,
                          bool trace_paths) {
    WordAnalysis a;
    a.pre = preprocess(img);
    auto heur = run_heuristics(a.pre.skeleton, opts.seg);
    a.char_width = heur.char_width;
    a.cuts = model ? validate_cuts(a.pre.skeleton, std::move(heur.cuts), a.char_width, opts.features, *model)
                   : std::move(heur.cuts);
    if (a.pre.skeleton.count() == 0) return a;
    a.zone = detect_core_zone(a.pre.skeleton, opts.seg.core_fraction);
    if (!trace_paths) return a;
    for (const auto& c : a.cuts)
        if (c.status == CutStatus::heuristic_valid || c.status == CutStatus::nn_valid)
            a.paths.push_back(trace_path(a.pre.skeleton, c, *a.zone, opts.trace));
    return a;
}

}  // namespace cursive

#pragma once

#include <optional>
#include <vector>

#include "cursive/features.hpp"
#include "cursive/image.hpp"
#include "cursive/imgproc.hpp"
#include "cursive/neural.hpp"
#include "cursive/pathtrace.hpp"
#include "cursive/segmenter.hpp"

namespace cursive {

struct Preprocessed {
    int threshold = 0;
    SlantCorrection slant;  // slant.image is the binarised, upright, cropped word
    SkeletonImage skeleton;
};

// Binarises with Otsu, then deslants and thins the word.
Preprocessed preprocess(const GrayImage& img);

struct PipelineOptions {
    SegParams seg;
    FeatureConfig features;
    TraceOptions trace;
};

// Scores every heuristic_valid cut with the ensemble and marks it nn_valid or
// nn_invalid. Other cuts are left untouched.
std::vector<CandidateCut> validate_cuts(const SkeletonImage& img, std::vector<CandidateCut> cuts, int char_width,
                                        const FeatureConfig& cfg, const EnsembleModel& model);

// Columns the pipeline reports as character boundaries.
std::vector<int> boundary_columns(const std::vector<CandidateCut>& cuts);

struct WordAnalysis {
    Preprocessed pre;
    int char_width = 0;
    std::vector<CandidateCut> cuts;
    std::optional<CoreZone> zone;  // absent for words without ink
    std::vector<SegmentationPath> paths;
};

// Full chain on one word. Without a model the heuristic boundaries are kept.
WordAnalysis analyze_word(const GrayImage& img, const PipelineOptions& opts, const EnsembleModel* model,
                          bool trace_paths = true);

}  // namespace cursive

#pragma once

#include <optional>
#include <vector>

#include "cursive/image.hpp"
#include "cursive/segmenter.hpp"

namespace cursive {

struct FeatureConfig {
    std::optional<int> window_cols;  // nullopt = 2 * char_width
    int grid = 8;

    int resolved_window(int char_width) const { return window_cols ? *window_cols : 2 * char_width; }
    int dim() const { return grid * grid + kScalarFeatures; }
    void validate(int char_width) const;

    static constexpr int kScalarFeatures = 6;
};

using FeatureVector = std::vector<double>;

// Neighbourhood description of one cut, every component in [0,1]:
//   grid*grid ink densities of a window_cols-wide, full-height window centred
//   on the cut (cells outside the image count as background), then
//   crossing count / 10, min crossing count within +-2 columns / 10,
//   distance to the nearest other active cut / width, left half-window
//   density, right half-window density, column / width.
FeatureVector extract_features(const SkeletonImage& img, const CandidateCut& cut,
                               const std::vector<CandidateCut>& cuts, const FeatureConfig& cfg, int char_width);

}  // namespace cursive

#include "cursive/features.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "cursive/error.hpp"

namespace cursive {

void FeatureConfig::validate(int char_width) const {
    if (grid < 2) throw InvalidArgument("feature grid must be >= 2");
    if (resolved_window(char_width) < 2) throw InvalidArgument("feature window must be >= 2 columns");
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Ink fraction of [x0,x1) x [y0,y1); out-of-image cells are background.
double density(const BinaryImage& img, int x0, int x1, int y0, int y1) {
    const long area = static_cast<long>(x1 - x0) * (y1 - y0);
    if (area <= 0) return 0.0;
    long ink = 0;
    for (int y = std::max(y0, 0); y < std::min(y1, img.height); ++y)
        for (int x = std::max(x0, 0); x < std::min(x1, img.width); ++x) ink += img.at(x, y);
    return clamp01(static_cast<double>(ink) / static_cast<double>(area));
}

}  // namespace

FeatureVector extract_features(const SkeletonImage& img, const CandidateCut& cut,
                               const std::vector<CandidateCut>& cuts, const FeatureConfig& cfg, int char_width) {
    cfg.validate(char_width);
    if (cut.column < 0 || cut.column >= img.width) throw InvalidArgument("cut column outside image");

    const int window = cfg.resolved_window(char_width);
    const int g = cfg.grid;
    const int left = cut.column - window / 2;
    FeatureVector f;
    f.reserve(static_cast<std::size_t>(cfg.dim()));

    for (int gy = 0; gy < g; ++gy) {
        const int y0 = gy * img.height / g;
        const int y1 = (gy + 1) * img.height / g;
        for (int gx = 0; gx < g; ++gx) {
            const int x0 = left + gx * window / g;
            const int x1 = left + (gx + 1) * window / g;
            f.push_back(density(img, x0, x1, y0, y1));
        }
    }

    f.push_back(clamp01(crossing_count(img, cut.column) / 10.0));

    int min_cross = std::numeric_limits<int>::max();
    for (int x = std::max(0, cut.column - 2); x <= std::min(img.width - 1, cut.column + 2); ++x)
        min_cross = std::min(min_cross, crossing_count(img, x));
    f.push_back(clamp01(min_cross / 10.0));

    int nearest = img.width;
    for (const auto& other : cuts)
        if (is_active(other) && other.column != cut.column)
            nearest = std::min(nearest, std::abs(other.column - cut.column));
    f.push_back(clamp01(static_cast<double>(nearest) / img.width));

    f.push_back(density(img, left, cut.column, 0, img.height));
    f.push_back(density(img, cut.column, left + window, 0, img.height));
    f.push_back(clamp01(static_cast<double>(cut.column) / img.width));
    return f;
}

}  // namespace cursive

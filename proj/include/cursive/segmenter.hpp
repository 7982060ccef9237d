#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cursive/image.hpp"

namespace cursive {

// Lifecycle of a candidate cut. Values are ordered along the pipeline and a
// cut's status only ever moves forward.
enum class CutStatus {
    proposed,
    loop_rejected,
    width_merged,
    heuristic_valid,
    nn_valid,
    nn_invalid,
};

std::string_view to_string(CutStatus s);
CutStatus cut_status_from_string(std::string_view s);

struct CandidateCut {
    int column = 0;
    CutStatus status = CutStatus::proposed;
    int crossing_count = 0;

    friend bool operator==(const CandidateCut&, const CandidateCut&) = default;
};

// True for cuts that a later stage still treats as a boundary candidate.
inline bool is_active(const CandidateCut& c) {
    return c.status == CutStatus::proposed || c.status == CutStatus::heuristic_valid ||
           c.status == CutStatus::nn_valid || c.status == CutStatus::nn_invalid;
}

struct SegParams {
    int n = 20;                     // over-segmentation divisor
    std::optional<int> char_width;  // nullopt = estimate from the cuts
    double core_fraction = 0.2;

    void validate() const;
};

struct CoreZone {
    int top_row = 0;
    int bottom_row = 0;

    friend bool operator==(const CoreZone&, const CoreZone&) = default;
};

// Cuts at round(k * width / n), k = 1..n-1, all `proposed`.
std::vector<CandidateCut> oversegment(const SkeletonImage& img, const SegParams& params);

// Number of maximal vertical ink runs in a column.
int crossing_count(const BinaryImage& img, int column);

// Records the crossing count on every cut and rejects those crossing more
// than one stroke (loops and semi-loops).
std::vector<CandidateCut> filter_loops(std::vector<CandidateCut> cuts, const SkeletonImage& img);

// Explicit params.char_width when given; otherwise the median gap between
// consecutive surviving cuts, or the image height with fewer than two.
int estimate_char_width(const SkeletonImage& img, const std::vector<CandidateCut>& cuts,
                        const SegParams& params = {});

// Clusters surviving cuts whose consecutive gaps are below char_width and
// keeps one boundary per cluster at the rounded mean column.
std::vector<CandidateCut> merge_by_width(std::vector<CandidateCut> cuts, int char_width);

// Largest contiguous band of rows whose ink count reaches core_fraction of
// the busiest row. Topmost band wins ties.
CoreZone detect_core_zone(const BinaryImage& img, double core_fraction);

// oversegment -> filter_loops -> estimate_char_width -> merge_by_width.
struct HeuristicResult {
    std::vector<CandidateCut> cuts;
    int char_width = 0;
};
HeuristicResult run_heuristics(const SkeletonImage& img, const SegParams& params);

}  // namespace cursive

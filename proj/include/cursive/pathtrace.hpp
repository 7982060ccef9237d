#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "cursive/image.hpp"
#include "cursive/segmenter.hpp"

namespace cursive {

// One column per image row; adjacent rows differ by at most one column.
struct SegmentationPath {
    int seed_column = 0;
    std::vector<int> columns;

    friend bool operator==(const SegmentationPath&, const SegmentationPath&) = default;
};

inline constexpr double kInkPenalty = 1e6;

struct TraceOptions {
    double lambda = 1.0;  // cost per column of deviation from the cut
};

// Row the path is pinned to: the background row of the cut column closest to
// the core-zone centre (upper row on ties), or the centre itself when the
// whole column is ink.
int seed_row(const BinaryImage& img, int column, const CoreZone& zone);

// Per-cell cost lambda*|col - cut| + kInkPenalty*[ink].
double cell_cost(const BinaryImage& img, int row, int col, int cut_column, double lambda);
double path_cost(const BinaryImage& img, const SegmentationPath& path, double lambda);

// Minimum-cost top-to-bottom path through (seed_row, cut.column) with moves of
// -1/0/+1 columns per row. Ties go to the smaller column.
SegmentationPath trace_path(const BinaryImage& img, const CandidateCut& cut, const CoreZone& zone,
                            const TraceOptions& opts = {});

struct CharacterSegment {
    int index = 0;
    Box strip;          // extent of the region between the bounding paths
    Box content;        // ink bounding box in word coordinates (empty if no ink)
    BinaryImage image;  // crop of `content`, or of `strip` when there is no ink
    std::optional<int> left_path;   // index into the path list, nullopt = image edge
    std::optional<int> right_path;
};

// Splits the word along ordered, non-crossing paths. Column c of a row goes to
// segment i iff paths[i-1][row] <= c < paths[i][row].
std::vector<CharacterSegment> segment_characters(const BinaryImage& img, const std::vector<SegmentationPath>& paths);

struct OverlayLevels {
    std::uint8_t rejected_cut = 200;
    std::uint8_t valid_cut = 150;
    std::uint8_t path = 90;
};

// Word in black on white with rejected cuts, valid cuts and paths drawn in
// distinct gray levels (paths on top).
GrayImage render_overlay(const BinaryImage& img, const std::vector<CandidateCut>& cuts,
                         const std::vector<SegmentationPath>& paths, const OverlayLevels& levels = {});
void render_overlay(const BinaryImage& img, const std::vector<CandidateCut>& cuts,
                    const std::vector<SegmentationPath>& paths, const std::filesystem::path& out_path);

}  // namespace cursive

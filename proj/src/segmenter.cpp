#include "cursive/segmenter.hpp"

#include <algorithm>
#include <array>

#include "cursive/error.hpp"

namespace cursive {

namespace {

constexpr std::array<std::string_view, 6> kStatusNames{
    "proposed", "loop_rejected", "width_merged", "heuristic_valid", "nn_valid", "nn_invalid",
};

bool survives_loops(const CandidateCut& c) { return c.status != CutStatus::loop_rejected; }

}  // namespace

std::string_view to_string(CutStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

CutStatus cut_status_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kStatusNames.size(); ++i)
        if (kStatusNames[i] == s) return static_cast<CutStatus>(i);
    throw FormatError("unknown cut status '" + std::string(s) + "'");
}

void SegParams::validate() const {
    if (n < 2) throw InvalidArgument("segmentation divisor n must be >= 2");
    if (char_width && *char_width < 1) throw InvalidArgument("char_width must be positive");
    if (!(core_fraction > 0.0 && core_fraction < 1.0)) throw InvalidArgument("core_fraction must lie in (0,1)");
}

std::vector<CandidateCut> oversegment(const SkeletonImage& img, const SegParams& params) {
    params.validate();
    if (img.width < params.n)
        throw InvalidArgument("image width " + std::to_string(img.width) + " is below n=" +
                              std::to_string(params.n) + "; cut spacing would be under one pixel");
    std::vector<CandidateCut> cuts;
    cuts.reserve(static_cast<std::size_t>(params.n - 1));
    const long w = img.width;
    const long n = params.n;
    for (long k = 1; k < n; ++k) {
        // round-half-up of k*w/n in integers
        const int col = static_cast<int>((2 * k * w + n) / (2 * n));
        cuts.push_back({col, CutStatus::proposed, 0});
    }
    return cuts;
}

int crossing_count(const BinaryImage& img, int column) {
    if (column < 0 || column >= img.width) throw InvalidArgument("column outside image");
    int runs = 0;
    bool inside = false;
    for (int y = 0; y < img.height; ++y) {
        const bool ink = img.at(column, y);
        if (ink && !inside) ++runs;
        inside = ink;
    }
    return runs;
}

std::vector<CandidateCut> filter_loops(std::vector<CandidateCut> cuts, const SkeletonImage& img) {
    for (auto& c : cuts) {
        c.crossing_count = crossing_count(img, c.column);
        if (c.status == CutStatus::proposed && c.crossing_count > 1) c.status = CutStatus::loop_rejected;
    }
    return cuts;
}

int estimate_char_width(const SkeletonImage& img, const std::vector<CandidateCut>& cuts, const SegParams& params) {
    if (params.char_width) return *params.char_width;
    std::vector<int> cols;
    for (const auto& c : cuts)
        if (survives_loops(c)) cols.push_back(c.column);
    if (cols.size() < 2) return img.height;
    std::sort(cols.begin(), cols.end());
    std::vector<int> gaps;
    for (std::size_t i = 1; i < cols.size(); ++i) gaps.push_back(cols[i] - cols[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t m = gaps.size() / 2;
    if (gaps.size() % 2 == 1) return gaps[m];
    return (gaps[m - 1] + gaps[m] + 1) / 2;
}

std::vector<CandidateCut> merge_by_width(std::vector<CandidateCut> cuts, int char_width) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cuts.size(); ++i)
        if (cuts[i].status == CutStatus::proposed) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cuts[a].column < cuts[b].column; });

    std::size_t begin = 0;
    while (begin < order.size()) {
        std::size_t end = begin + 1;
        while (end < order.size() && cuts[order[end]].column - cuts[order[end - 1]].column < char_width) ++end;
        const long len = static_cast<long>(end - begin);
        long sum = 0;
        for (std::size_t k = begin; k < end; ++k) sum += cuts[order[k]].column;
        auto& head = cuts[order[begin]];
        head.column = static_cast<int>((2 * sum + len) / (2 * len));
        head.status = CutStatus::heuristic_valid;
        for (std::size_t k = begin + 1; k < end; ++k) cuts[order[k]].status = CutStatus::width_merged;
        begin = end;
    }
    std::stable_sort(cuts.begin(), cuts.end(),
                     [](const CandidateCut& a, const CandidateCut& b) { return a.column < b.column; });
    return cuts;
}

CoreZone detect_core_zone(const BinaryImage& img, double core_fraction) {
    std::vector<int> proj(static_cast<std::size_t>(img.height), 0);
    int peak = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) proj[static_cast<std::size_t>(y)] += img.at(x, y);
        peak = std::max(peak, proj[static_cast<std::size_t>(y)]);
    }
    if (peak == 0) throw InvalidArgument("core zone: image has no foreground");
    const double level = core_fraction * peak;
    CoreZone best{0, -1};
    int y = 0;
    while (y < img.height) {
        if (proj[static_cast<std::size_t>(y)] < level) {
            ++y;
            continue;
        }
        const int top = y;
        while (y < img.height && proj[static_cast<std::size_t>(y)] >= level) ++y;
        if (y - top > best.bottom_row - best.top_row + 1) best = {top, y - 1};
    }
    return best;
}

HeuristicResult run_heuristics(const SkeletonImage& img, const SegParams& params) {
    auto cuts = filter_loops(oversegment(img, params), img);
    const int width = estimate_char_width(img, cuts, params);
    return {merge_by_width(std::move(cuts), width), width};
}

}  // namespace cursive

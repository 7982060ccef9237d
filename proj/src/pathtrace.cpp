#include "cursive/pathtrace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "cursive/error.hpp"

namespace cursive {

int seed_row(const BinaryImage& img, int column, const CoreZone& zone) {
    const int centre = (zone.top_row + zone.bottom_row) / 2;
    for (int d = 0; d < img.height; ++d) {
        for (int row : {centre - d, centre + d}) {
            if (row >= 0 && row < img.height && !img.at(column, row)) return row;
        }
    }
    return std::clamp(centre, 0, img.height - 1);
}

double cell_cost(const BinaryImage& img, int row, int col, int cut_column, double lambda) {
    return lambda * std::abs(col - cut_column) + (img.at(col, row) ? kInkPenalty : 0.0);
}

double path_cost(const BinaryImage& img, const SegmentationPath& path, double lambda) {
    double total = 0.0;
    for (int r = 0; r < img.height; ++r)
        total += cell_cost(img, r, path.columns[static_cast<std::size_t>(r)], path.seed_column, lambda);
    return total;
}

namespace {

// Cheapest path from the seed cell towards row `last` (one step of `dir` rows
// at a time). Returns the column sequence from the seed row to `last`.
std::vector<int> trace_half(const BinaryImage& img, int seed_r, int seed_c, int last, int dir, double lambda) {
    const int w = img.width;
    const int steps = (last - seed_r) * dir;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<std::size_t>(w), inf);
    cost[static_cast<std::size_t>(seed_c)] = 0.0;  // seed cell is paid once by the caller
    std::vector<std::vector<int>> from(static_cast<std::size_t>(steps), std::vector<int>(static_cast<std::size_t>(w), -1));

    std::vector<double> next(static_cast<std::size_t>(w));
    for (int s = 0; s < steps; ++s) {
        const int row = seed_r + (s + 1) * dir;
        auto& back = from[static_cast<std::size_t>(s)];
        for (int c = 0; c < w; ++c) {
            double best = inf;
            int arg = -1;
            for (int pc = std::max(0, c - 1); pc <= std::min(w - 1, c + 1); ++pc) {
                if (cost[static_cast<std::size_t>(pc)] < best) {
                    best = cost[static_cast<std::size_t>(pc)];
                    arg = pc;
                }
            }
            next[static_cast<std::size_t>(c)] = best == inf ? inf : best + cell_cost(img, row, c, seed_c, lambda);
            back[static_cast<std::size_t>(c)] = arg;
        }
        cost.swap(next);
    }

    int end = 0;
    for (int c = 1; c < w; ++c)
        if (cost[static_cast<std::size_t>(c)] < cost[static_cast<std::size_t>(end)]) end = c;

    std::vector<int> cols(static_cast<std::size_t>(steps) + 1);
    cols[static_cast<std::size_t>(steps)] = end;
    for (int s = steps; s-- > 0;) {
        end = from[static_cast<std::size_t>(s)][static_cast<std::size_t>(end)];
        cols[static_cast<std::size_t>(s)] = end;
    }
    return cols;
}

}  // namespace

SegmentationPath trace_path(const BinaryImage& img, const CandidateCut& cut, const CoreZone& zone,
                            const TraceOptions& opts) {
    if (img.empty()) throw InvalidArgument("trace_path: empty image");
    if (cut.column < 0 || cut.column >= img.width) throw InvalidArgument("trace_path: cut outside image");
    const int sr = seed_row(img, cut.column, zone);
    const auto down = trace_half(img, sr, cut.column, img.height - 1, +1, opts.lambda);
    const auto up = trace_half(img, sr, cut.column, 0, -1, opts.lambda);

    SegmentationPath p{cut.column, std::vector<int>(static_cast<std::size_t>(img.height))};
    for (std::size_t s = 0; s < up.size(); ++s) p.columns[static_cast<std::size_t>(sr) - s] = up[s];
    for (std::size_t s = 0; s < down.size(); ++s) p.columns[static_cast<std::size_t>(sr) + s] = down[s];
    return p;
}

std::vector<CharacterSegment> segment_characters(const BinaryImage& img, const std::vector<SegmentationPath>& paths) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (static_cast<int>(paths[i].columns.size()) != img.height)
            throw InvalidArgument("segment_characters: path length differs from image height");
        if (i > 0 && paths[i].seed_column < paths[i - 1].seed_column)
            throw InvalidArgument("segment_characters: paths are not sorted by seed column");
    }
    for (std::size_t i = 1; i < paths.size(); ++i)
        for (int r = 0; r < img.height; ++r)
            if (paths[i].columns[static_cast<std::size_t>(r)] < paths[i - 1].columns[static_cast<std::size_t>(r)])
                throw InvalidArgument("segment_characters: paths " + std::to_string(i - 1) + " and " +
                                      std::to_string(i) + " cross at row " + std::to_string(r));

    std::vector<CharacterSegment> segments;
    for (std::size_t i = 0; i <= paths.size(); ++i) {
        CharacterSegment seg;
        seg.index = static_cast<int>(i);
        if (i > 0) seg.left_path = static_cast<int>(i - 1);
        if (i < paths.size()) seg.right_path = static_cast<int>(i);

        auto lo = [&](int r) { return i == 0 ? 0 : paths[i - 1].columns[static_cast<std::size_t>(r)]; };
        auto hi = [&](int r) { return i == paths.size() ? img.width : paths[i].columns[static_cast<std::size_t>(r)]; };

        Box strip{img.width, 0, -1, img.height - 1};
        Box content{img.width, img.height, -1, -1};
        for (int r = 0; r < img.height; ++r) {
            if (hi(r) > lo(r)) {
                strip.left = std::min(strip.left, lo(r));
                strip.right = std::max(strip.right, hi(r) - 1);
            }
            for (int c = lo(r); c < hi(r); ++c) {
                if (!img.at(c, r)) continue;
                content.left = std::min(content.left, c);
                content.right = std::max(content.right, c);
                content.top = std::min(content.top, r);
                content.bottom = std::max(content.bottom, r);
            }
        }
        if (strip.right < strip.left) strip = Box{};
        seg.strip = strip;
        const Box& frame = content.empty() ? strip : content;
        if (content.empty()) content = Box{};
        seg.content = content;

        if (!frame.empty()) {
            seg.image = BinaryImage(frame.width(), frame.height());
            for (int r = frame.top; r <= frame.bottom; ++r)
                for (int c = std::max(lo(r), frame.left); c < std::min(hi(r), frame.right + 1); ++c)
                    if (img.at(c, r)) seg.image.set(c - frame.left, r - frame.top);
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

GrayImage render_overlay(const BinaryImage& img, const std::vector<CandidateCut>& cuts,
                         const std::vector<SegmentationPath>& paths, const OverlayLevels& levels) {
    GrayImage out = to_gray(img);
    auto vertical = [&](int col, std::uint8_t level) {
        if (col < 0 || col >= out.width) return;
        for (int r = 0; r < out.height; ++r) out.at(col, r) = level;
    };
    for (const auto& c : cuts)
        if (!is_active(c) || c.status == CutStatus::nn_invalid) vertical(c.column, levels.rejected_cut);
    for (const auto& c : cuts)
        if (c.status == CutStatus::heuristic_valid || c.status == CutStatus::nn_valid || c.status == CutStatus::proposed)
            vertical(c.column, levels.valid_cut);
    for (const auto& p : paths)
        for (int r = 0; r < out.height && r < static_cast<int>(p.columns.size()); ++r) {
            const int c = p.columns[static_cast<std::size_t>(r)];
            if (c >= 0 && c < out.width) out.at(c, r) = levels.path;
        }
    return out;
}

void render_overlay(const BinaryImage& img, const std::vector<CandidateCut>& cuts,
                    const std::vector<SegmentationPath>& paths, const std::filesystem::path& out_path) {
    save_pgm(render_overlay(img, cuts, paths), out_path);
}

}  // namespace cursive

#include "cursive/imgproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cursive {

OtsuResult otsu_threshold(const GrayImage& img) {
    std::array<std::int64_t, 256> hist{};
    for (auto p : img.pixels) ++hist[p];
    const std::int64_t total = static_cast<std::int64_t>(img.pixels.size());
    std::int64_t total_sum = 0;
    for (int v = 0; v < 256; ++v) total_sum += hist[v] * v;

    // Between-class variance up to the constant factor 1/N^2:
    //   (s0*N - S*n0)^2 / (n0 * n1), with class 0 = levels below t.
    int best_t = 0;
    long double best = 0.0L;
    std::int64_t n0 = 0;
    std::int64_t s0 = 0;
    for (int t = 1; t < 256; ++t) {
        n0 += hist[t - 1];
        s0 += hist[t - 1] * (t - 1);
        const std::int64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const long double d = static_cast<long double>(s0) * total - static_cast<long double>(total_sum) * n0;
        const long double v = d * d / (static_cast<long double>(n0) * n1);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }

    OtsuResult r{best_t, BinaryImage(img.width, img.height)};
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        if (img.pixels[i] < best_t) r.image.pixels[i] = 1;
    return r;
}

namespace {

int row_offset(int degrees, int height, int y) {
    const double t = std::tan(degrees * std::numbers::pi / 180.0);
    return static_cast<int>(std::lround(t * (height - 1 - y)));
}

int min_offset(int degrees, int height) {
    // Offsets are monotone in y, so the extremes sit on the first and last rows.
    return std::min(row_offset(degrees, height, 0), row_offset(degrees, height, height - 1));
}

// Sum of squared column counts of the sheared image. On a canvas of fixed bin
// count with a fixed ink total, projection variance is monotone in this sum.
std::int64_t projection_energy(const BinaryImage& img, int degrees, std::vector<std::int64_t>& bins) {
    const int lo = min_offset(degrees, img.height);
    std::fill(bins.begin(), bins.end(), 0);
    for (int y = 0; y < img.height; ++y) {
        const int off = row_offset(degrees, img.height, y) - lo;
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y)) ++bins[static_cast<std::size_t>(x + off)];
    }
    std::int64_t e = 0;
    for (auto b : bins) e += b * b;
    return e;
}

}  // namespace

ShearResult shear(const BinaryImage& img, int degrees) {
    if (img.empty()) return {img, 0};
    const int lo = min_offset(degrees, img.height);
    const int hi = std::max(row_offset(degrees, img.height, 0), row_offset(degrees, img.height, img.height - 1));
    ShearResult r{BinaryImage(img.width + hi - lo, img.height), -lo};
    for (int y = 0; y < img.height; ++y) {
        const int off = row_offset(degrees, img.height, y) - lo;
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y)) r.image.set(x + off, y);
    }
    return r;
}

int SlantCorrection::map_column(int x, int y) const {
    return x + row_offset(angle, source_height, y) + shift_base - crop_box.left;
}

int estimate_slant(const BinaryImage& img) {
    if (img.count() == 0) return 0;
    std::vector<std::int64_t> bins(static_cast<std::size_t>(img.width + 2 * img.height + 1));
    int best_angle = 0;
    std::int64_t best = projection_energy(img, 0, bins);
    for (int a = 1; a <= 45; ++a) {
        for (int angle : {-a, a}) {
            const std::int64_t e = projection_energy(img, angle, bins);
            if (e > best) {
                best = e;
                best_angle = angle;
            }
        }
    }
    return best_angle;
}

SlantCorrection correct_slant_with_transform(const BinaryImage& img) {
    SlantCorrection c;
    c.source_height = img.height;
    if (img.empty() || img.count() == 0) {
        c.image = img;
        c.crop_box = Box{0, 0, img.width - 1, img.height - 1};
        return c;
    }
    c.source_box = content_box(img);
    c.angle = estimate_slant(img);
    ShearResult s = shear(img, c.angle);
    c.shift_base = s.origin_shift;
    c.crop_box = content_box(s.image);
    c.image = crop(s.image, c.crop_box);
    return c;
}

BinaryImage correct_slant(const BinaryImage& img) { return correct_slant_with_transform(img).image; }

namespace {

// Neighbours p2..p9 clockwise from north.
std::array<int, 8> neighbours(const BinaryImage& img, int x, int y) {
    return {img.ink(x, y - 1), img.ink(x + 1, y - 1), img.ink(x + 1, y),     img.ink(x + 1, y + 1),
            img.ink(x, y + 1), img.ink(x - 1, y + 1), img.ink(x - 1, y), img.ink(x - 1, y - 1)};
}

int transitions(const std::array<int, 8>& p) {
    int a = 0;
    for (int i = 0; i < 8; ++i) a += (p[i] == 0 && p[(i + 1) % 8] == 1);
    return a;
}

int ink_count(const std::array<int, 8>& p) {
    int b = 0;
    for (int v : p) b += v;
    return b;
}

bool zhang_suen_candidate(const BinaryImage& img, int x, int y, int pass) {
    const auto p = neighbours(img, x, y);
    const int b = ink_count(p);
    if (b < 2 || b > 6 || transitions(p) != 1) return false;
    // p[0]=N p[2]=E p[4]=S p[6]=W
    if (pass == 0) return p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0;
    return p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0;
}

}  // namespace

SkeletonImage thin(const BinaryImage& img) {
    BinaryImage work = img;
    std::vector<std::pair<int, int>> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            marked.clear();
            for (int y = 0; y < work.height; ++y)
                for (int x = 0; x < work.width; ++x)
                    if (work.at(x, y) && zhang_suen_candidate(work, x, y, pass)) marked.emplace_back(x, y);
            // Parallel deletion can erase 2-pixel-thick structures outright
            // (a 2x2 block disappears). Each marked pixel is re-checked against
            // the partially updated image so a deletion never splits or removes
            // a component.
            for (auto [x, y] : marked) {
                const auto p = neighbours(work, x, y);
                const int b = ink_count(p);
                if (b >= 2 && b <= 6 && transitions(p) == 1) {
                    work.set(x, y, false);
                    changed = true;
                }
            }
        }
    }
    return SkeletonImage(std::move(work));
}

}  // namespace cursive

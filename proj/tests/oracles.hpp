#pragma once

// Reference implementations used only by tests. They favour obviously-correct
// brute force over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "cursive/image.hpp"

namespace oracle {

// 8-connected foreground components by flood fill.
inline int count_components(const cursive::BinaryImage& img) {
    std::vector<char> seen(img.pixels.size(), 0);
    int components = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
            if (!img.pixels[i] || seen[i]) continue;
            ++components;
            std::vector<std::pair<int, int>> stack{{x, y}};
            seen[i] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
                        const std::size_t j = static_cast<std::size_t>(ny) * img.width + nx;
                        if (img.pixels[j] && !seen[j]) {
                            seen[j] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
            }
        }
    return components;
}

// Exhaustive Otsu: for every t in 1..255 split the pixels by a direct scan
// (ink = value < t) and compare between-class variances as exact rationals.
// Returns the smallest maximising t, or 0 when no t splits the image.
inline int otsu_exhaustive(const cursive::GrayImage& img) {
    using i128 = __int128;
    const i128 N = static_cast<i128>(img.pixels.size());
    i128 S = 0;
    for (auto p : img.pixels) S += p;
    int best_t = 0;
    i128 best_num = 0, best_den = 1;
    for (int t = 1; t <= 255; ++t) {
        i128 n0 = 0, s0 = 0;
        for (auto p : img.pixels)
            if (p < t) {
                ++n0;
                s0 += p;
            }
        const i128 n1 = N - n0;
        if (n0 == 0 || n1 == 0) continue;
        const i128 d = s0 * N - S * n0;
        const i128 num = d * d;
        const i128 den = n0 * n1;
        // num/den > best_num/best_den
        if (best_t == 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t;
}

// Minimum total cell cost over top-to-bottom paths that move at most one
// column per row and pass through (seed_row, seed_col). Plain Dijkstra on the
// cell graph, run from the seed outwards in both directions.
inline double dijkstra_path_cost(const std::vector<std::vector<double>>& cost, int seed_row, int seed_col) {
    const int h = static_cast<int>(cost.size());
    const int w = static_cast<int>(cost[0].size());
    auto half = [&](int dir) {
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(static_cast<std::size_t>(h * w), inf);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[static_cast<std::size_t>(seed_row * w + seed_col)] = 0.0;
        pq.push({0.0, seed_row * w + seed_col});
        double best = inf;
        const int last = dir > 0 ? h - 1 : 0;
        while (!pq.empty()) {
            auto [d, node] = pq.top();
            pq.pop();
            if (d > dist[static_cast<std::size_t>(node)]) continue;
            const int r = node / w, c = node % w;
            if (r == last) best = std::min(best, d);
            const int nr = r + dir;
            if (nr < 0 || nr >= h) continue;
            for (int nc = c - 1; nc <= c + 1; ++nc) {
                if (nc < 0 || nc >= w) continue;
                const double nd = d + cost[static_cast<std::size_t>(nr)][static_cast<std::size_t>(nc)];
                const int id = nr * w + nc;
                if (nd < dist[static_cast<std::size_t>(id)]) {
                    dist[static_cast<std::size_t>(id)] = nd;
                    pq.push({nd, id});
                }
            }
        }
        return best;
    };
    return cost[static_cast<std::size_t>(seed_row)][static_cast<std::size_t>(seed_col)] + half(+1) + half(-1);
}

// True when some top-to-bottom path through the seed cell (moving at most one
// column per row) touches only background. Breadth-first over rows.
inline bool ink_free_path_exists(const cursive::BinaryImage& img, int seed_row, int seed_col) {
    if (img.at(seed_col, seed_row)) return false;
    auto reach = [&](int dir) {
        std::vector<char> cur(static_cast<std::size_t>(img.width), 0);
        cur[static_cast<std::size_t>(seed_col)] = 1;
        for (int r = seed_row + dir; r >= 0 && r < img.height; r += dir) {
            std::vector<char> next(static_cast<std::size_t>(img.width), 0);
            bool any = false;
            for (int c = 0; c < img.width; ++c) {
                if (img.at(c, r)) continue;
                for (int pc = c - 1; pc <= c + 1; ++pc)
                    if (pc >= 0 && pc < img.width && cur[static_cast<std::size_t>(pc)]) {
                        next[static_cast<std::size_t>(c)] = 1;
                        any = true;
                    }
            }
            if (!any) return false;
            cur.swap(next);
        }
        return true;
    };
    return reach(+1) && reach(-1);
}

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

// Run count along one column, written independently of the segmenter.
inline int column_runs(const cursive::BinaryImage& img, int x) {
    int runs = 0;
    for (int y = 0; y < img.height; ++y)
        if (img.at(x, y) && (y == 0 || !img.at(x, y - 1))) ++runs;
    return runs;
}

// Fit metrics in long double with the one-pass sum formulas, so they share
// neither precision nor algebra with the library's two-pass versions.
struct Metrics {
    double rmse, r, si;
};

inline Metrics metrics(const std::vector<double>& y, const std::vector<double>& x) {
    const long double n = static_cast<long double>(x.size());
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, se = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double a = x[i], b = y[i];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
        se += (b - a) * (b - a);
    }
    const long double rmse = std::sqrt(se / n);
    const long double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    return {static_cast<double>(rmse), static_cast<double>(r), static_cast<double>(rmse / (sx / n))};
}

}  // namespace oracle

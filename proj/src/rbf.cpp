#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cursive/error.hpp"
#include "cursive/neural.hpp"

namespace cursive {

namespace {

constexpr int kKmeansIterations = 50;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::size_t nearest_center(const std::vector<std::vector<double>>& centers, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_distance(centers[c], x);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Lloyd iterations from k distinct data rows picked by a seeded partial shuffle.
std::vector<std::vector<double>> kmeans(const Dataset& data, int k, Rng& rng) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::vector<double>> centers;
    for (int c = 0; c < k; ++c) {
        const std::size_t pick = static_cast<std::size_t>(c) + rng.below(idx.size() - static_cast<std::size_t>(c));
        std::swap(idx[static_cast<std::size_t>(c)], idx[pick]);
        centers.push_back(data[idx[static_cast<std::size_t>(c)]].x);
    }

    const std::size_t dim = centers.front().size();
    std::vector<std::size_t> assign(data.size(), std::numeric_limits<std::size_t>::max());
    for (int it = 0; it < kKmeansIterations; ++it) {
        bool moved = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t c = nearest_center(centers, data[i].x);
            if (c != assign[i]) {
                assign[i] = c;
                moved = true;
            }
        }
        if (!moved) break;
        std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(centers.size(), 0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            ++counts[assign[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[assign[i]][d] += data[i].x[d];
        }
        // An emptied cluster keeps its previous centre.
        for (std::size_t c = 0; c < centers.size(); ++c)
            if (counts[c] > 0)
                for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
    return centers;
}

std::vector<double> center_widths(const std::vector<std::vector<double>>& centers) {
    std::vector<double> widths(centers.size(), 1.0);
    if (centers.size() < 2) return widths;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        std::vector<double> d;
        for (std::size_t o = 0; o < centers.size(); ++o)
            if (o != c) d.push_back(std::sqrt(squared_distance(centers[c], centers[o])));
        std::sort(d.begin(), d.end());
        const std::size_t take = std::min<std::size_t>(2, d.size());
        const double w = std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take), 0.0) /
                         static_cast<double>(take);
        widths[c] = w > 0.0 ? w : 1.0;
    }
    return widths;
}

double kernel(const RbfModel& m, std::size_t c, std::span<const double> x) {
    const double s = m.widths[c];
    return std::exp(-squared_distance(m.centers[c], x) / (2.0 * s * s));
}

}  // namespace

double rbf_raw(const RbfModel& m, std::span<const double> x) {
    if (m.empty()) throw InvalidArgument("rbf: model has no centres");
    if (static_cast<int>(x.size()) != m.input_dim())
        throw InvalidArgument("rbf: input has " + std::to_string(x.size()) + " values, expected " +
                              std::to_string(m.input_dim()));
    double s = m.bias;
    for (std::size_t c = 0; c < m.centers.size(); ++c) s += m.weights[c] * kernel(m, c, x);
    return s;
}

double rbf_forward(const RbfModel& m, std::span<const double> x) { return std::clamp(rbf_raw(m, x), 0.0, 1.0); }

std::pair<RbfModel, MemberLog> rbf_train(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw InvalidArgument("rbf_train: empty training data");
    if (static_cast<std::size_t>(cfg.rbf_centers) > data.size())
        throw InvalidArgument("rbf_train: " + std::to_string(cfg.rbf_centers) + " centres requested for " +
                              std::to_string(data.size()) + " rows");
    const std::size_t dim = data.front().x.size();
    for (const auto& row : data)
        if (row.x.size() != dim) throw InvalidArgument("rbf_train: ragged feature rows");

    Rng rng(cfg.rng_seed);
    RbfModel m;
    m.centers = kmeans(data, cfg.rbf_centers, rng);
    m.widths = center_widths(m.centers);

    // Design matrix [kernels | 1]; the ridge term leaves the bias unpenalised.
    const Eigen::Index k = static_cast<Eigen::Index>(m.centers.size());
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd phi(n, k + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = data[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < k; ++c) phi(i, c) = kernel(m, static_cast<std::size_t>(c), row.x);
        phi(i, k) = 1.0;
        y(i) = row.label;
    }
    Eigen::MatrixXd normal = phi.transpose() * phi;
    for (Eigen::Index c = 0; c < k; ++c) normal(c, c) += cfg.rbf_ridge;
    const Eigen::VectorXd sol = normal.ldlt().solve(phi.transpose() * y);
    if (!sol.allFinite()) throw Error("rbf_train: singular output-layer system");
    m.weights.assign(sol.data(), sol.data() + k);
    m.bias = sol(k);

    MemberLog log;
    double s = 0.0;
    for (const auto& row : data) {
        const double e = rbf_forward(m, row.x) - row.label;
        s += e * e;
    }
    log.mse.push_back(s / static_cast<double>(data.size()));
    return {std::move(m), std::move(log)};
}

}  // namespace cursive

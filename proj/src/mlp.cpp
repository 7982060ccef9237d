#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cursive/error.hpp"
#include "cursive/neural.hpp"

namespace cursive {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must lie in [0,1)");
    if (max_epochs < 1) throw InvalidArgument("max_epochs must be >= 1");
    if (hidden < 1) throw InvalidArgument("hidden layer size must be >= 1");
    if (rbf_centers < 1) throw InvalidArgument("rbf_centers must be >= 1");
    if (rbf_ridge < 0.0) throw InvalidArgument("rbf_ridge must be >= 0");
}

double Rng::uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

std::size_t Rng::below(std::size_t n) {
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Layer make_layer(int inputs, int outputs) {
    return {inputs, outputs, std::vector<double>(static_cast<std::size_t>(inputs) * outputs, 0.0),
            std::vector<double>(static_cast<std::size_t>(outputs), 0.0)};
}

void check_dim(const MlpModel& m, std::span<const double> x) {
    if (m.empty()) throw InvalidArgument("mlp: model has no layers");
    if (static_cast<int>(x.size()) != m.input_dim())
        throw InvalidArgument("mlp: input has " + std::to_string(x.size()) + " values, expected " +
                              std::to_string(m.input_dim()));
}

// Activations of every layer, input first.
std::vector<std::vector<double>> forward_all(const MlpModel& m, std::span<const double> x) {
    std::vector<std::vector<double>> acts;
    acts.reserve(m.layers.size() + 1);
    acts.emplace_back(x.begin(), x.end());
    for (const auto& layer : m.layers) {
        const auto& in = acts.back();
        std::vector<double> out(static_cast<std::size_t>(layer.outputs));
        for (int o = 0; o < layer.outputs; ++o) {
            double z = layer.biases[static_cast<std::size_t>(o)];
            const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.inputs;
            for (int i = 0; i < layer.inputs; ++i) z += row[i] * in[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(o)] = sigmoid(z);
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

// Accumulates the loss gradient into `grad` (same shape as m).
void backprop(const MlpModel& m, std::span<const double> x, double target, MlpModel& grad) {
    const auto acts = forward_all(m, x);
    const double out = acts.back()[0];
    std::vector<double> delta{(out - target) * out * (1.0 - out)};
    for (std::size_t l = m.layers.size(); l-- > 0;) {
        const Layer& layer = m.layers[l];
        Layer& g = grad.layers[l];
        const auto& in = acts[l];
        for (int o = 0; o < layer.outputs; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            g.biases[static_cast<std::size_t>(o)] += d;
            double* grow = g.weights.data() + static_cast<std::size_t>(o) * layer.inputs;
            for (int i = 0; i < layer.inputs; ++i) grow[i] += d * in[static_cast<std::size_t>(i)];
        }
        if (l == 0) break;
        std::vector<double> prev(static_cast<std::size_t>(layer.inputs), 0.0);
        for (int i = 0; i < layer.inputs; ++i) {
            double s = 0.0;
            for (int o = 0; o < layer.outputs; ++o) s += layer.w(o, i) * delta[static_cast<std::size_t>(o)];
            const double a = in[static_cast<std::size_t>(i)];
            prev[static_cast<std::size_t>(i)] = s * a * (1.0 - a);
        }
        delta = std::move(prev);
    }
}

void zero(MlpModel& m) {
    for (auto& l : m.layers) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.biases.begin(), l.biases.end(), 0.0);
    }
}

double dataset_mse(const MlpModel& m, const Dataset& data) {
    double s = 0.0;
    for (const auto& row : data) {
        const double e = mlp_forward(m, row.x) - row.label;
        s += e * e;
    }
    return s / static_cast<double>(data.size());
}

}  // namespace

MlpModel MlpModel::zeros(int input_dim, int hidden) {
    MlpModel m;
    m.layers.push_back(make_layer(input_dim, hidden));
    m.layers.push_back(make_layer(hidden, 1));
    return m;
}

MlpModel MlpModel::random(int input_dim, int hidden, Rng& rng) {
    MlpModel m = zeros(input_dim, hidden);
    for (auto& l : m.layers) {
        for (auto& w : l.weights) w = rng.uniform(-0.5, 0.5);
        for (auto& b : l.biases) b = rng.uniform(-0.5, 0.5);
    }
    return m;
}

std::vector<int> MlpModel::layer_sizes() const {
    if (layers.empty()) return {};
    std::vector<int> sizes{layers.front().inputs};
    for (const auto& l : layers) sizes.push_back(l.outputs);
    return sizes;
}

double mlp_forward(const MlpModel& m, std::span<const double> x) {
    check_dim(m, x);
    return forward_all(m, x).back()[0];
}

double mlp_loss(const MlpModel& m, std::span<const double> x, double target) {
    const double e = mlp_forward(m, x) - target;
    return 0.5 * e * e;
}

MlpModel mlp_gradient(const MlpModel& m, std::span<const double> x, double target) {
    check_dim(m, x);
    MlpModel grad = m;
    zero(grad);
    backprop(m, x, target, grad);
    return grad;
}

std::pair<MlpModel, MemberLog> mlp_train(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw InvalidArgument("mlp_train: empty training data");
    const int dim = static_cast<int>(data.front().x.size());
    for (const auto& row : data) {
        if (static_cast<int>(row.x.size()) != dim) throw InvalidArgument("mlp_train: ragged feature rows");
        if (row.label != 0.0 && row.label != 1.0) throw InvalidArgument("mlp_train: labels must be 0 or 1");
    }

    Rng rng(cfg.rng_seed);
    MlpModel model = MlpModel::random(dim, cfg.hidden, rng);
    MlpModel velocity = model;
    zero(velocity);
    MlpModel grad = model;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    MemberLog log;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t idx : order) {
            zero(grad);
            backprop(model, data[idx].x, data[idx].label, grad);
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                auto& w = model.layers[l];
                auto& v = velocity.layers[l];
                const auto& g = grad.layers[l];
                for (std::size_t k = 0; k < w.weights.size(); ++k) {
                    v.weights[k] = cfg.momentum * v.weights[k] - cfg.learning_rate * g.weights[k];
                    w.weights[k] += v.weights[k];
                }
                for (std::size_t k = 0; k < w.biases.size(); ++k) {
                    v.biases[k] = cfg.momentum * v.biases[k] - cfg.learning_rate * g.biases[k];
                    w.biases[k] += v.biases[k];
                }
            }
        }
        log.mse.push_back(dataset_mse(model, data));
        if (log.mse.back() <= cfg.target_mse) break;
    }
    return {std::move(model), std::move(log)};
}

}  // namespace cursive

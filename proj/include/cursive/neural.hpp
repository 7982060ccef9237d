#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cursive {

// One labelled row: feature values and a 0/1 target.
struct Sample {
    std::vector<double> x;
    double label = 0.0;
};
using Dataset = std::vector<Sample>;

struct TrainConfig {
    double learning_rate = 0.1;
    double momentum = 0.9;
    int max_epochs = 2000;
    double target_mse = 0.01;
    std::uint64_t rng_seed = 1;
    int hidden = 16;
    int rbf_centers = 20;
    double rbf_ridge = 1e-6;

    void validate() const;
};

// Seeded generator whose output sequence does not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi);
    // Uniform integer in [0, n).
    std::size_t below(std::size_t n);
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Fully connected layer, weights row-major [outputs x inputs].
struct Layer {
    int inputs = 0;
    int outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    double& w(int out, int in) { return weights[static_cast<std::size_t>(out) * inputs + in]; }
    double w(int out, int in) const { return weights[static_cast<std::size_t>(out) * inputs + in]; }
};

// Sigmoid network with exactly one hidden layer and one output.
struct MlpModel {
    std::vector<Layer> layers;

    static MlpModel zeros(int input_dim, int hidden);
    // Weights and biases uniform in [-0.5, 0.5].
    static MlpModel random(int input_dim, int hidden, Rng& rng);

    int input_dim() const { return layers.empty() ? 0 : layers.front().inputs; }
    std::vector<int> layer_sizes() const;
    bool empty() const { return layers.empty(); }
};

double mlp_forward(const MlpModel& m, std::span<const double> x);

// Gradient of 0.5 * (output - target)^2 with the same shape as the model.
MlpModel mlp_gradient(const MlpModel& m, std::span<const double> x, double target);
double mlp_loss(const MlpModel& m, std::span<const double> x, double target);

struct MemberLog {
    std::vector<double> mse;  // one entry per epoch (a single entry for the RBF solve)
};

// Online backpropagation with momentum, stopping at target_mse or max_epochs.
std::pair<MlpModel, MemberLog> mlp_train(const Dataset& data, const TrainConfig& cfg);

struct RbfModel {
    std::vector<std::vector<double>> centers;
    std::vector<double> widths;
    std::vector<double> weights;
    double bias = 0.0;

    int input_dim() const { return centers.empty() ? 0 : static_cast<int>(centers.front().size()); }
    bool empty() const { return centers.empty(); }
};

// Gaussian kernel sum plus bias, clamped to [0,1].
double rbf_forward(const RbfModel& m, std::span<const double> x);
// The same sum before clamping.
double rbf_raw(const RbfModel& m, std::span<const double> x);

// Seeded k-means centres (50 iterations at most), width = mean distance to the
// two nearest other centres, output layer by ridge-regularised least squares.
std::pair<RbfModel, MemberLog> rbf_train(const Dataset& data, const TrainConfig& cfg);

enum class Verdict { valid, invalid };

struct EnsembleModel {
    MlpModel mlp;
    RbfModel rbf;
    double threshold = 0.5;

    bool trained() const { return !mlp.empty() && !rbf.empty(); }
    int input_dim() const { return mlp.input_dim(); }
};

double ensemble_predict(const EnsembleModel& e, std::span<const double> x);
// valid iff the averaged score reaches the threshold.
Verdict classify_cut(const EnsembleModel& e, std::span<const double> x);

// Root mean square error, Pearson R and scatter index. y = attained, x = target.
double rmse(std::span<const double> y, std::span<const double> x);
double corr_r(std::span<const double> y, std::span<const double> x);
double scatter_index(std::span<const double> y, std::span<const double> x);

struct FitMetrics {
    double rmse = 0.0;
    std::optional<double> r;   // undefined for constant series
    std::optional<double> si;  // undefined for zero-mean targets
};
FitMetrics fit_metrics(std::span<const double> predicted, std::span<const double> target);

struct TrainLog {
    MemberLog mlp;
    MemberLog rbf;
    struct Split {
        std::size_t rows = 0;
        FitMetrics mlp, rbf, ensemble;
    };
    Split train;
    std::optional<Split> holdout;
};

struct EnsembleTraining {
    EnsembleModel model;
    TrainLog log;
};
EnsembleTraining train_ensemble(const Dataset& train, const Dataset& holdout, const TrainConfig& cfg);

std::string model_to_json(const EnsembleModel& e);
EnsembleModel model_from_json(const std::string& text);
void save_model(const EnsembleModel& e, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace cursive

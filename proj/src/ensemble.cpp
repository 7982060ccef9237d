#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "cursive/error.hpp"
#include "cursive/image.hpp"
#include "cursive/neural.hpp"

namespace cursive {

namespace {

constexpr int kModelFormatVersion = 1;

void check_ensemble(const EnsembleModel& e, std::span<const double> x) {
    if (!e.trained()) throw InvalidArgument("ensemble: model is not trained");
    if (e.rbf.input_dim() != e.mlp.input_dim()) throw InvalidArgument("ensemble: member input dimensions differ");
    if (static_cast<int>(x.size()) != e.input_dim())
        throw InvalidArgument("ensemble: input has " + std::to_string(x.size()) + " values, expected " +
                              std::to_string(e.input_dim()));
}

void check_pair(std::span<const double> y, std::span<const double> x) {
    if (y.size() != x.size()) throw InvalidArgument("series lengths differ");
    if (y.empty()) throw InvalidArgument("series are empty");
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double a : v) s += a;
    return s / static_cast<double>(v.size());
}

}  // namespace

double ensemble_predict(const EnsembleModel& e, std::span<const double> x) {
    check_ensemble(e, x);
    return (mlp_forward(e.mlp, x) + rbf_forward(e.rbf, x)) / 2.0;
}

Verdict classify_cut(const EnsembleModel& e, std::span<const double> x) {
    return ensemble_predict(e, x) >= e.threshold ? Verdict::valid : Verdict::invalid;
}

double rmse(std::span<const double> y, std::span<const double> x) {
    check_pair(y, x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
    return std::sqrt(s / static_cast<double>(y.size()));
}

double corr_r(std::span<const double> y, std::span<const double> x) {
    check_pair(y, x);
    if (y.size() < 2) throw InvalidArgument("correlation needs at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw InvalidArgument("correlation undefined for a constant series");
    return sxy / std::sqrt(sxx * syy);
}

double scatter_index(std::span<const double> y, std::span<const double> x) {
    check_pair(y, x);
    const double mx = mean(x);
    if (mx == 0.0) throw InvalidArgument("scatter index undefined for a zero-mean target");
    return rmse(y, x) / mx;
}

FitMetrics fit_metrics(std::span<const double> predicted, std::span<const double> target) {
    FitMetrics m;
    m.rmse = rmse(predicted, target);
    try {
        m.r = corr_r(predicted, target);
    } catch (const InvalidArgument&) {
    }
    try {
        m.si = scatter_index(predicted, target);
    } catch (const InvalidArgument&) {
    }
    return m;
}

namespace {

TrainLog::Split evaluate_split(const EnsembleModel& e, const Dataset& data) {
    std::vector<double> target, pm, pr, pe;
    for (const auto& row : data) {
        target.push_back(row.label);
        pm.push_back(mlp_forward(e.mlp, row.x));
        pr.push_back(rbf_forward(e.rbf, row.x));
        pe.push_back(ensemble_predict(e, row.x));
    }
    return {data.size(), fit_metrics(pm, target), fit_metrics(pr, target), fit_metrics(pe, target)};
}

}  // namespace

EnsembleTraining train_ensemble(const Dataset& train, const Dataset& holdout, const TrainConfig& cfg) {
    EnsembleTraining t;
    auto [mlp, mlp_log] = mlp_train(train, cfg);
    TrainConfig rbf_cfg = cfg;
    rbf_cfg.rbf_centers = std::min<int>(cfg.rbf_centers, static_cast<int>(train.size()));
    auto [rbf, rbf_log] = rbf_train(train, rbf_cfg);
    t.model.mlp = std::move(mlp);
    t.model.rbf = std::move(rbf);
    t.log.mlp = std::move(mlp_log);
    t.log.rbf = std::move(rbf_log);
    t.log.train = evaluate_split(t.model, train);
    if (!holdout.empty()) t.log.holdout = evaluate_split(t.model, holdout);
    return t;
}

// Model files carry every number with 17 significant digits.
namespace {

void put_number(std::ostringstream& out, double v) {
    if (!std::isfinite(v)) throw InvalidArgument("model contains a non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

template <class Range, class Fn>
void put_array(std::ostringstream& out, const Range& items, Fn&& each) {
    out << '[';
    bool first = true;
    for (const auto& item : items) {
        if (!first) out << ',';
        first = false;
        each(item);
    }
    out << ']';
}

void put_numbers(std::ostringstream& out, const std::vector<double>& v) {
    put_array(out, v, [&](double d) { put_number(out, d); });
}

std::vector<double> numbers(const nlohmann::json& j) {
    if (!j.is_array()) throw FormatError("model: expected number array");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw FormatError("model: expected number");
        v.push_back(e.get<double>());
    }
    return v;
}

}  // namespace

std::string model_to_json(const EnsembleModel& e) {
    if (!e.trained()) throw InvalidArgument("cannot serialise an untrained model");
    std::ostringstream out;
    out << "{\n  \"format_version\": " << kModelFormatVersion << ",\n  \"mlp\": {\n    \"layer_sizes\": ";
    put_array(out, e.mlp.layer_sizes(), [&](int s) { out << s; });
    out << ",\n    \"weights\": ";
    put_array(out, e.mlp.layers, [&](const Layer& l) { put_numbers(out, l.weights); });
    out << ",\n    \"biases\": ";
    put_array(out, e.mlp.layers, [&](const Layer& l) { put_numbers(out, l.biases); });
    out << "\n  },\n  \"rbf\": {\n    \"centers\": ";
    put_array(out, e.rbf.centers, [&](const std::vector<double>& c) { put_numbers(out, c); });
    out << ",\n    \"widths\": ";
    put_numbers(out, e.rbf.widths);
    out << ",\n    \"output_weights\": ";
    put_numbers(out, e.rbf.weights);
    out << ",\n    \"bias\": ";
    put_number(out, e.rbf.bias);
    out << "\n  },\n  \"threshold\": ";
    put_number(out, e.threshold);
    out << "\n}\n";
    return out.str();
}

EnsembleModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw FormatError(std::string("model: corrupt file: ") + err.what());
    }
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion)
            throw FormatError("model: unsupported format_version");
        EnsembleModel e;
        const auto sizes = j.at("mlp").at("layer_sizes").get<std::vector<int>>();
        if (sizes.size() != 3 || sizes[2] != 1 || sizes[0] < 1 || sizes[1] < 1)
            throw FormatError("model: mlp must be [inputs, hidden, 1]");
        e.mlp = MlpModel::zeros(sizes[0], sizes[1]);
        const auto& weights = j.at("mlp").at("weights");
        const auto& biases = j.at("mlp").at("biases");
        if (weights.size() != 2 || biases.size() != 2) throw FormatError("model: mlp needs two layers");
        for (std::size_t l = 0; l < 2; ++l) {
            auto w = numbers(weights[l]);
            auto b = numbers(biases[l]);
            if (w.size() != e.mlp.layers[l].weights.size() || b.size() != e.mlp.layers[l].biases.size())
                throw FormatError("model: mlp layer size mismatch");
            e.mlp.layers[l].weights = std::move(w);
            e.mlp.layers[l].biases = std::move(b);
        }
        const auto& rbf = j.at("rbf");
        for (const auto& c : rbf.at("centers")) e.rbf.centers.push_back(numbers(c));
        e.rbf.widths = numbers(rbf.at("widths"));
        e.rbf.weights = numbers(rbf.at("output_weights"));
        e.rbf.bias = rbf.at("bias").get<double>();
        if (e.rbf.centers.empty() || e.rbf.widths.size() != e.rbf.centers.size() ||
            e.rbf.weights.size() != e.rbf.centers.size())
            throw FormatError("model: rbf arrays disagree in length");
        for (const auto& c : e.rbf.centers)
            if (static_cast<int>(c.size()) != sizes[0]) throw FormatError("model: rbf centre dimension mismatch");
        for (double w : e.rbf.widths)
            if (!(w > 0.0)) throw FormatError("model: rbf widths must be positive");
        e.threshold = j.at("threshold").get<double>();
        return e;
    } catch (const nlohmann::json::exception& err) {
        throw FormatError(std::string("model: corrupt file: ") + err.what());
    }
}

void save_model(const EnsembleModel& e, const std::filesystem::path& path) {
    const std::string text = model_to_json(e);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

EnsembleModel load_model(const std::filesystem::path& path) {
    if (path.empty()) throw IoError("empty model path");
    const auto bytes = read_file(path);
    return model_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace cursive

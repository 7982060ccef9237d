#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "cursive/neural.hpp"
#include "cursive/pipeline.hpp"

namespace cursive::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kConfigEnv = "CURSIVE_CUT_CONFIG";

// Everything a command can be tuned with. Defaults are the library defaults.
//
// JSON layout (every key optional, unknown keys rejected):
//   {"seg": {"n", "char_width", "core_fraction"},
//    "features": {"window_cols", "grid"},
//    "train": {"learning_rate", "momentum", "max_epochs", "target_mse", "seed",
//              "hidden", "rbf_centers", "rbf_ridge", "threshold"},
//    "trace": {"lambda"},
//    "eval": {"tolerance", "jobs"},
//    "synth": {"seed", "count"},
//    "serve": {"port"}}
struct CliConfig {
    PipelineOptions pipeline;
    TrainConfig train;
    double threshold = 0.5;
    int tolerance = 3;
    int jobs = 1;
    std::uint64_t synth_seed = 42;
    int synth_count = 100;
    int port = 8080;

    void validate() const;
};

// Applies the keys present in `j` on top of `base`. Throws InvalidArgument on
// unknown keys or values of the wrong type.
CliConfig config_from_json(const nlohmann::json& j, CliConfig base = {});
nlohmann::json config_to_json(const CliConfig& c);

// Entry point of the cursive_cut executable. Machine output goes to `out`,
// diagnostics to `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cursive::cli

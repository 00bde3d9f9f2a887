#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "defaultgap/default_times.hpp"
#include "defaultgap/levy_model.hpp"

namespace defaultgap {

enum class ExperimentKind {
    GapHistogram,
    DefaultProbCurve,
    ArcsineCompare,
    LadderValidation,
    ScalingConvergence,
    EstimatorRecovery,
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::GapHistogram;
    FirmValue firm;
    DebtSchedule schedule;
    std::int64_t n_paths = 10000;
    std::uint64_t seed = 0; // required in the wire format: runs are never entropy-seeded
    std::string output_dir = "defaultgap_out";
    int bridge_depth = 12;
    int pure_jump_substeps = 256;
    int threads = 1;
    double lattice_pitch = 0.1;
    nlohmann::json echo; // original JSON, reproduced in the manifest

    // Throws ConfigError on malformed/unknown fields.
    static ExperimentConfig from_json(const nlohmann::json& spec);

    SimOptions sim_options() const {
        return SimOptions{bridge_depth, pure_jump_substeps, threads};
    }
};

// Runs the experiment, writing summary.json, manifest.json and the
// experiment's CSV artifacts into output_dir. Returns 0 when every enabled
// check passes, 1 otherwise. Artifacts contain no timestamps or environment
// data, so a rerun with the same config is byte-identical.
int run_experiment(const ExperimentConfig& config);

std::vector<std::string> preset_names(); // sorted
nlohmann::json preset_config(const std::string& name);
std::string presets_text();

// Full CLI: `run --config FILE | --preset NAME [--paths N] [--seed S]
// [--out DIR] [--threads T]` and `presets`. Returns the process exit code
// (0 ok, 1 check failure, 2 config/usage error).
int run_cli(std::vector<std::string> args);

const char* version_string();

} // namespace defaultgap

#pragma once
#include <span>
#include <string>

#include <nlohmann/json.hpp>

// Experiment driver: named experiments configured by a JSON file, each
// writing one CSV table plus one JSON summary (config echo, grid provenance,
// numeric results, pass/fail checks) into an output directory. CSV bytes are
// deterministic for a fixed config; volatile fields (timestamp) live only in
// the summary.

namespace maxlab {

struct ExperimentInfo {
    std::string name;
    std::string statement; // which claim of the underlying analysis it exercises
};
std::span<const ExperimentInfo> list_experiments();

struct RunOptions {
    std::string out_dir = ".";
    int threads = 0; // 0: SCHRO_MAXLAB_THREADS env, else hardware default
};

struct RunResult {
    int exit_code = 0; // 0 ok, 2 a check failed (config errors throw ConfigError)
    std::string csv_path;
    std::string summary_path;
    bool checks_passed = true;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parses and validates the file (must be a JSON object with a known
// "experiment" and only keys that experiment accepts; unknown keys are
// errors naming the key).
nlohmann::json load_config(const std::string& path);

RunResult run_experiment(const nlohmann::json& config, const RunOptions& opt);

} // namespace maxlab

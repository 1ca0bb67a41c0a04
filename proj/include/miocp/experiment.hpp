#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "miocp/driver.hpp"
#include "miocp/models.hpp"

namespace miocp {

/* Everything a run needs, parsed from one declarative key=value config file
 * with [algorithm] / [heat2d] / [lotka_volterra] sections.  Unknown keys are
 * rejected with their line number. */
struct ExperimentConfig {
    std::string model = "heat2d";  // heat2d | lotka_volterra
    double t_final = 15.0;
    int initial_cells = 8;
    std::string rounding = "sur";  // sur | minmax
    std::vector<std::array<long, 3>> budgets;  // (from, to, max) entries for minmax
    AlgorithmConfig algorithm;
    Heat2dParams heat;
    LotkaVolterraParams lotka;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::string warm_start_csv;
};

ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/* Canonical configs of the two study problems. */
ExperimentConfig preset_config(const std::string& name);  // "heat" | "lotka"

nlohmann::json config_to_json(const ExperimentConfig& config);

struct ExperimentOutput {
    DriverResult result;
    std::filesystem::path out_dir;
    std::vector<std::string> files;
};

/* Runs the configured outer loop and writes history, best controls, both
 * trajectories with sidecars, state-norm series, and a manifest into
 * config.out_dir.  Deterministic given the config (the seed is recorded for
 * the verification suites that share the config format). */
ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace miocp

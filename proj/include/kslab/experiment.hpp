#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kslab/blowup.hpp"
#include "kslab/functionals.hpp"
#include "kslab/solver.hpp"

namespace kslab {

/// Batch experiment description parsed from a flat key = value config
/// (dotted keys, '#' comments, numbers may carry a "pi" suffix: 4pi, 0.5pi).
struct ExperimentConfig {
    enum class Kind { Single, MassSweep, InequalitySuite, VirialCheck, Hypercontractivity };

    Kind kind = Kind::Single;
    ModelParams model;
    double grid_half_width = 16.0;
    int grid_points = 256;
    InitPreset init;
    StepControl control;
    std::vector<double> sweep_masses;
    int onofri_seeds = 100;
    int log_hls_seeds = 50;
    int minimization_seeds = 20;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;

    // thresholds asserted by `check`
    double check_slope_rtol = 0.02;
    double check_mass_rtol = 1e-8;
    std::vector<std::string> expected_classes;

    /// Canonical resolved form (sorted dotted keys), byte-stable across runs.
    std::string resolved() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalAbort = 3;
constexpr int kExitCheckFailure = 4;

/// Runs the experiment, writes trajectory CSVs, summary.json and
/// config_resolved.txt under output_dir. In check mode also asserts the
/// thresholds encoded in the config and fails with kExitCheckFailure.
int run_experiment(const ExperimentConfig& config, bool check_mode);

/// Prints the pass/fail table recorded in a summary.json.
int emit_report(const std::string& summary_path, bool check_mode);

/// Trajectory CSV schema (fixed column order, version 1).
extern const char* const kTrajectoryCsvHeader;
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace kslab

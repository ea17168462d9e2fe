#pragma once

#include <string>
#include <vector>

#include "perchs/capacity.hpp"
#include "perchs/evolution.hpp"
#include "perchs/homogenization.hpp"

namespace perchs {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One experiment = one kind + the sub-configs it needs. Everything has a
// default so configs stay short; run() echoes the fully resolved version.
struct ExperimentConfig {
    std::string kind; // gen-domain | solve-linear | evolve | corrector |
                      // homogenize | converge-linear | converge-heleshaw |
                      // green | capacity | probe
    PerforationModel model;
    GridSpec grid{128, 128, 1.0 / 32.0, -2.0, -2.0};
    std::vector<double> eps_list;
    std::vector<std::uint64_t> seeds{0};
    RegionSpec d0{RegionSpec::Shape::Disc, 0.0, 0.0, 1.0, {}};
    double T = 1.0;
    double dt = 1.0 / 32.0;
    SolverConfig solver;
    std::string output_dir = "out";
    int snapshot_every = 0; // 0 = no snapshots
    int jobs = 1;
    std::string step_mode = "fixed_point"; // or "explicit"

    double rhs_value = 1.0;     // solve-linear / converge-linear load
    int cells_per_period = 32;  // corrector / homogenize resolution
    int n_periods = 1;
    double probe_r = 0.5;              // capacity / green / probe inner radius
    double r_box = 0.0;                // collar radius; 0 = box/2 - 2h
    std::vector<double> radii;         // green shells; empty = defaults
    std::vector<double> level_values;  // capacity level sets; empty = defaults

    void validate() const; // throws ConfigError naming the offending field
};

ExperimentConfig config_from_json_text(const std::string& text);
// Load a JSON config file and apply dotted --set overrides (e.g.
// "grid.nx=256", "model.kind=square_site", "eps_list=[0.25,0.125]").
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides);
std::string config_to_json(const ExperimentConfig& cfg);

// Executes the experiment and writes metrics.csv + config-echo.json (+ PGM
// snapshots) under cfg.output_dir. Deterministic for a fixed config.
void run(const ExperimentConfig& cfg);

// Per (metric_name, epsilon): mean/min/max over seeds, plus a monotone-in-eps
// verdict for convergence metrics. Returns the printed table.
std::string summarize(const std::vector<std::string>& metrics_paths);

} // namespace perchs

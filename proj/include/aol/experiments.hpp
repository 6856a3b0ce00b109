#pragma once

#include <string>
#include <vector>

#include "aol/config.hpp"

namespace aol::exp {

// Per-episode evaluation outcome shared by simulate/compare/sweep.
struct EpisodeSummary {
    int episode;
    double dt_in_ms;
    int cqi_dl;
    int cqi_ul;
    double total_lqr_cost;      // includes terminal penalty if fallen
    double total_bw_norm;       // Σ b_i/b_max over decisions
    double total_bw_hz;         // Σ b_i (raw Hz·decisions)
    int decisions;
    int steps;
    bool fallen;
    double mean_dl_aol_ms;      // step-level mean of the controller loop age

    double objective() const { return total_lqr_cost + total_bw_norm; }
};

// Runs episodes of one policy over the given dt_in values on the common
// seed grid (episode e of dt_in index d uses stream d*episodes+e); episodes
// run on a bounded worker pool, results in episode order.
std::vector<EpisodeSummary> evaluate_policy(
    const config::ScenarioConfig& cfg, const std::vector<double>& dt_in_ms,
    int episodes, const loopsim::BandwidthPolicy& policy);

void cmd_simulate(const config::ScenarioConfig& cfg,
                  const std::string& out_dir);
void cmd_learn_value(const config::ScenarioConfig& cfg,
                     const std::string& out_dir);
void cmd_train(const config::ScenarioConfig& cfg, const std::string& out_dir);
void cmd_compare(const config::ScenarioConfig& cfg,
                 const std::string& qtable_path, const std::string& out_dir);
void cmd_sweep(const config::ScenarioConfig& cfg, const std::string& out_dir);

// Building blocks reused by tests.
learning::ValueScenario value_scenario(const config::ScenarioConfig& cfg);
alloc::TrainScenario train_scenario(const config::ScenarioConfig& cfg);

struct MethodStats {
    std::string method;
    double dt_in_ms;
    int episodes;
    double mean_bw_norm, ci95_bw_norm;
    double mean_lqr_cost, ci95_lqr_cost;
    double mean_objective, ci95_objective;
    double total_bw_hz;
    int falls;
};
MethodStats summarize(const std::string& method, double dt_in_ms,
                      const std::vector<EpisodeSummary>& rows);

}  // namespace aol::exp

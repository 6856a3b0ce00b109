#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aol/learning.hpp"
#include "aol/loopsim.hpp"

namespace aol::alloc {

// Decision state: DL-AoL bin crossed with the episode CQI (20×15 = 300).
struct McState {
    int aol_bin;  // 0..n_bins-1
    int cqi;      // 1..15

    int flat(int n_cqi = channel::kCqiMax) const {
        return aol_bin * n_cqi + (cqi - 1);
    }
    static McState from_flat(int idx, int n_cqi = channel::kCqiMax) {
        return {idx / n_cqi, idx % n_cqi + 1};
    }
};

struct BandwidthMenu {
    std::vector<double> values_hz;

    void validate() const;  // non-empty, strictly increasing
    double max_hz() const { return values_hz.back(); }
    // {100, 200, ..., 1000} kHz
    static BandwidthMenu standard();
};

struct QTable {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> q;               // row-major [state][action]
    std::vector<std::uint64_t> visits;

    QTable() = default;
    QTable(int states, int actions)
        : n_states(states),
          n_actions(actions),
          q(static_cast<std::size_t>(states) * actions, 0.0),
          visits(static_cast<std::size_t>(states) * actions, 0) {}

    double& at(int s, int a) { return q[static_cast<std::size_t>(s) * n_actions + a]; }
    double at(int s, int a) const {
        return q[static_cast<std::size_t>(s) * n_actions + a];
    }
    // Cost-minimizing action; ties break toward the lowest bandwidth.
    int greedy(int s) const;
    double min_q(int s) const { return at(s, greedy(s)); }

    void save(const std::string& path, const learning::AgeBinning& binning,
              const BandwidthMenu& menu, std::uint64_t schedule_hash) const;
    struct Loaded;
    static Loaded load(const std::string& path);
};

struct QTable::Loaded {
    QTable table;
    learning::AgeBinning binning;
    BandwidthMenu menu;
    std::uint64_t schedule_hash;
};

struct TrainSchedule {
    int episodes = 20000;
    double eps0 = 1.0;
    double eps_decay = 0.995;
    double eps_floor = 0.05;
    double alpha0 = 0.3;
    double alpha_decay = 0.999;
    double alpha_floor = 0.01;
    double gamma = 0.95;
    bool sarsa = false;  // on-policy backup instead of Q-learning

    void validate() const;
    std::uint64_t hash() const;
};

// Eq.-style per-decision cost: LQR integral between decisions plus the
// normalized bandwidth b/b_max.
double stage_cost(double lqr_cost_between_decisions, double chosen_hz,
                  const BandwidthMenu& menu);

// ε-greedy over the menu; returns the action index.
int select_action(const QTable& q, int state, double eps, Rng& rng);

// One Q-learning backup; min over next actions (omitted when terminal).
// Returns the TD error.
double q_update(QTable& q, int s, int a, double cost, int s_next, double alpha,
                double gamma, bool terminal = false);
// On-policy variant: bootstraps on the action actually taken next.
double sarsa_update(QTable& q, int s, int a, double cost, int s_next,
                    int a_next, double alpha, double gamma,
                    bool terminal = false);

struct TrainScenario {
    loopsim::LoopConfig loop;
    plant::PlantParams plant;
    lqr::LqrSolution lqr_solution;
    lqr::CostWeights weights;
    channel::CqiTable table;
    learning::AgeBinning binning;
    std::vector<double> dt_in_sweep_s;
    bool shared_cqi = false;
};

struct TrainLogRow {
    int episode;
    double eps;
    double alpha;
    double total_lqr_cost;
    double total_bw_norm;  // Σ b_i/b_N over the episode's decisions
    int decisions;
    bool fallen;
};

struct TrainResult {
    QTable q;
    std::vector<TrainLogRow> log;
};

TrainResult train(const TrainScenario& scenario, const BandwidthMenu& menu,
                  const TrainSchedule& schedule, std::uint64_t seed);

// Industry baseline: minimum menu bandwidth meeting a fixed deadline at the
// episode CQI.
loopsim::BandwidthPolicy fixed_deadline_policy(double deadline_s,
                                               double payload_bits,
                                               const BandwidthMenu& menu,
                                               const channel::CqiTable& table);
loopsim::BandwidthPolicy fixed_bandwidth_policy(double bandwidth_hz);
// Greedy policy over a frozen table.
loopsim::BandwidthPolicy greedy_policy(const QTable& q,
                                       const learning::AgeBinning& binning,
                                       const BandwidthMenu& menu);

}  // namespace aol::alloc

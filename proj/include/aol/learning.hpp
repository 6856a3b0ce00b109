#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aol/loopsim.hpp"

namespace aol::learning {

struct AgeBinning {
    double bin_width_s = 0.005;
    int n_bins = 20;

    // floor(age / width), clamped to the last bin.
    int bin(double age_s) const;
    void validate() const;
};

struct ValueTable {
    std::vector<double> v;
    std::vector<std::uint64_t> visits;

    explicit ValueTable(int n_bins = 0)
        : v(n_bins, 0.0), visits(n_bins, 0) {}
};

// Which age component of the loop clocks feeds the state binning.
enum class StateAbstraction { DlAol, UlAol, DlAoi, UlAoi };

const char* abstraction_name(StateAbstraction a);
double age_component(const loopsim::AgeClocks& ages, StateAbstraction a);

// One TD(0) backup: δ = stage_cost + γ·V(s_next) − V(s); V(s) += α·δ.
// Returns δ.
double td_update(ValueTable& table, int s, int s_next, double stage_cost,
                 double alpha, double gamma);

// Everything a value-learning run needs besides the abstraction choice.
struct ValueScenario {
    loopsim::LoopConfig loop;             // dt_in overridden by the sweep
    plant::PlantParams plant;
    lqr::LqrSolution lqr_solution;
    lqr::CostWeights weights;
    channel::CqiTable table;
    std::vector<double> dt_in_sweep_s;    // cycled across episodes
    std::vector<double> fixed_bandwidths_hz;  // cycled across episodes
    bool shared_cqi = false;              // UL CQI = DL CQI when true
    std::uint64_t seed = 1;
};

struct ValueLearnConfig {
    AgeBinning binning;
    double gamma = 0.99;
    double alpha0 = 0.5;
    double alpha_kappa = 0.01;  // α(s) = α0 / (1 + visits(s)·κ)
    int episodes = 2000;
};

struct ValueLearnResult {
    StateAbstraction abstraction;
    ValueTable table;
    std::vector<double> mean_abs_td_error;  // one entry per episode
};

// Runs the scenario once and scores every requested abstraction on the same
// traces (the fixed policy makes the traces independent of the tables), so
// abstraction comparisons see identical data.
std::vector<ValueLearnResult> learn_value_curves(
    const ValueScenario& scenario, const ValueLearnConfig& cfg,
    const std::vector<StateAbstraction>& abstractions);

ValueLearnResult learn_value_curve(const ValueScenario& scenario,
                                   const ValueLearnConfig& cfg,
                                   StateAbstraction abstraction);

}  // namespace aol::learning

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aol/allocator.hpp"
#include "aol/learning.hpp"

namespace aol::config {

// Full experiment scenario. Loaded from a JSON file; unknown keys are
// rejected and every nested invariant is validated at load time.
struct ScenarioConfig {
    plant::PlantParams plant;
    lqr::CostWeights weights;

    struct Loop {
        std::vector<double> dt_in_sweep_ms = {1, 5, 10, 15, 20};
        double dt_out_ms = 1.0;
        double payload_bits = 1024.0;
        double ul_bandwidth_khz = 7000.0;
        double horizon_s = 4.0;
        double theta_limit = 0.21;
        double x_limit = 2.4;
        double terminal_penalty = 100.0;
        bool zero_latency = false;
    } loop;

    struct Channel {
        std::string table_path;  // empty = builtin table
        bool shared_cqi = false;
    } channel;

    std::vector<double> menu_khz = {100, 200, 300, 400, 500,
                                    600, 700, 800, 900, 1000};

    learning::AgeBinning binning{0.005, 20};

    struct ValueLearning {
        int episodes = 3000;
        double gamma = 0.99;
        double alpha0 = 0.5;
        double alpha_kappa = 0.01;
        std::vector<double> fixed_bandwidths_khz = {100, 200, 400, 700, 1000};
    } value_learning;

    alloc::TrainSchedule training;

    struct Evaluation {
        int episodes = 300;
        std::vector<double> deadlines_ms = {1, 5, 10};
    } evaluation;

    struct Simulate {
        int episodes = 10;
        std::string policy = "fixed_deadline";  // or fixed_bandwidth
        double fixed_deadline_ms = 10.0;
        double fixed_bandwidth_khz = 500.0;
        double dt_in_ms = 5.0;
    } simulate;

    std::uint64_t seed = 1;
    std::string out_dir = "out";

    static ScenarioConfig defaults() { return {}; }
    static ScenarioConfig load(const std::string& path);
    // Dotted-path overrides, e.g. "loop.horizon_s=2.5" or
    // "loop.dt_in_sweep_ms=[1,5]".
    void apply_override(const std::string& key_value);
    void validate() const;

    // Canonical JSON dump (sorted keys); also the hashing input.
    std::string dump() const;
    std::uint64_t hash() const;

    // Derived pieces.
    loopsim::LoopConfig loop_config(double dt_in_ms) const;
    alloc::BandwidthMenu menu() const;
    channel::CqiTable cqi_table() const;
    std::vector<double> dt_in_sweep_s() const;
};

// Run manifest written next to every output directory.
void write_manifest(const ScenarioConfig& cfg, const std::string& out_dir,
                    const std::vector<std::uint64_t>& seeds,
                    const std::string& command);

}  // namespace aol::config

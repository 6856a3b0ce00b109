#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "aol/channel.hpp"
#include "aol/lqr.hpp"
#include "aol/plant.hpp"
#include "aol/rng.hpp"

namespace aol::loopsim {

// Sensor sample with piggybacked timestamps: t_sample is its own generation
// time, t_command the generation time of the command in effect at the plant
// when the sample was taken.
struct TimedSample {
    plant::StateVector state;
    double t_sample;
    double t_command;
};

// Control command carrying its generation time and the generation time of
// the sample that spawned it.
struct TimedCommand {
    double force;
    double t_command;
    double t_sample;
};

// Sawtooth age clocks. dl_aol/ul_aoi are measured at the controller
// (anchored on the freshest received sample), ul_aol/dl_aoi at the plant
// (anchored on the freshest received command).
struct AgeClocks {
    double dl_aol;
    double ul_aol;
    double dl_aoi;
    double ul_aoi;
};

// Freshest-reception timestamps at both endpoints; ages are a pure function
// of these and the current time.
struct LoopAnchors {
    double ctrl_sample_t = 0.0;   // t_i of freshest sample at the controller
    double ctrl_command_t = 0.0;  // t̂_j carried by that sample
    double plant_command_t = 0.0; // t̂_j of freshest command at the plant
    double plant_sample_t = 0.0;  // t_i carried by that command
};

AgeClocks ages_at(const LoopAnchors& anchors, double now);

struct LoopConfig {
    double dt_in = 0.005;          // sensing/UL period, s
    double dt_out = 0.001;         // actuation period, s
    double payload_bits = 1024.0;
    double ul_bandwidth_hz = 7.0e6;
    double horizon_s = 5.0;
    double theta_limit = 0.21;     // rad; episode fails beyond this
    double x_limit = 2.4;          // m
    double terminal_penalty = 100.0;
    bool zero_latency = false;     // force all transmission latencies to 0
    bool record_receptions = false;

    void validate(int worst_cqi_ul, const channel::CqiTable& table) const;
    // dt_in as an exact multiple of dt_out (validated).
    int ticks_per_sample() const;
};

enum class Termination { HorizonReached, Fallen, Fault };

// One actuation step: state, applied command, and ages observed at time t
// (before integrating the step), plus the step's cost contribution.
struct StepRecord {
    double t;
    plant::StateVector state;
    double u;
    AgeClocks ages;
    double stage_cost;
};

// One DL bandwidth decision.
struct DecisionRecord {
    double t;
    double dl_aol;       // DL-AoL observed at the controller at decision time
    int cqi;
    double bandwidth_hz;
    double stage_cost;   // LQR cost accumulated until the next decision
    AgeClocks ages{};    // full clock snapshot at decision time
};

struct ReceptionRecord {
    enum class Kind { UlDelivery, DlDelivery } kind;
    double t;
    double t_sample;
    double t_command;
};

struct EpisodeTrace {
    std::vector<StepRecord> steps;
    std::vector<DecisionRecord> decisions;
    std::vector<ReceptionRecord> receptions;  // only if record_receptions
    Termination termination = Termination::HorizonReached;
    double total_lqr_cost = 0.0;      // excludes the terminal penalty
    double terminal_penalty = 0.0;    // applied on a fall
    int cqi_dl = 0;
    int cqi_ul = 0;
};

// Bandwidth chosen at each DL transmission start, given the DL-AoL observed
// at the controller and the episode's DL CQI.
using BandwidthPolicy = std::function<double(double dl_aol_s, int cqi)>;

struct LoopObservers {
    std::function<void(const StepRecord&)> on_step;
    std::function<void(const DecisionRecord&)> on_decision;
};

EpisodeTrace run_episode(const LoopConfig& cfg, const plant::PlantParams& pp,
                         const lqr::LqrSolution& sol,
                         const lqr::CostWeights& weights, int cqi_dl,
                         int cqi_ul, const channel::CqiTable& table,
                         const BandwidthPolicy& policy, Rng& rng,
                         const LoopObservers* observers = nullptr);

}  // namespace aol::loopsim

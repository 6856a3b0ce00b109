#include "aol/loopsim.hpp"

#include <cmath>
#include <queue>
#include <sstream>

#include "aol/errors.hpp"

namespace aol::loopsim {
namespace {

// Tie order at equal timestamps: deliveries (and the controller reactions
// they trigger) first, then sensing, then actuation; remaining ties break by
// insertion order.
enum Phase : int { kDelivery = 0, kSensing = 2, kActuation = 3 };

struct Event {
    double t;
    int phase;
    std::uint64_t seq;
    enum class Kind { UlDelivery, DlDelivery, Sensing, Actuation } kind;
    std::int64_t tick = 0;   // periodic events
    TimedSample sample{};    // UlDelivery payload
    TimedCommand command{};  // DlDelivery payload
};

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.phase != b.phase) return a.phase > b.phase;
        return a.seq > b.seq;
    }
};

}  // namespace

AgeClocks ages_at(const LoopAnchors& anchors, double now) {
    return {now - anchors.ctrl_command_t, now - anchors.plant_sample_t,
            now - anchors.plant_command_t, now - anchors.ctrl_sample_t};
}

void LoopConfig::validate(int worst_cqi_ul,
                          const channel::CqiTable& table) const {
    if (!(dt_out > 0.0)) throw ConfigError("loop: dt_out must be > 0");
    if (!(dt_in >= dt_out)) throw ConfigError("loop: dt_in must be >= dt_out");
    if (!(horizon_s > 0.0)) throw ConfigError("loop: horizon must be > 0");
    if (!(payload_bits > 0.0)) throw ConfigError("loop: payload must be > 0");
    if (!(ul_bandwidth_hz > 0.0))
        throw ConfigError("loop: ul_bandwidth must be > 0");
    ticks_per_sample();  // multiple check
    if (!zero_latency) {
        const double worst = channel::latency_s(
            {payload_bits, ul_bandwidth_hz, worst_cqi_ul}, table);
        if (worst > dt_in) {
            std::ostringstream msg;
            msg << "loop: UL latency at CQI " << worst_cqi_ul << " ("
                << worst * 1e3 << " ms) exceeds dt_in (" << dt_in * 1e3
                << " ms); raise ul_bandwidth or dt_in";
            throw ConfigError(msg.str());
        }
    }
}

int LoopConfig::ticks_per_sample() const {
    const double ratio = dt_in / dt_out;
    const int m = static_cast<int>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-9)
        throw ConfigError("loop: dt_in must be an integer multiple of dt_out");
    return m;
}

EpisodeTrace run_episode(const LoopConfig& cfg, const plant::PlantParams& pp,
                         const lqr::LqrSolution& sol,
                         const lqr::CostWeights& weights, int cqi_dl,
                         int cqi_ul, const channel::CqiTable& table,
                         const BandwidthPolicy& policy, Rng& rng,
                         const LoopObservers* observers) {
    pp.validate();
    // Episode startup check against the episode's own UL channel quality;
    // scenario-level validation additionally enforces the CQI-1 worst case.
    cfg.validate(cqi_ul, table);

    const int ticks_per_sample = cfg.ticks_per_sample();
    const std::int64_t total_ticks =
        std::llround(cfg.horizon_s / cfg.dt_out);

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue;
    std::uint64_t seq = 0;
    const auto push = [&](Event e) {
        e.seq = seq++;
        queue.push(e);
    };

    EpisodeTrace trace;
    trace.cqi_dl = cqi_dl;
    trace.cqi_ul = cqi_ul;

    plant::StateVector state = plant::sample_initial_state(pp, rng);
    LoopAnchors anchors;  // ages anchor at episode start until loop closure

    // Controller memory.
    bool have_sample = false;
    TimedSample latest_sample{};
    double last_served_sample_t = -1.0;  // t_i of last sample turned into a command
    bool dl_busy = false;

    // Plant memory: u = 0 applies until the first command arrives.
    TimedCommand applied{0.0, 0.0, 0.0};

    const auto finalize_last_decision = [&] {
        if (!trace.decisions.empty() && observers && observers->on_decision)
            observers->on_decision(trace.decisions.back());
    };

    const auto send_command = [&](double now) {
        finalize_last_decision();
        const AgeClocks ages = ages_at(anchors, now);
        const double bw = policy(ages.dl_aol, cqi_dl);
        trace.decisions.push_back({now, ages.dl_aol, cqi_dl, bw, 0.0, ages});

        TimedCommand cmd{lqr::control(latest_sample.state, sol), now,
                         latest_sample.t_sample};
        const double lat =
            cfg.zero_latency
                ? 0.0
                : channel::latency_s({cfg.payload_bits, bw, cqi_dl}, table);
        last_served_sample_t = latest_sample.t_sample;
        dl_busy = true;
        push({now + lat, kDelivery, 0, Event::Kind::DlDelivery, 0, {}, cmd});
    };

    push({0.0, kSensing, 0, Event::Kind::Sensing, 0});
    push({0.0, kActuation, 0, Event::Kind::Actuation, 0});

    bool done = false;
    while (!queue.empty() && !done) {
        const Event ev = queue.top();
        queue.pop();
        if (ev.t >= cfg.horizon_s) continue;
        const double now = ev.t;

        switch (ev.kind) {
            case Event::Kind::Sensing: {
                // Snapshot carries the generation time of the command
                // currently stored at the plant (t0 before any delivery).
                TimedSample s{state, now, anchors.plant_command_t};
                const double lat =
                    cfg.zero_latency
                        ? 0.0
                        : channel::latency_s(
                              {cfg.payload_bits, cfg.ul_bandwidth_hz, cqi_ul},
                              table);
                push({now + lat, kDelivery, 0, Event::Kind::UlDelivery, 0, s});
                const std::int64_t next = ev.tick + ticks_per_sample;
                if (next < total_ticks)
                    push({static_cast<double>(next) * cfg.dt_out, kSensing, 0,
                          Event::Kind::Sensing, next});
                break;
            }
            case Event::Kind::UlDelivery: {
                latest_sample = ev.sample;
                have_sample = true;
                anchors.ctrl_sample_t = ev.sample.t_sample;
                anchors.ctrl_command_t = ev.sample.t_command;
                if (cfg.record_receptions)
                    trace.receptions.push_back(
                        {ReceptionRecord::Kind::UlDelivery, now,
                         ev.sample.t_sample, ev.sample.t_command});
                if (!dl_busy) send_command(now);
                break;
            }
            case Event::Kind::DlDelivery: {
                applied = ev.command;
                anchors.plant_command_t = ev.command.t_command;
                anchors.plant_sample_t = ev.command.t_sample;
                dl_busy = false;
                if (cfg.record_receptions)
                    trace.receptions.push_back(
                        {ReceptionRecord::Kind::DlDelivery, now,
                         ev.command.t_sample, ev.command.t_command});
                // Fire immediately if a strictly fresher sample is waiting;
                // an empty or already-served memory waits for the next UL.
                if (have_sample && latest_sample.t_sample > last_served_sample_t)
                    send_command(now);
                break;
            }
            case Event::Kind::Actuation: {
                const double u = applied.force;
                const Eigen::Vector4d x = state.vec();
                const double stage =
                    (x.dot(weights.Q * x) + u * weights.R * u) * cfg.dt_out;
                StepRecord rec{now, state, u, ages_at(anchors, now), stage};
                trace.steps.push_back(rec);
                trace.total_lqr_cost += stage;
                if (!trace.decisions.empty())
                    trace.decisions.back().stage_cost += stage;
                if (observers && observers->on_step) observers->on_step(rec);

                const double w = pp.noise_sigma * rng.normal();
                try {
                    state = plant::step(state, u, cfg.dt_out, w, pp);
                } catch (const SimulationFault&) {
                    trace.termination = Termination::Fault;
                    trace.terminal_penalty = cfg.terminal_penalty;
                    done = true;
                    break;
                }
                if (std::abs(state.theta) > cfg.theta_limit ||
                    std::abs(state.x) > cfg.x_limit) {
                    trace.termination = Termination::Fallen;
                    trace.terminal_penalty = cfg.terminal_penalty;
                    done = true;
                    break;
                }
                const std::int64_t next = ev.tick + 1;
                if (next < total_ticks)
                    push({static_cast<double>(next) * cfg.dt_out, kActuation,
                          0, Event::Kind::Actuation, next});
                break;
            }
        }
    }

    finalize_last_decision();
    return trace;
}

}  // namespace aol::loopsim

#include "aol/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aol/errors.hpp"

namespace aol::alloc {

void BandwidthMenu::validate() const {
    if (values_hz.empty()) throw ConfigError("menu: must be non-empty");
    for (std::size_t i = 0; i < values_hz.size(); ++i) {
        if (!(values_hz[i] > 0.0))
            throw ConfigError("menu: bandwidths must be > 0");
        if (i > 0 && !(values_hz[i] > values_hz[i - 1]))
            throw ConfigError("menu: bandwidths must be strictly increasing");
    }
}

BandwidthMenu BandwidthMenu::standard() {
    BandwidthMenu m;
    for (int k = 1; k <= 10; ++k) m.values_hz.push_back(k * 100.0e3);
    return m;
}

int QTable::greedy(int s) const {
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
        if (at(s, a) < at(s, best)) best = a;
    return best;
}

void TrainSchedule::validate() const {
    if (episodes < 1) throw ConfigError("schedule: episodes must be >= 1");
    if (!(eps0 > 0.0 && eps0 <= 1.0))
        throw ConfigError("schedule: eps0 must be in (0, 1]");
    if (!(eps_decay > 0.0) || !(alpha_decay > 0.0))
        throw ConfigError("schedule: decays must be > 0");
    if (eps_floor < 0.0 || alpha_floor < 0.0)
        throw ConfigError("schedule: floors must be >= 0");
    if (!(alpha0 > 0.0 && alpha0 <= 1.0))
        throw ConfigError("schedule: alpha0 must be in (0, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ConfigError("schedule: gamma must be in (0, 1]");
}

std::uint64_t TrainSchedule::hash() const {
    // FNV-1a over the field bytes, enough to fingerprint a table's origin.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    mix(static_cast<double>(episodes));
    mix(eps0);
    mix(eps_decay);
    mix(eps_floor);
    mix(alpha0);
    mix(alpha_decay);
    mix(alpha_floor);
    mix(gamma);
    mix(sarsa ? 1.0 : 0.0);
    return h;
}

double stage_cost(double lqr_cost_between_decisions, double chosen_hz,
                  const BandwidthMenu& menu) {
    return lqr_cost_between_decisions + chosen_hz / menu.max_hz();
}

int select_action(const QTable& q, int state, double eps, Rng& rng) {
    if (eps > 0.0 && rng.uniform() < eps)
        return static_cast<int>(rng.uniform_int(q.n_actions));
    return q.greedy(state);
}

double q_update(QTable& q, int s, int a, double cost, int s_next, double alpha,
                double gamma, bool terminal) {
    const double bootstrap = terminal ? 0.0 : gamma * q.min_q(s_next);
    const double delta = cost + bootstrap - q.at(s, a);
    q.at(s, a) += alpha * delta;
    q.visits[static_cast<std::size_t>(s) * q.n_actions + a] += 1;
    return delta;
}

double sarsa_update(QTable& q, int s, int a, double cost, int s_next,
                    int a_next, double alpha, double gamma, bool terminal) {
    const double bootstrap = terminal ? 0.0 : gamma * q.at(s_next, a_next);
    const double delta = cost + bootstrap - q.at(s, a);
    q.at(s, a) += alpha * delta;
    q.visits[static_cast<std::size_t>(s) * q.n_actions + a] += 1;
    return delta;
}

TrainResult train(const TrainScenario& scenario, const BandwidthMenu& menu,
                  const TrainSchedule& schedule, std::uint64_t seed) {
    menu.validate();
    schedule.validate();
    scenario.binning.validate();

    const int n_states = scenario.binning.n_bins * channel::kCqiMax;
    TrainResult result;
    result.q = QTable(n_states, static_cast<int>(menu.values_hz.size()));
    QTable& q = result.q;

    const std::size_t n_dt = scenario.dt_in_sweep_s.empty()
                                 ? 1
                                 : scenario.dt_in_sweep_s.size();

    for (int ep = 0; ep < schedule.episodes; ++ep) {
        const double eps = std::max(
            schedule.eps_floor, schedule.eps0 * std::pow(schedule.eps_decay, ep));
        const double alpha =
            std::max(schedule.alpha_floor,
                     schedule.alpha0 * std::pow(schedule.alpha_decay, ep));

        loopsim::LoopConfig loop = scenario.loop;
        if (!scenario.dt_in_sweep_s.empty())
            loop.dt_in = scenario.dt_in_sweep_s[ep % n_dt];

        Rng rng = Rng::for_episode(seed, ep);
        const int cqi_dl = channel::sample_cqi(rng);
        const int cqi_ul =
            scenario.shared_cqi ? cqi_dl : channel::sample_cqi(rng);

        // The policy records its own (state, action) pairs; rng is shared
        // with the simulation, which keeps the run a single deterministic
        // stream.
        std::vector<int> states, actions;
        const auto policy = [&](double dl_aol, int cqi) -> double {
            const int s = McState{scenario.binning.bin(dl_aol), cqi}.flat();
            const int a = select_action(q, s, eps, rng);
            states.push_back(s);
            actions.push_back(a);
            return menu.values_hz[a];
        };

        const loopsim::EpisodeTrace trace = loopsim::run_episode(
            loop, scenario.plant, scenario.lqr_solution, scenario.weights,
            cqi_dl, cqi_ul, scenario.table, policy, rng);

        const bool fallen =
            trace.termination != loopsim::Termination::HorizonReached;
        const std::size_t n_dec = trace.decisions.size();
        double total_bw_norm = 0.0;
        for (std::size_t k = 0; k < n_dec; ++k) {
            const double c = stage_cost(trace.decisions[k].stage_cost,
                                        trace.decisions[k].bandwidth_hz, menu);
            total_bw_norm += trace.decisions[k].bandwidth_hz / menu.max_hz();
            if (k + 1 < n_dec) {
                if (schedule.sarsa)
                    sarsa_update(q, states[k], actions[k], c, states[k + 1],
                                 actions[k + 1], alpha, schedule.gamma);
                else
                    q_update(q, states[k], actions[k], c, states[k + 1], alpha,
                             schedule.gamma);
            } else if (fallen) {
                // Fall: terminal target, no bootstrap, penalty added.
                q_update(q, states[k], actions[k], c + trace.terminal_penalty,
                         0, alpha, schedule.gamma, /*terminal=*/true);
            }
            // Horizon-truncated final decision: incomplete target, skipped.
        }

        result.log.push_back({ep, eps, alpha, trace.total_lqr_cost,
                              total_bw_norm, static_cast<int>(n_dec), fallen});
    }
    return result;
}

loopsim::BandwidthPolicy fixed_deadline_policy(double deadline_s,
                                               double payload_bits,
                                               const BandwidthMenu& menu,
                                               const channel::CqiTable& table) {
    if (!(deadline_s > 0.0))
        throw ConfigError("baseline: deadline must be > 0");
    return [deadline_s, payload_bits, menu, table](double, int cqi) {
        return channel::min_bandwidth_for_deadline(payload_bits, cqi,
                                                   deadline_s, menu.values_hz,
                                                   table);
    };
}

loopsim::BandwidthPolicy fixed_bandwidth_policy(double bandwidth_hz) {
    return [bandwidth_hz](double, int) { return bandwidth_hz; };
}

loopsim::BandwidthPolicy greedy_policy(const QTable& q,
                                       const learning::AgeBinning& binning,
                                       const BandwidthMenu& menu) {
    return [&q, binning, menu](double dl_aol, int cqi) {
        const int s = McState{binning.bin(dl_aol), cqi}.flat();
        return menu.values_hz[q.greedy(s)];
    };
}

void QTable::save(const std::string& path, const learning::AgeBinning& binning,
                  const BandwidthMenu& menu,
                  std::uint64_t schedule_hash) const {
    std::ofstream out(path);
    if (!out) throw IoError("qtable: cannot open for writing: " + path);
    out << "aol-qtable v1\n";
    out << "binning " << binning.n_bins << " " << binning.bin_width_s << "\n";
    out << "menu " << menu.values_hz.size();
    for (double b : menu.values_hz) out << " " << b;
    out << "\n";
    out << "schedule_hash " << schedule_hash << "\n";
    out << "table " << n_states << " " << n_actions << "\n";
    out.precision(17);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a)
            out << (a ? " " : "") << at(s, a);
        out << "\n";
    }
    out << "visits\n";
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a)
            out << (a ? " " : "")
                << visits[static_cast<std::size_t>(s) * n_actions + a];
        out << "\n";
    }
    if (!out) throw IoError("qtable: write failed: " + path);
}

QTable::Loaded QTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("qtable: cannot open: " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "aol-qtable" || version != "v1")
        throw IoError("qtable: unrecognized file format: " + path);
    Loaded out;
    std::string key;
    in >> key >> out.binning.n_bins >> out.binning.bin_width_s;
    if (key != "binning") throw IoError("qtable: expected binning header");
    std::size_t n_menu;
    in >> key >> n_menu;
    if (key != "menu") throw IoError("qtable: expected menu header");
    out.menu.values_hz.resize(n_menu);
    for (double& b : out.menu.values_hz) in >> b;
    in >> key >> out.schedule_hash;
    if (key != "schedule_hash")
        throw IoError("qtable: expected schedule_hash header");
    int ns, na;
    in >> key >> ns >> na;
    if (key != "table") throw IoError("qtable: expected table header");
    out.table = QTable(ns, na);
    for (double& v : out.table.q) in >> v;
    in >> key;
    if (key != "visits") throw IoError("qtable: expected visits section");
    for (std::uint64_t& v : out.table.visits) in >> v;
    if (!in) throw IoError("qtable: truncated file: " + path);
    return out;
}

}  // namespace aol::alloc

#include "aol/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "aol/csv.hpp"
#include "aol/svg.hpp"

namespace aol::exp {
namespace {

namespace fs = std::filesystem;

struct Prepared {
    plant::PlantParams plant;
    lqr::CostWeights weights;
    lqr::LqrSolution sol;
    channel::CqiTable table;
};

Prepared prepare(const config::ScenarioConfig& cfg) {
    Prepared p{cfg.plant, cfg.weights,
               lqr::solve_care(plant::linearize(cfg.plant), cfg.weights),
               cfg.cqi_table()};
    return p;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

// Bounded worker pool over an index range; results land in index order.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned workers = std::min<unsigned>(hw ? hw : 2, 16);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

EpisodeSummary summarize_trace(int episode, double dt_in_ms,
                               const loopsim::EpisodeTrace& trace,
                               double menu_max_hz) {
    EpisodeSummary s{};
    s.episode = episode;
    s.dt_in_ms = dt_in_ms;
    s.cqi_dl = trace.cqi_dl;
    s.cqi_ul = trace.cqi_ul;
    s.total_lqr_cost = trace.total_lqr_cost + trace.terminal_penalty;
    for (const auto& d : trace.decisions) {
        s.total_bw_norm += d.bandwidth_hz / menu_max_hz;
        s.total_bw_hz += d.bandwidth_hz;
    }
    s.decisions = static_cast<int>(trace.decisions.size());
    s.steps = static_cast<int>(trace.steps.size());
    s.fallen = trace.termination != loopsim::Termination::HorizonReached;
    double age_sum = 0.0;
    for (const auto& st : trace.steps) age_sum += st.ages.dl_aol;
    s.mean_dl_aol_ms =
        trace.steps.empty()
            ? 0.0
            : age_sum / static_cast<double>(trace.steps.size()) * 1e3;
    return s;
}

const char* termination_name(loopsim::Termination t) {
    switch (t) {
        case loopsim::Termination::HorizonReached: return "horizon";
        case loopsim::Termination::Fallen: return "fallen";
        case loopsim::Termination::Fault: return "fault";
    }
    return "?";
}

std::string ep_name(const char* stem, int idx, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d_%s.csv", stem, idx, suffix);
    return buf;
}

loopsim::BandwidthPolicy simulate_policy(const config::ScenarioConfig& cfg,
                                         const Prepared& prep) {
    if (cfg.simulate.policy == "fixed_bandwidth")
        return alloc::fixed_bandwidth_policy(cfg.simulate.fixed_bandwidth_khz *
                                             1e3);
    return alloc::fixed_deadline_policy(cfg.simulate.fixed_deadline_ms * 1e-3,
                                        cfg.loop.payload_bits, cfg.menu(),
                                        prep.table);
}

}  // namespace

std::vector<EpisodeSummary> evaluate_policy(
    const config::ScenarioConfig& cfg, const std::vector<double>& dt_in_ms,
    int episodes, const loopsim::BandwidthPolicy& policy) {
    const Prepared prep = prepare(cfg);
    const double menu_max = cfg.menu().max_hz();
    const int total = static_cast<int>(dt_in_ms.size()) * episodes;
    std::vector<EpisodeSummary> out(total);

    parallel_for(total, [&](int i) {
        const int d = i / episodes;
        const int ep = i % episodes;
        Rng rng = Rng::for_episode(cfg.seed,
                                   static_cast<std::uint64_t>(d) * episodes + ep);
        const int cqi_dl = channel::sample_cqi(rng);
        const int cqi_ul =
            cfg.channel.shared_cqi ? cqi_dl : channel::sample_cqi(rng);
        const loopsim::EpisodeTrace trace = loopsim::run_episode(
            cfg.loop_config(dt_in_ms[d]), prep.plant, prep.sol, prep.weights,
            cqi_dl, cqi_ul, prep.table, policy, rng);
        out[i] = summarize_trace(ep, dt_in_ms[d], trace, menu_max);
    });
    return out;
}

MethodStats summarize(const std::string& method, double dt_in_ms,
                      const std::vector<EpisodeSummary>& rows) {
    MethodStats st{};
    st.method = method;
    st.dt_in_ms = dt_in_ms;
    st.episodes = static_cast<int>(rows.size());
    const auto mean_ci = [&](auto getter, double& mean, double& ci) {
        double sum = 0.0;
        for (const auto& r : rows) sum += getter(r);
        mean = sum / rows.size();
        double var = 0.0;
        for (const auto& r : rows) {
            const double d = getter(r) - mean;
            var += d * d;
        }
        var = rows.size() > 1 ? var / (rows.size() - 1) : 0.0;
        ci = 1.96 * std::sqrt(var / rows.size());
    };
    mean_ci([](const EpisodeSummary& r) { return r.total_bw_norm; },
            st.mean_bw_norm, st.ci95_bw_norm);
    mean_ci([](const EpisodeSummary& r) { return r.total_lqr_cost; },
            st.mean_lqr_cost, st.ci95_lqr_cost);
    mean_ci([](const EpisodeSummary& r) { return r.objective(); },
            st.mean_objective, st.ci95_objective);
    for (const auto& r : rows) {
        st.total_bw_hz += r.total_bw_hz;
        st.falls += r.fallen ? 1 : 0;
    }
    return st;
}

learning::ValueScenario value_scenario(const config::ScenarioConfig& cfg) {
    const Prepared prep = prepare(cfg);
    learning::ValueScenario sc;
    sc.loop = cfg.loop_config(cfg.loop.dt_in_sweep_ms.front());
    sc.plant = prep.plant;
    sc.lqr_solution = prep.sol;
    sc.weights = prep.weights;
    sc.table = prep.table;
    sc.dt_in_sweep_s = cfg.dt_in_sweep_s();
    for (double khz : cfg.value_learning.fixed_bandwidths_khz)
        sc.fixed_bandwidths_hz.push_back(khz * 1e3);
    sc.shared_cqi = cfg.channel.shared_cqi;
    sc.seed = cfg.seed;
    return sc;
}

alloc::TrainScenario train_scenario(const config::ScenarioConfig& cfg) {
    const Prepared prep = prepare(cfg);
    alloc::TrainScenario sc;
    sc.loop = cfg.loop_config(cfg.loop.dt_in_sweep_ms.front());
    sc.plant = prep.plant;
    sc.lqr_solution = prep.sol;
    sc.weights = prep.weights;
    sc.table = prep.table;
    sc.binning = cfg.binning;
    sc.dt_in_sweep_s = cfg.dt_in_sweep_s();
    sc.shared_cqi = cfg.channel.shared_cqi;
    return sc;
}

void cmd_simulate(const config::ScenarioConfig& cfg,
                  const std::string& out_dir) {
    ensure_dir(out_dir);
    const Prepared prep = prepare(cfg);
    const loopsim::BandwidthPolicy policy = simulate_policy(cfg, prep);
    const double menu_max = cfg.menu().max_hz();

    csv::Writer summary(out_dir + "/summary.csv");
    summary.header({"episode", "dt_in_ms", "cqi_dl", "cqi_ul",
                    "total_lqr_cost", "total_bw_norm", "decisions", "steps",
                    "termination"});

    std::vector<std::uint64_t> seeds;
    for (int ep = 0; ep < cfg.simulate.episodes; ++ep) {
        seeds.push_back(cfg.seed);
        Rng rng = Rng::for_episode(cfg.seed, ep);
        const int cqi_dl = channel::sample_cqi(rng);
        const int cqi_ul =
            cfg.channel.shared_cqi ? cqi_dl : channel::sample_cqi(rng);
        const loopsim::EpisodeTrace trace = loopsim::run_episode(
            cfg.loop_config(cfg.simulate.dt_in_ms), prep.plant, prep.sol,
            prep.weights, cqi_dl, cqi_ul, prep.table, policy, rng);

        csv::write_steps(out_dir + "/" + ep_name("episode", ep, "steps"),
                         trace.steps);
        csv::write_decisions(
            out_dir + "/" + ep_name("episode", ep, "decisions"),
            trace.decisions, cfg.binning);

        const EpisodeSummary s =
            summarize_trace(ep, cfg.simulate.dt_in_ms, trace, menu_max);
        summary.row({csv::format(std::int64_t{ep}),
                     csv::format(cfg.simulate.dt_in_ms),
                     csv::format(std::int64_t{s.cqi_dl}),
                     csv::format(std::int64_t{s.cqi_ul}),
                     csv::format(s.total_lqr_cost),
                     csv::format(s.total_bw_norm),
                     csv::format(std::int64_t{s.decisions}),
                     csv::format(std::int64_t{s.steps}),
                     termination_name(trace.termination)});
    }
    summary.close();
    config::write_manifest(cfg, out_dir, {cfg.seed}, "simulate");
}

void cmd_learn_value(const config::ScenarioConfig& cfg,
                     const std::string& out_dir) {
    ensure_dir(out_dir);
    const learning::ValueScenario sc = value_scenario(cfg);
    learning::ValueLearnConfig lc;
    lc.binning = cfg.binning;
    lc.gamma = cfg.value_learning.gamma;
    lc.alpha0 = cfg.value_learning.alpha0;
    lc.alpha_kappa = cfg.value_learning.alpha_kappa;
    lc.episodes = cfg.value_learning.episodes;

    const std::vector<learning::StateAbstraction> modes = {
        learning::StateAbstraction::DlAol, learning::StateAbstraction::UlAol,
        learning::StateAbstraction::DlAoi, learning::StateAbstraction::UlAoi};
    const auto results = learning::learn_value_curves(sc, lc, modes);

    // Fig. 4 analogue: reward orientation, so the curve is the negated
    // accumulated-cost value. Unvisited bins are reported as absent.
    for (const auto& res : results) {
        const std::string name =
            res.abstraction == learning::StateAbstraction::DlAol
                ? "value_curve.csv"
                : std::string("value_curve_") +
                      learning::abstraction_name(res.abstraction) + ".csv";
        csv::Writer w(out_dir + "/" + name);
        w.header({"bin_low_ms", "bin_high_ms", "value", "visits"});
        for (int b = 0; b < lc.binning.n_bins; ++b) {
            if (res.table.visits[b] == 0) continue;
            w.row({csv::format(b * lc.binning.bin_width_s * 1e3),
                   csv::format((b + 1) * lc.binning.bin_width_s * 1e3),
                   csv::format(-res.table.v[b]),
                   csv::format(static_cast<std::int64_t>(res.table.visits[b]))});
        }
        w.close();
    }

    csv::Writer te(out_dir + "/td_error.csv");
    te.header({"episode", "abstraction", "mean_abs_td_error"});
    for (int ep = 0; ep < lc.episodes; ++ep)
        for (const auto& res : results)
            te.row({csv::format(std::int64_t{ep}),
                    learning::abstraction_name(res.abstraction),
                    csv::format(res.mean_abs_td_error[ep])});
    te.close();

    // Plots regenerate purely from the emitted data.
    {
        std::vector<svg::Series> series(1);
        series[0].name = "dl_aol";
        const auto& res = results[0];
        for (int b = 0; b < lc.binning.n_bins; ++b) {
            if (res.table.visits[b] == 0) continue;
            series[0].x.push_back((b + 0.5) * lc.binning.bin_width_s * 1e3);
            series[0].y.push_back(-res.table.v[b]);
        }
        svg::line_chart(out_dir + "/value_curve.svg",
                        "Expected return vs age of loop", "AoL (ms)",
                        "expected return", series);
    }
    {
        std::vector<svg::Series> series;
        for (const auto& res : results) {
            svg::Series s;
            s.name = learning::abstraction_name(res.abstraction);
            // Light smoothing for readability: 20-episode moving average.
            double acc = 0.0;
            std::vector<double> window;
            for (int ep = 0; ep < lc.episodes; ++ep) {
                window.push_back(res.mean_abs_td_error[ep]);
                acc += window.back();
                if (window.size() > 20) {
                    acc -= window[window.size() - 21];
                }
                s.x.push_back(ep);
                s.y.push_back(acc / std::min<std::size_t>(window.size(), 20));
            }
            series.push_back(std::move(s));
        }
        svg::line_chart(out_dir + "/td_error.svg",
                        "Value estimation error over training episodes",
                        "episode", "mean |TD error|", series);
    }
    config::write_manifest(cfg, out_dir, {cfg.seed}, "learn-value");
}

void cmd_train(const config::ScenarioConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const alloc::TrainScenario sc = train_scenario(cfg);
    const alloc::BandwidthMenu menu = cfg.menu();
    const alloc::TrainResult result =
        alloc::train(sc, menu, cfg.training, cfg.seed);

    result.q.save(out_dir + "/qtable.txt", cfg.binning, menu,
                  cfg.training.hash());

    csv::Writer log(out_dir + "/training_log.csv");
    log.header({"episode", "eps", "alpha", "total_lqr_cost", "total_bw_norm",
                "decisions", "fallen"});
    for (const auto& r : result.log)
        log.row({csv::format(std::int64_t{r.episode}), csv::format(r.eps),
                 csv::format(r.alpha), csv::format(r.total_lqr_cost),
                 csv::format(r.total_bw_norm),
                 csv::format(std::int64_t{r.decisions}),
                 csv::format(std::int64_t{r.fallen ? 1 : 0})});
    log.close();

    // Learning curves: 100-episode moving averages of cost and bandwidth.
    std::vector<svg::Series> series(2);
    series[0].name = "lqr cost";
    series[1].name = "bandwidth (norm)";
    double acc_c = 0.0, acc_b = 0.0;
    for (std::size_t i = 0; i < result.log.size(); ++i) {
        acc_c += result.log[i].total_lqr_cost;
        acc_b += result.log[i].total_bw_norm;
        if (i >= 100) {
            acc_c -= result.log[i - 100].total_lqr_cost;
            acc_b -= result.log[i - 100].total_bw_norm;
        }
        const double n = std::min<std::size_t>(i + 1, 100);
        series[0].x.push_back(static_cast<double>(i));
        series[0].y.push_back(acc_c / n);
        series[1].x.push_back(static_cast<double>(i));
        series[1].y.push_back(acc_b / n);
    }
    svg::line_chart(out_dir + "/training_curve.svg", "Training progress",
                    "episode", "per-episode total", series);
    config::write_manifest(cfg, out_dir, {cfg.seed}, "train");
}

void cmd_compare(const config::ScenarioConfig& cfg,
                 const std::string& qtable_path, const std::string& out_dir) {
    ensure_dir(out_dir);
    const Prepared prep = prepare(cfg);
    const alloc::QTable::Loaded loaded = alloc::QTable::load(qtable_path);

    struct Method {
        std::string name;
        loopsim::BandwidthPolicy policy;
    };
    std::vector<Method> methods;
    methods.push_back({"rl", alloc::greedy_policy(loaded.table, loaded.binning,
                                                  loaded.menu)});
    for (double tr_ms : cfg.evaluation.deadlines_ms) {
        char name[32];
        std::snprintf(name, sizeof name, "tr_%gms", tr_ms);
        methods.push_back(
            {name, alloc::fixed_deadline_policy(tr_ms * 1e-3,
                                                cfg.loop.payload_bits,
                                                cfg.menu(), prep.table)});
    }

    csv::Writer report(out_dir + "/report.csv");
    report.header({"dt_in_ms", "method", "episodes", "mean_bw_norm",
                   "ci95_bw_norm", "mean_lqr_cost", "ci95_lqr_cost",
                   "mean_objective", "ci95_objective", "total_bw_hz",
                   "falls"});

    std::vector<std::string> group_labels;
    std::vector<std::string> method_labels;
    for (const auto& m : methods) method_labels.push_back(m.name);
    std::vector<std::vector<double>> bw_vals, bw_errs, cost_vals, cost_errs;

    for (double dt_ms : cfg.loop.dt_in_sweep_ms) {
        group_labels.push_back(csv::format(dt_ms) + " ms");
        bw_vals.emplace_back();
        bw_errs.emplace_back();
        cost_vals.emplace_back();
        cost_errs.emplace_back();
        for (const auto& m : methods) {
            const auto rows = evaluate_policy(cfg, {dt_ms},
                                              cfg.evaluation.episodes,
                                              m.policy);
            const MethodStats st = summarize(m.name, dt_ms, rows);
            report.row({csv::format(dt_ms), st.method,
                        csv::format(std::int64_t{st.episodes}),
                        csv::format(st.mean_bw_norm),
                        csv::format(st.ci95_bw_norm),
                        csv::format(st.mean_lqr_cost),
                        csv::format(st.ci95_lqr_cost),
                        csv::format(st.mean_objective),
                        csv::format(st.ci95_objective),
                        csv::format(st.total_bw_hz),
                        csv::format(std::int64_t{st.falls})});
            bw_vals.back().push_back(st.mean_bw_norm);
            bw_errs.back().push_back(st.ci95_bw_norm);
            cost_vals.back().push_back(st.mean_lqr_cost);
            cost_errs.back().push_back(st.ci95_lqr_cost);
        }
    }
    report.close();

    svg::bar_chart(out_dir + "/bandwidth.svg",
                   "Total bandwidth usage per method", "dt_in",
                   "mean normalized bandwidth", group_labels, method_labels,
                   bw_vals, bw_errs);
    svg::bar_chart(out_dir + "/lqr_cost.svg", "Total LQR cost per method",
                   "dt_in", "mean LQR cost", group_labels, method_labels,
                   cost_vals, cost_errs);
    config::write_manifest(cfg, out_dir, {cfg.seed}, "compare");
}

void cmd_sweep(const config::ScenarioConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const Prepared prep = prepare(cfg);
    const loopsim::BandwidthPolicy policy = simulate_policy(cfg, prep);

    csv::Writer w(out_dir + "/sweep_summary.csv");
    w.header({"dt_in_ms", "episodes", "mean_bw_norm", "ci95_bw_norm",
              "mean_lqr_cost", "ci95_lqr_cost", "mean_objective",
              "ci95_objective", "falls"});
    for (double dt_ms : cfg.loop.dt_in_sweep_ms) {
        const auto rows =
            evaluate_policy(cfg, {dt_ms}, cfg.evaluation.episodes, policy);
        const MethodStats st = summarize(cfg.simulate.policy, dt_ms, rows);
        w.row({csv::format(dt_ms), csv::format(std::int64_t{st.episodes}),
               csv::format(st.mean_bw_norm), csv::format(st.ci95_bw_norm),
               csv::format(st.mean_lqr_cost), csv::format(st.ci95_lqr_cost),
               csv::format(st.mean_objective), csv::format(st.ci95_objective),
               csv::format(std::int64_t{st.falls})});
    }
    w.close();
    config::write_manifest(cfg, out_dir, {cfg.seed}, "sweep");
}

}  // namespace aol::exp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "aol/allocator.hpp"
#include "aol/errors.hpp"

using namespace aol;
using alloc::BandwidthMenu;
using alloc::McState;
using alloc::QTable;
using alloc::TrainSchedule;

TEST_CASE("stage cost adds the normalized bandwidth") {
    const BandwidthMenu menu = BandwidthMenu::standard();
    CHECK(alloc::stage_cost(0.0, 1000e3, menu) == doctest::Approx(1.0));
    CHECK(alloc::stage_cost(0.0, 700e3, menu) == doctest::Approx(0.7));
    CHECK(alloc::stage_cost(0.0, 100e3, menu) == doctest::Approx(0.1));
    CHECK(alloc::stage_cost(2.5, 500e3, menu) == doctest::Approx(3.0));
}

TEST_CASE("menu validation") {
    BandwidthMenu m;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.values_hz = {100e3, 100e3};
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.values_hz = {200e3, 100e3};
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.values_hz = {-1.0, 100e3};
    CHECK_THROWS_AS(m.validate(), ConfigError);
    BandwidthMenu::standard().validate();
    CHECK(BandwidthMenu::standard().max_hz() == 1000e3);
}

TEST_CASE("flat state index is a bijection over the 300 states") {
    std::vector<bool> seen(20 * 15, false);
    for (int b = 0; b < 20; ++b) {
        for (int c = 1; c <= 15; ++c) {
            const McState s{b, c};
            const int idx = s.flat();
            REQUIRE(idx >= 0);
            REQUIRE(idx < 300);
            CHECK(!seen[idx]);
            seen[idx] = true;
            const McState back = McState::from_flat(idx);
            CHECK(back.aol_bin == b);
            CHECK(back.cqi == c);
        }
    }
}

TEST_CASE("greedy picks the argmin and breaks ties low") {
    QTable q(2, 4);
    q.at(0, 0) = 3.0;
    q.at(0, 1) = 1.0;
    q.at(0, 2) = 2.0;
    q.at(0, 3) = 1.5;
    CHECK(q.greedy(0) == 1);
    CHECK(q.min_q(0) == 1.0);
    q.at(1, 0) = 2.0;
    q.at(1, 1) = 1.0;
    q.at(1, 2) = 1.0;  // tie with action 1
    q.at(1, 3) = 5.0;
    CHECK(q.greedy(1) == 1);
}

TEST_CASE("epsilon-greedy action selection") {
    QTable q(1, 5);
    q.at(0, 3) = -1.0;

    // eps = 0: always greedy.
    Rng rng(7);
    for (int i = 0; i < 100; ++i)
        CHECK(alloc::select_action(q, 0, 0.0, rng) == 3);

    // eps = 1: uniform over the 5 actions.
    Rng rng2(9);
    std::array<int, 5> counts{};
    const int n = 50000;
    for (int i = 0; i < n; ++i) counts[alloc::select_action(q, 0, 1.0, rng2)]++;
    const double p = 0.2;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int a = 0; a < 5; ++a)
        CHECK(std::abs(counts[a] - n * p) < 4.0 * sigma);
}

TEST_CASE("q_update arithmetic") {
    QTable q(2, 2);
    q.at(0, 0) = 1.0;
    q.at(1, 0) = 0.4;
    q.at(1, 1) = 0.6;
    // δ = 0.5 + 0.9*min(0.4, 0.6) - 1 = -0.14; Q += 0.5*δ.
    const double d = alloc::q_update(q, 0, 0, 0.5, 1, 0.5, 0.9);
    CHECK(d == doctest::Approx(-0.14).epsilon(1e-12));
    CHECK(q.at(0, 0) == doctest::Approx(0.93).epsilon(1e-12));
    CHECK(q.visits[0] == 1);

    // Terminal: no bootstrap.
    QTable t(1, 1);
    t.at(0, 0) = 2.0;
    const double dt = alloc::q_update(t, 0, 0, 5.0, 0, 1.0, 0.9, true);
    CHECK(dt == doctest::Approx(3.0));
    CHECK(t.at(0, 0) == doctest::Approx(5.0));

    // SARSA bootstraps on the chosen next action, not the min.
    QTable s(2, 2);
    s.at(1, 0) = 0.4;
    s.at(1, 1) = 0.6;
    const double ds = alloc::sarsa_update(s, 0, 0, 0.5, 1, 1, 1.0, 0.9);
    CHECK(ds == doctest::Approx(0.5 + 0.9 * 0.6).epsilon(1e-12));
}

TEST_CASE("q-learning solves a 2-state 2-action MDP") {
    // Deterministic MDP, cost minimization:
    //   state 0: action 0 -> cost 1, stay in 0; action 1 -> cost 2, go to 1
    //   state 1: action 0 -> cost 0.5, stay in 1; action 1 -> cost 3, go to 0
    // gamma = 0.9. Value iteration oracle:
    double v0 = 0, v1 = 0;
    for (int i = 0; i < 2000; ++i) {
        const double n0 = std::min(1.0 + 0.9 * v0, 2.0 + 0.9 * v1);
        const double n1 = std::min(0.5 + 0.9 * v1, 3.0 + 0.9 * v0);
        v0 = n0;
        v1 = n1;
    }
    // Q-learning with exploring starts and decaying per-pair step sizes.
    QTable q(2, 2);
    std::array<std::uint64_t, 4> n{};
    Rng rng(17);
    int s = 0;
    for (int step = 0; step < 400000; ++step) {
        const int a = static_cast<int>(rng.uniform_int(2));
        double cost;
        int s_next;
        if (s == 0) {
            cost = a == 0 ? 1.0 : 2.0;
            s_next = a == 0 ? 0 : 1;
        } else {
            cost = a == 0 ? 0.5 : 3.0;
            s_next = a == 0 ? 1 : 0;
        }
        const double alpha = 1.0 / (1.0 + 0.01 * static_cast<double>(n[s * 2 + a]++));
        alloc::q_update(q, s, a, cost, s_next, alpha, 0.9);
        s = s_next;
    }
    CHECK(q.min_q(0) == doctest::Approx(v0).epsilon(1e-2));
    CHECK(q.min_q(1) == doctest::Approx(v1).epsilon(1e-2));
    // Optimal play pays the switch cost once, then exploits state 1.
    CHECK(q.greedy(0) == 1);
    CHECK(q.greedy(1) == 0);
}

TEST_CASE("schedule decay and validation") {
    TrainSchedule sch;
    sch.validate();
    // eps(ep) = max(floor, eps0 * decay^ep).
    CHECK(std::max(sch.eps_floor, sch.eps0 * std::pow(sch.eps_decay, 0)) ==
          1.0);
    CHECK(std::max(sch.eps_floor, sch.eps0 * std::pow(sch.eps_decay, 2000)) ==
          sch.eps_floor);

    TrainSchedule bad = sch;
    bad.eps0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = sch;
    bad.gamma = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = sch;
    bad.episodes = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK(sch.hash() != bad.hash());
    CHECK(sch.hash() == TrainSchedule{}.hash());
}

TEST_CASE("qtable save/load round trip") {
    QTable q(6, 3);
    Rng rng(23);
    for (double& v : q.q) v = rng.normal();
    for (auto& v : q.visits) v = rng.uniform_int(1000);
    const BandwidthMenu menu = BandwidthMenu::standard();
    const learning::AgeBinning binning{0.005, 20};

    const auto path =
        std::filesystem::temp_directory_path() / "aol_qtable_test.txt";
    q.save(path.string(), binning, menu, 0xdeadbeefULL);
    const QTable::Loaded loaded = QTable::load(path.string());
    std::filesystem::remove(path);

    CHECK(loaded.schedule_hash == 0xdeadbeefULL);
    CHECK(loaded.binning.n_bins == 20);
    CHECK(loaded.binning.bin_width_s == doctest::Approx(0.005));
    REQUIRE(loaded.menu.values_hz.size() == 10);
    REQUIRE(loaded.table.n_states == 6);
    REQUIRE(loaded.table.n_actions == 3);
    for (std::size_t i = 0; i < q.q.size(); ++i)
        CHECK(loaded.table.q[i] == q.q[i]);
    for (std::size_t i = 0; i < q.visits.size(); ++i)
        CHECK(loaded.table.visits[i] == q.visits[i]);

    CHECK_THROWS_AS(QTable::load("/nonexistent/q.txt"), IoError);
}

namespace {

alloc::TrainScenario small_scenario() {
    alloc::TrainScenario sc;
    sc.plant = {1.0, 0.1, 0.5, 9.8, 1.0, -0.05, 0.05};
    sc.lqr_solution =
        lqr::solve_care(plant::linearize(sc.plant), lqr::CostWeights{});
    sc.table = channel::CqiTable::builtin();
    sc.loop.dt_out = 0.001;
    sc.loop.horizon_s = 1.0;
    sc.loop.ul_bandwidth_hz = 7e6;
    sc.dt_in_sweep_s = {0.005, 0.010};
    return sc;
}

double greedy_mean_objective(const alloc::TrainScenario& sc,
                             const loopsim::BandwidthPolicy& policy,
                             const BandwidthMenu& menu, std::uint64_t seed,
                             int episodes) {
    double total = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        loopsim::LoopConfig loop = sc.loop;
        loop.dt_in = sc.dt_in_sweep_s[ep % sc.dt_in_sweep_s.size()];
        Rng rng = Rng::for_episode(seed, ep);
        const int cqi_dl = channel::sample_cqi(rng);
        const int cqi_ul = channel::sample_cqi(rng);
        const auto tr =
            loopsim::run_episode(loop, sc.plant, sc.lqr_solution, sc.weights,
                                 cqi_dl, cqi_ul, sc.table, policy, rng);
        double bw = 0.0;
        for (const auto& d : tr.decisions) bw += d.bandwidth_hz / menu.max_hz();
        total += tr.total_lqr_cost + tr.terminal_penalty + bw;
    }
    return total / episodes;
}

}  // namespace

TEST_CASE("training is deterministic and fills the log") {
    auto sc = small_scenario();
    const BandwidthMenu menu = BandwidthMenu::standard();
    TrainSchedule sch;
    sch.episodes = 30;

    const auto r1 = alloc::train(sc, menu, sch, 42);
    const auto r2 = alloc::train(sc, menu, sch, 42);
    REQUIRE(r1.log.size() == 30);
    for (std::size_t i = 0; i < r1.q.q.size(); ++i)
        CHECK(r1.q.q[i] == r2.q.q[i]);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(r1.log[i].total_lqr_cost == r2.log[i].total_lqr_cost);
        CHECK(r1.log[i].decisions == r2.log[i].decisions);
        CHECK(r1.log[i].eps ==
              std::max(sch.eps_floor, sch.eps0 * std::pow(sch.eps_decay, i)));
    }
}

TEST_CASE("trained greedy policy beats the most expensive fixed choice") {
    auto sc = small_scenario();
    const BandwidthMenu menu = BandwidthMenu::standard();
    TrainSchedule sch;
    sch.episodes = 1500;
    sch.eps_decay = 0.997;

    const auto result = alloc::train(sc, menu, sch, 7);
    const learning::AgeBinning binning = sc.binning;
    const auto rl = alloc::greedy_policy(result.q, binning, menu);

    const double rl_obj = greedy_mean_objective(sc, rl, menu, 1001, 60);
    const double max_obj = greedy_mean_objective(
        sc, alloc::fixed_bandwidth_policy(1000e3), menu, 1001, 60);
    // RL should at minimum undercut always-max-bandwidth on the combined
    // objective, since it can match stability at lower spend.
    CHECK(rl_obj < max_obj);
}

TEST_CASE("baseline policies") {
    const BandwidthMenu menu = BandwidthMenu::standard();
    const channel::CqiTable table = channel::CqiTable::builtin();

    const auto tr10 = alloc::fixed_deadline_policy(10e-3, 1024, menu, table);
    CHECK(tr10(0.0, 1) == 700e3);   // CQI 1 needs 672.4 kHz for 10 ms
    CHECK(tr10(0.050, 1) == 700e3); // age-independent
    CHECK(tr10(0.0, 15) == 100e3);  // CQI 15: 1.84 ms at 100 kHz

    const auto tr1 = alloc::fixed_deadline_policy(1e-3, 1024, menu, table);
    CHECK(tr1(0.0, 15) == 200e3);
    CHECK(tr1(0.0, 1) == 1000e3);   // infeasible: clamps to max

    const auto fixed = alloc::fixed_bandwidth_policy(300e3);
    CHECK(fixed(0.0, 1) == 300e3);
    CHECK(fixed(0.1, 15) == 300e3);

    CHECK_THROWS_AS(alloc::fixed_deadline_policy(0.0, 1024, menu, table),
                    ConfigError);

    QTable q(300, 10);
    q.at(McState{0, 5}.flat(), 2) = -1.0;
    const auto g = alloc::greedy_policy(q, learning::AgeBinning{0.005, 20},
                                        menu);
    CHECK(g(0.001, 5) == 300e3);  // action 2 on the standard menu
    CHECK(g(0.001, 6) == 100e3);  // untouched state: tie-break to lowest
}

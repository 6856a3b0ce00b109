#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aol/errors.hpp"
#include "aol/plant.hpp"

using namespace aol;
using plant::PlantParams;
using plant::StateVector;

namespace {

const PlantParams kBench{1.0, 0.1, 0.5, 9.8, 1.0, -0.05, 0.05};

// Independent fine-step oracle: explicit midpoint at a much smaller step,
// written without reusing the RK4 path.
StateVector midpoint_oracle(StateVector s, double force, double dt, double h,
                            const PlantParams& p) {
    const long n = std::lround(dt / h);
    for (long i = 0; i < n; ++i) {
        const StateVector d1 = plant::derivatives(s, force, p);
        const StateVector mid{s.x + 0.5 * h * d1.x,
                              s.x_dot + 0.5 * h * d1.x_dot,
                              s.theta + 0.5 * h * d1.theta,
                              s.theta_dot + 0.5 * h * d1.theta_dot};
        const StateVector d2 = plant::derivatives(mid, force, p);
        s = {s.x + h * d2.x, s.x_dot + h * d2.x_dot, s.theta + h * d2.theta,
             s.theta_dot + h * d2.theta_dot};
    }
    return s;
}

}  // namespace

TEST_CASE("derivatives at the upright equilibrium vanish") {
    const StateVector d = plant::derivatives({0, 0, 0, 0}, 0.0, kBench);
    CHECK(d.x == 0.0);
    CHECK(d.x_dot == 0.0);
    CHECK(d.theta == 0.0);
    CHECK(d.theta_dot == 0.0);

    // Holds for any valid parameter set.
    const PlantParams other{2.5, 0.3, 1.2, 9.81, 0.0, -0.1, 0.1};
    const StateVector d2 = plant::derivatives({0, 0, 0, 0}, 0.0, other);
    CHECK(d2.x_dot == 0.0);
    CHECK(d2.theta_dot == 0.0);
}

TEST_CASE("derivatives under unit force at the origin") {
    // Frozen from an independent symbolic evaluation of the model equations
    // (the same closed forms the linearization reproduces at the origin).
    const StateVector d = plant::derivatives({0, 0, 0, 0}, 1.0, kBench);
    CHECK(d.x == 0.0);
    CHECK(d.theta == 0.0);
    CHECK(d.x_dot == doctest::Approx(0.9923664122137404).epsilon(1e-9));
    CHECK(d.theta_dot == doctest::Approx(-1.8320610687022902).epsilon(1e-9));
}

TEST_CASE("hanging position is an equilibrium of the model equations") {
    const StateVector d =
        plant::derivatives({0, 0, std::numbers::pi, 0}, 0.0, kBench);
    CHECK(d.theta_dot == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("derivatives reject non-finite input") {
    StateVector bad{0, 0, std::nan(""), 0};
    CHECK_THROWS_AS(plant::derivatives(bad, 0.0, kBench), std::domain_error);
    CHECK_THROWS_AS(plant::derivatives({0, 0, 0, 0},
                                       std::numeric_limits<double>::infinity(),
                                       kBench),
                    std::domain_error);
}

TEST_CASE("linearize reproduces the closed-form entries") {
    const plant::LinearModel m = plant::linearize(kBench);
    CHECK(m.A(1, 2) == doctest::Approx(-12.0 * 0.1 * 9.8 / 13.1).epsilon(1e-12));
    CHECK(m.A(3, 2) ==
          doctest::Approx(12.0 * (0.98 + 9.8) / (0.5 * 13.1)).epsilon(1e-12));
    CHECK(m.B(1) == doctest::Approx(13.0 / 13.1).epsilon(1e-12));
    CHECK(m.B(3) == doctest::Approx(-12.0 / (0.5 * 13.1)).epsilon(1e-12));

    // Rows 0 and 2 are pure shift rows for any parameters.
    const PlantParams other{3.0, 0.4, 0.8, 9.81, 0.0, -0.1, 0.1};
    const plant::LinearModel m2 = plant::linearize(other);
    for (const auto& mm : {m, m2}) {
        CHECK(mm.A.row(0) == Eigen::RowVector4d(0, 1, 0, 0));
        CHECK(mm.A.row(2) == Eigen::RowVector4d(0, 0, 0, 1));
        CHECK(mm.B(0) == 0.0);
        CHECK(mm.B(2) == 0.0);
    }
}

TEST_CASE("numerical Jacobian of the dynamics matches the linear model") {
    const plant::LinearModel m = plant::linearize(kBench);
    const double h = 1e-6;
    Eigen::Matrix4d J;
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e[j] = h;
        const StateVector sp = StateVector::from(e);
        const StateVector sm = StateVector::from(-e);
        const Eigen::Vector4d dp = plant::derivatives(sp, 0.0, kBench).vec();
        const Eigen::Vector4d dm = plant::derivatives(sm, 0.0, kBench).vec();
        J.col(j) = (dp - dm) / (2.0 * h);
    }
    CHECK((J - m.A).cwiseAbs().maxCoeff() < 1e-6);

    const Eigen::Vector4d bp =
        plant::derivatives({0, 0, 0, 0}, h, kBench).vec();
    const Eigen::Vector4d bm =
        plant::derivatives({0, 0, 0, 0}, -h, kBench).vec();
    CHECK(((bp - bm) / (2.0 * h) - m.B).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("controllability matrix has full rank") {
    const plant::LinearModel m = plant::linearize(kBench);
    Eigen::Matrix4d C;
    C.col(0) = m.B;
    C.col(1) = m.A * m.B;
    C.col(2) = m.A * C.col(1);
    C.col(3) = m.A * C.col(2);
    CHECK(Eigen::FullPivLU<Eigen::Matrix4d>(C).rank() == 4);
}

TEST_CASE("step holds the equilibrium fixed") {
    const StateVector s = plant::step({0, 0, 0, 0}, 0.0, 1e-3, 0.0, kBench);
    CHECK(s.x == 0.0);
    CHECK(s.theta == 0.0);
}

TEST_CASE("step matches a fine-step oracle from a small angle") {
    const StateVector s0{0, 0, 0.01, 0};
    const StateVector got = plant::step(s0, 0.0, 1e-3, 0.0, kBench);
    const StateVector want = midpoint_oracle(s0, 0.0, 1e-3, 1e-6, kBench);
    CHECK(std::abs(got.theta - want.theta) < 1e-9);
    CHECK(std::abs(got.theta_dot - want.theta_dot) < 1e-9);
    CHECK(std::abs(got.x - want.x) < 1e-9);
    CHECK(std::abs(got.x_dot - want.x_dot) < 1e-9);
    // theta_dot after 1 ms is roughly theta_ddot(0) * dt.
    const double tdd0 = plant::derivatives(s0, 0.0, kBench).theta_dot;
    CHECK(got.theta_dot == doctest::Approx(tdd0 * 1e-3).epsilon(1e-3));
}

TEST_CASE("two half steps equal one stored twice and order is ~4") {
    const StateVector s0{0.1, -0.2, 0.05, 0.3};
    // dt then dt == two dt-steps by construction.
    StateVector a = plant::step(s0, 0.4, 1e-3, 0.0, kBench);
    a = plant::step(a, 0.4, 1e-3, 0.0, kBench);
    StateVector b = plant::step(s0, 0.4, 1e-3, 0.0, kBench);
    b = plant::step(b, 0.4, 1e-3, 0.0, kBench);
    CHECK(a.theta == b.theta);

    // Global error over 1 s scales as O(dt^4): quartering dt should shrink
    // the error against a fine reference by roughly 4^4.
    const auto integrate = [&](double dt) {
        StateVector s = s0;
        const long n = std::lround(1.0 / dt);
        for (long i = 0; i < n; ++i) s = plant::step(s, 0.0, dt, 0.0, kBench);
        return s;
    };
    const StateVector ref = integrate(1.0 / 65536);
    const double e1 = std::abs(integrate(1.0 / 256).theta - ref.theta);
    const double e2 = std::abs(integrate(1.0 / 1024).theta - ref.theta);
    const double order = std::log(e1 / e2) / std::log(4.0);
    CHECK(order > 3.5);
    CHECK(order < 4.7);
}

TEST_CASE("initial state sampling is bounded, seeded, and uniform") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const StateVector s = plant::sample_initial_state(kBench, rng);
        CHECK(s.x == 0.0);
        CHECK(s.x_dot == 0.0);
        CHECK(s.theta_dot == 0.0);
        CHECK(s.theta > kBench.theta0_min);
        CHECK(s.theta < kBench.theta0_max);
    }

    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i)
        CHECK(plant::sample_initial_state(kBench, a).theta ==
              plant::sample_initial_state(kBench, b).theta);

    // Sample mean within 3 sigma/sqrt(n) of the midpoint.
    Rng c(3);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += plant::sample_initial_state(kBench, c).theta;
    const double width = kBench.theta0_max - kBench.theta0_min;
    const double sigma = width / std::sqrt(12.0);
    CHECK(std::abs(sum / n - 0.0) < 3.0 * sigma / std::sqrt(double(n)));
}

TEST_CASE("parameter validation") {
    PlantParams p = kBench;
    p.cart_mass = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = kBench;
    p.theta0_min = p.theta0_max;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

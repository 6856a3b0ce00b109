#include "aol/plant.hpp"

#include <cmath>
#include <stdexcept>

#include "aol/errors.hpp"

namespace aol::plant {

void PlantParams::validate() const {
    if (!(cart_mass > 0.0)) throw ConfigError("plant: cart_mass must be > 0");
    if (!(pole_mass > 0.0)) throw ConfigError("plant: pole_mass must be > 0");
    if (!(pole_length > 0.0)) throw ConfigError("plant: pole_length must be > 0");
    if (!(gravity > 0.0)) throw ConfigError("plant: gravity must be > 0");
    if (!(noise_sigma >= 0.0)) throw ConfigError("plant: noise_sigma must be >= 0");
    if (!(theta0_min < theta0_max))
        throw ConfigError("plant: theta0_min must be < theta0_max");
}

bool StateVector::finite() const {
    return std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(theta) &&
           std::isfinite(theta_dot);
}

StateVector derivatives(const StateVector& s, double force,
                        const PlantParams& p) {
    if (!s.finite() || !std::isfinite(force))
        throw std::domain_error("plant: non-finite state or force");

    const double total_mass = p.cart_mass + p.pole_mass;
    const double sin_t = std::sin(s.theta);
    const double cos_t = std::cos(s.theta);
    const double temp =
        (-force - p.pole_mass * p.pole_length * s.theta_dot * s.theta_dot * sin_t) /
        total_mass;
    const double theta_ddot =
        (p.gravity * sin_t + cos_t * temp) /
        (p.pole_length *
         (kPoleInertiaFactor - p.pole_mass * cos_t * cos_t / total_mass));
    const double x_ddot =
        (force + p.pole_mass * p.pole_length *
                     (s.theta_dot * s.theta_dot * sin_t - theta_ddot * cos_t)) /
        total_mass;
    return {s.x_dot, x_ddot, s.theta_dot, theta_ddot};
}

LinearModel linearize(const PlantParams& p) {
    p.validate();
    const double mc = p.cart_mass;
    const double mp = p.pole_mass;
    const double l = p.pole_length;
    const double g = p.gravity;
    const double denom = 13.0 * mc + mp;

    LinearModel m;
    m.A << 0, 1, 0, 0,                                  //
        0, 0, -12.0 * mp * g / denom, 0,                //
        0, 0, 0, 1,                                     //
        0, 0, 12.0 * (mp * g + mc * g) / (l * denom), 0;
    m.B << 0, 13.0 / denom, 0, -12.0 / (l * denom);
    return m;
}

StateVector step(const StateVector& s, double force, double dt,
                 double disturbance, const PlantParams& p) {
    if (!(dt > 0.0)) throw std::domain_error("plant: dt must be > 0");
    const double f = force + disturbance;

    const auto deriv = [&](const StateVector& q) { return derivatives(q, f, p); };
    const auto axpy = [](const StateVector& q, double h, const StateVector& d) {
        return StateVector{q.x + h * d.x, q.x_dot + h * d.x_dot,
                           q.theta + h * d.theta, q.theta_dot + h * d.theta_dot};
    };

    const StateVector k1 = deriv(s);
    const StateVector k2 = deriv(axpy(s, 0.5 * dt, k1));
    const StateVector k3 = deriv(axpy(s, 0.5 * dt, k2));
    const StateVector k4 = deriv(axpy(s, dt, k3));

    StateVector out{
        s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.x_dot + dt / 6.0 * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot),
        s.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
        s.theta_dot + dt / 6.0 * (k1.theta_dot + 2.0 * k2.theta_dot +
                                  2.0 * k3.theta_dot + k4.theta_dot)};
    if (!out.finite()) throw SimulationFault("plant: state diverged to non-finite");
    return out;
}

StateVector sample_initial_state(const PlantParams& p, Rng& rng) {
    StateVector s;
    // Open interval: redraw the (measure-zero) endpoint hit.
    do {
        s.theta = rng.uniform(p.theta0_min, p.theta0_max);
    } while (s.theta == p.theta0_min || s.theta == p.theta0_max);
    return s;
}

}  // namespace aol::plant

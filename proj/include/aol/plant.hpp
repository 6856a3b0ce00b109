#pragma once

#include <Eigen/Dense>

#include "aol/rng.hpp"

namespace aol::plant {

struct PlantParams {
    double cart_mass = 1.0;     // kg
    double pole_mass = 0.1;     // kg
    double pole_length = 0.5;   // m
    double gravity = 9.8;       // m/s^2
    double noise_sigma = 1.0;   // N, std dev of the process disturbance
    double theta0_min = -0.05;  // rad
    double theta0_max = 0.05;   // rad

    void validate() const;  // throws ConfigError
};

struct StateVector {
    double x = 0.0;          // cart position, m
    double x_dot = 0.0;      // cart velocity, m/s
    double theta = 0.0;      // pole angle from vertical, rad
    double theta_dot = 0.0;  // pole angular velocity, rad/s

    bool finite() const;
    Eigen::Vector4d vec() const { return {x, x_dot, theta, theta_dot}; }
    static StateVector from(const Eigen::Vector4d& v) {
        return {v[0], v[1], v[2], v[3]};
    }
};

struct LinearModel {
    Eigen::Matrix4d A;
    Eigen::Vector4d B;
};

// Effective pole inertia factor about the pivot. The linear model below is
// the exact Jacobian of the nonlinear dynamics only with this value, and the
// controller gain and all cross-validation checks depend on that agreement.
inline constexpr double kPoleInertiaFactor = 13.0 / 12.0;

// Time derivative [x_dot, x_ddot, theta_dot, theta_ddot] of the cart-pole
// under applied force `force`. Throws std::domain_error on non-finite input.
StateVector derivatives(const StateVector& s, double force,
                        const PlantParams& p);

// Closed-form linearization about the upright equilibrium.
LinearModel linearize(const PlantParams& p);

// Advance the nonlinear dynamics by dt with classical RK4, holding the
// effective input force (force + disturbance) constant over the step.
// Throws SimulationFault if the result is non-finite.
StateVector step(const StateVector& s, double force, double dt,
                 double disturbance, const PlantParams& p);

// Upright start: theta uniform in (theta0_min, theta0_max), rest zero.
StateVector sample_initial_state(const PlantParams& p, Rng& rng);

}  // namespace aol::plant

#pragma once

#include <Eigen/Dense>

#include "aol/plant.hpp"

namespace aol::lqr {

struct CostWeights {
    Eigen::Matrix4d Q = Eigen::Matrix4d::Identity();
    double R = 1.0;

    void validate() const;  // throws ConfigError
};

struct LqrSolution {
    Eigen::Matrix4d P;
    Eigen::RowVector4d K;
};

// General-size CARE solve: AᵀP + PA − PBR⁻¹BᵀP + Q = 0, K = R⁻¹BᵀP.
// Newton–Kleinman iteration seeded from a stabilizing gain obtained by
// integrating the Riccati ODE backward. Throws SolverError (with the final
// residual) if the iteration budget is exhausted.
struct CareResult {
    Eigen::MatrixXd P;
    Eigen::MatrixXd K;
};
CareResult solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

LqrSolution solve_care(const plant::LinearModel& model, const CostWeights& w);

// Frobenius norm of the CARE residual for a candidate P.
double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P);

// State feedback u = −K·X.
double control(const plant::StateVector& s, const LqrSolution& sol);

// Running cost ∫(XᵀQX + uᵀRu)dt accumulated with left-endpoint rectangles
// on the actuation grid.
struct CostAccumulator {
    double cost = 0.0;  // accumulated integrand
    double time = 0.0;  // accumulated horizon, s

    void add(const plant::StateVector& s, double u, double dt,
             const CostWeights& w);
};

}  // namespace aol::lqr

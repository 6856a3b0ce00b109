#include "aol/lqr.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "aol/errors.hpp"

namespace aol::lqr {
namespace {

double max_real_eig(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

// Solve MᵀP + PM = −Rhs for symmetric Rhs via the Kronecker form; the
// problem sizes here (n ≤ 4) make the dense n²×n² solve exact and cheap.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& M,
                               const Eigen::MatrixXd& Rhs) {
    const Eigen::Index n = M.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd coef =
        Eigen::kroneckerProduct(I, M.transpose()).eval() +
        Eigen::kroneckerProduct(M.transpose(), I).eval();
    const Eigen::VectorXd rhs =
        -Eigen::Map<const Eigen::VectorXd>(Rhs.data(), n * n);
    Eigen::VectorXd p = coef.fullPivLu().solve(rhs);
    Eigen::MatrixXd P = Eigen::Map<Eigen::MatrixXd>(p.data(), n, n);
    return 0.5 * (P + P.transpose());  // symmetrize roundoff
}

// Riccati ODE right-hand side, integrated "backward" from P(T)=0 (forward
// in time-to-go) to obtain a stabilizing initial gain.
Eigen::MatrixXd stabilizing_seed(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B,
                                 const Eigen::MatrixXd& Q,
                                 const Eigen::MatrixXd& Rinv) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    const auto rhs = [&](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
        return A.transpose() * p + p * A - p * B * Rinv * B.transpose() * p + Q;
    };
    const double ds = 1e-3;
    const int max_steps = 50000;
    for (int i = 0; i < max_steps; ++i) {
        const Eigen::MatrixXd k1 = rhs(P);
        const Eigen::MatrixXd k2 = rhs(P + 0.5 * ds * k1);
        const Eigen::MatrixXd k3 = rhs(P + 0.5 * ds * k2);
        const Eigen::MatrixXd k4 = rhs(P + ds * k3);
        P += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (i % 200 == 199) {
            const Eigen::MatrixXd K = Rinv * B.transpose() * P;
            if (max_real_eig(A - B * K) < -1e-6) return K;
        }
    }
    const Eigen::MatrixXd K = Rinv * B.transpose() * P;
    if (max_real_eig(A - B * K) < 0.0) return K;
    throw SolverError("lqr: could not find a stabilizing seed gain",
                      rhs(P).norm());
}

}  // namespace

void CostWeights::validate() const {
    if (!Q.isApprox(Q.transpose(), 1e-12))
        throw ConfigError("lqr: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Q);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("lqr: Q must be positive definite");
    if (!(R > 0.0)) throw ConfigError("lqr: R must be positive definite");
}

double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd Rinv = R.inverse();
    return (A.transpose() * P + P * A - P * B * Rinv * B.transpose() * P + Q)
        .norm();
}

CareResult solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
    const Eigen::MatrixXd Rinv = R.inverse();
    Eigen::MatrixXd K = stabilizing_seed(A, B, Q, Rinv);
    Eigen::MatrixXd P;

    const int budget = 200;
    for (int it = 0; it < budget; ++it) {
        const Eigen::MatrixXd Acl = A - B * K;
        const Eigen::MatrixXd Pn =
            solve_lyapunov(Acl, Q + K.transpose() * R * K);
        const double change = (it == 0) ? 1.0 : (Pn - P).norm();
        P = Pn;
        K = Rinv * B.transpose() * P;
        if (it > 0 && change <= 1e-9) return {P, K};
    }
    throw SolverError("lqr: Newton-Kleinman did not converge",
                      care_residual(A, B, Q, R, P));
}

LqrSolution solve_care(const plant::LinearModel& model, const CostWeights& w) {
    w.validate();
    Eigen::MatrixXd R(1, 1);
    R(0, 0) = w.R;
    const CareResult r = solve_care(model.A, model.B, w.Q, R);
    LqrSolution sol;
    sol.P = r.P;
    sol.K = r.K.row(0);
    return sol;
}

double control(const plant::StateVector& s, const LqrSolution& sol) {
    return -sol.K.dot(s.vec());
}

void CostAccumulator::add(const plant::StateVector& s, double u, double dt,
                          const CostWeights& w) {
    const Eigen::Vector4d x = s.vec();
    cost += (x.dot(w.Q * x) + u * w.R * u) * dt;
    time += dt;
}

}  // namespace aol::lqr

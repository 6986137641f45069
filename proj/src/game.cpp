#include "aoilq/game.hpp"

#include <Eigen/Cholesky>
#include <string>

#include "aoilq/linalg.hpp"

namespace aoilq {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

void require_dims(bool cond, const std::string& msg) {
  if (!cond) throw DimensionMismatch(msg);
}

bool symmetric(const MatrixXd& m, double tol = 1e-10) {
  return (m - m.transpose()).norm() <= tol * (1.0 + m.norm());
}

bool positive_definite(const MatrixXd& m) {
  if (!symmetric(m)) return false;
  Eigen::LLT<MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

MatrixXd gare_residual(const GameSpec& spec, const MatrixXd& s,
                       const MatrixXd& p) {
  return spec.A.transpose() * p + p * spec.A + spec.Q - p * s * p;
}

}  // namespace

void GameSpec::validate() const {
  const auto n = A.rows();
  require_dims(A.cols() == n && n > 0, "A must be square and non-empty");
  require_dims(B1.rows() == n, "B1 row count must match A");
  require_dims(B2.rows() == n, "B2 row count must match A");
  require_dims(G.rows() == n, "G row count must match A");
  require_dims(Q.rows() == n && Q.cols() == n, "Q must be n x n");
  require_dims(R1.rows() == B1.cols() && R1.cols() == B1.cols(),
               "R1 must be m1 x m1");
  require_dims(R2.rows() == B2.cols() && R2.cols() == B2.cols(),
               "R2 must be m2 x m2");
  require_dims(Sigma0.rows() == n && Sigma0.cols() == n,
               "Sigma0 must be n x n");
  for (const auto* m : {&A, &B1, &B2, &G, &Q, &R1, &R2, &Sigma0}) {
    if (!all_finite(*m)) throw NonFinite("game matrices must be finite");
  }
  require(symmetric(Q) && is_psd(Q), "Q must be symmetric positive semidefinite");
  require(positive_definite(R1), "R1 must be positive definite");
  require(positive_definite(R2), "R2 must be positive definite");
  require(symmetric(Sigma0) && is_psd(Sigma0),
          "Sigma0 must be symmetric positive semidefinite");
}

GameSolution solve_game_riccati(const GameSpec& spec, double tol,
                                int max_iter) {
  spec.validate();
  const auto n = spec.state_dim();

  const MatrixXd s1 = spec.B1 * spec.R1.llt().solve(spec.B1.transpose());
  const MatrixXd s2 = spec.B2 * spec.R2.llt().solve(spec.B2.transpose());
  const MatrixXd s = s1 - s2;

  MatrixXd p;
  if (spec.Q.norm() <= tol &&
      spectral_abscissa(spec.A) <= 1e-9 * (1.0 + spec.A.norm())) {
    // Zero state weight with a (marginally) stable drift: P = 0 solves the
    // equation outright and the Hamiltonian has no n-dimensional strictly
    // stable subspace to extract.
    p = MatrixXd::Zero(n, n);
  } else {
    MatrixXd hamiltonian(2 * n, 2 * n);
    hamiltonian.topLeftCorner(n, n) = spec.A;
    hamiltonian.topRightCorner(n, n) = -s;
    hamiltonian.bottomLeftCorner(n, n) = -spec.Q;
    hamiltonian.bottomRightCorner(n, n) = -spec.A.transpose();

    const Eigen::MatrixXcd basis = stable_invariant_subspace(hamiltonian);
    if (basis.cols() != n) {
      throw NoStabilizingSolution(
          "Hamiltonian has " + std::to_string(basis.cols()) +
          " stable eigenvalues, expected " + std::to_string(n) +
          " (ill-posed game)");
    }
    const Eigen::MatrixXcd x1 = basis.topRows(n);
    const Eigen::MatrixXcd x2 = basis.bottomRows(n);
    const Eigen::MatrixXcd pc =
        x1.transpose().partialPivLu().solve(x2.transpose()).transpose();
    if (!pc.allFinite()) {
      throw NoStabilizingSolution(
          "stable subspace is not a graph over the state space");
    }
    p = symmetrize(pc.real());
  }

  // Newton refinement: each step solves the Lyapunov equation
  //   (A - S P)^T D + D (A - S P) = -residual(P).
  MatrixXd residual = gare_residual(spec, s, p);
  double res_norm = residual.norm();
  for (int it = 0; it < max_iter && res_norm > tol; ++it) {
    const MatrixXd delta = solve_lyapunov(spec.A - s * p, residual);
    if (!all_finite(delta)) {
      throw NoStabilizingSolution("Newton refinement diverged");
    }
    p = symmetrize(p + delta);
    residual = gare_residual(spec, s, p);
    res_norm = residual.norm();
  }
  if (res_norm > tol) {
    throw NoStabilizingSolution("Riccati residual " + std::to_string(res_norm) +
                                " above tolerance");
  }
  if (!is_psd(p)) {
    throw NoStabilizingSolution("stabilizing candidate is not positive semidefinite");
  }
  const MatrixXd closed_loop = spec.A - s * p;
  const double abscissa = spectral_abscissa(closed_loop);
  if (abscissa > 1e-9 * (1.0 + closed_loop.norm())) {
    throw NoStabilizingSolution("closed loop A - B1 K1 + B2 K2 is unstable");
  }

  GameSolution sol;
  sol.P = p;
  sol.K1 = spec.R1.llt().solve(spec.B1.transpose() * p);
  sol.K2 = spec.R2.llt().solve(spec.B2.transpose() * p);
  sol.A_tilde = spec.A + s2 * p;
  sol.Q_tilde = spec.Q - p * s2 * p;
  sol.M1 = symmetrize(p * s1 * p);
  sol.M2 = symmetrize(p * s2 * p);
  sol.J_star = security_level(p, spec.G);
  sol.residual_norm = res_norm;
  sol.Q_tilde_indefinite =
      min_symmetric_eigenvalue(sol.Q_tilde) < -1e-9 * (1.0 + sol.Q_tilde.norm());
  return sol;
}

double security_level(const MatrixXd& P, const MatrixXd& G) {
  if (P.rows() != P.cols() || G.rows() != P.rows()) {
    throw DimensionMismatch("security_level: P must be square with G rows matching");
  }
  return (G.transpose() * P * G).trace();
}

double transformed_are_residual(const GameSolution& sol, const GameSpec& spec) {
  const MatrixXd s1 = spec.B1 * spec.R1.llt().solve(spec.B1.transpose());
  const MatrixXd r = sol.A_tilde.transpose() * sol.P + sol.P * sol.A_tilde +
                     sol.Q_tilde - sol.P * s1 * sol.P;
  return r.norm();
}

}  // namespace aoilq

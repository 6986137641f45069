#pragma once

// Independent reference computations for the test suites. Everything here
// deliberately avoids the library's solver paths: the Riccati oracle is a
// Newton-Kleinman iteration with its own Lyapunov solve, the threshold
// oracle is exhaustive search, and scalar results come from closed forms.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "aoilq/discretization.hpp"
#include "aoilq/game.hpp"
#include "aoilq/sensing.hpp"

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// exp(x) by direct series summation.
inline double series_exp(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= x / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

/// Closed-form scalar Gramian: integral of e^{2 a s} g^2 over [0, t].
inline double scalar_gramian(double a, double g, double t) {
  if (a == 0.0) return g * g * t;
  return g * g * (std::exp(2.0 * a * t) - 1.0) / (2.0 * a);
}

/// Positive root of the scalar game Riccati equation
/// 2 a P + q - s P^2 = 0 by the quadratic formula.
inline double scalar_gare_root(double a, double q, double s) {
  return (2.0 * a + std::sqrt(4.0 * a * a + 4.0 * s * q)) / (2.0 * s);
}

/// Lyapunov solve A^T X + X A + W = 0 by dense vectorization; kept local
/// so the Riccati oracle shares nothing with the library implementation.
inline MatrixXd lyapunov(const MatrixXd& a, const MatrixXd& w) {
  const auto n = a.rows();
  MatrixXd k = MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0; r < n; ++r) {
        k(j * n + i, j * n + r) += a(r, i);  // A^T X term
        k(i * n + j, r * n + j) += a(r, i);  // X A term (transposed index)
      }
    }
  }
  VectorXd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) rhs[j * n + i] = -w(i, j);
  }
  const VectorXd x = k.fullPivLu().solve(rhs);
  MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = x[j * n + i];
  }
  return out;
}

/// Newton-Kleinman iteration for the standard LQR Riccati equation
/// A^T X + X A + Q - X B R^-1 B^T X = 0, started from a stabilizing gain
/// (K = 0 requires stable A).
inline MatrixXd newton_kleinman_care(const MatrixXd& a, const MatrixXd& b,
                                     const MatrixXd& q, const MatrixXd& r,
                                     int iters = 60) {
  const MatrixXd rinv = r.inverse();
  MatrixXd k = MatrixXd::Zero(b.cols(), a.rows());
  MatrixXd x = MatrixXd::Zero(a.rows(), a.rows());
  for (int it = 0; it < iters; ++it) {
    const MatrixXd acl = a - b * k;
    const MatrixXd w = q + k.transpose() * r * k;
    x = lyapunov(acl, w);
    x = (x + x.transpose()) / 2.0;
    k = rinv * b.transpose() * x;
  }
  return x;
}

/// Exhaustive argmin of the cycle-average cost (lambda + sum U) / eta over
/// eta in [1, limit]; ties resolve toward the smaller threshold.
inline std::size_t brute_force_threshold(aoilq::AgeCostTable& table,
                                         double lambda, std::size_t limit) {
  table.extend_to(limit);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_eta = 1;
  double running = 0.0;
  for (std::size_t eta = 1; eta <= limit; ++eta) {
    running += table.u(eta);
    const double g = (lambda + running) / static_cast<double>(eta);
    if (g < best * (1.0 - 1e-12)) {
      best = g;
      best_eta = eta;
    }
  }
  return best_eta;
}

inline double brute_force_cycle_cost(aoilq::AgeCostTable& table, double lambda,
                                     std::size_t eta) {
  table.extend_to(eta);
  double running = 0.0;
  for (std::size_t l = 1; l <= eta; ++l) running += table.u(l);
  return (lambda + running) / static_cast<double>(eta);
}

/// Renewal-reward prediction of the time-averaged error cost of a
/// deterministic threshold-eta policy: (1/(eta h)) * integral over one
/// cycle of tr(M1 Sigma_e(s)), trapezoid on the dt grid.
inline double renewal_error_cost(const aoilq::GameSolution& sol,
                                 const MatrixXd& g, double h, std::size_t eta,
                                 double dt) {
  const double cycle = static_cast<double>(eta) * h;
  const auto steps = static_cast<std::size_t>(std::llround(cycle / dt));
  double sum = 0.0;
  double prev = 0.0;  // tr(M1 Sigma_e(0)) = 0
  for (std::size_t k = 1; k <= steps; ++k) {
    const double s = static_cast<double>(k) * dt;
    const double value =
        (sol.M1 * aoilq::error_covariance(sol.A_tilde, g, s)).trace();
    sum += 0.5 * (prev + value) * dt;
    prev = value;
  }
  return sum / cycle;
}

/// Expected long-run error cost of a draw-once randomized policy: the
/// vartheta-mixture of the two deterministic renewal averages.
inline double mixture_error_cost(const aoilq::GameSolution& sol,
                                 const MatrixXd& g,
                                 const aoilq::SensorPolicy& policy,
                                 double dt) {
  const double c1 = renewal_error_cost(sol, g, policy.h, policy.eta_1, dt);
  if (policy.mode == aoilq::PolicyMode::Deterministic) return c1;
  const double c2 = renewal_error_cost(sol, g, policy.h, policy.eta_2, dt);
  return policy.vartheta * c1 + (1.0 - policy.vartheta) * c2;
}

/// The scalar system used throughout the numerical studies.
inline aoilq::GameSpec scalar_game() {
  aoilq::GameSpec spec;
  spec.A = MatrixXd::Constant(1, 1, 0.5);
  spec.B1 = MatrixXd::Constant(1, 1, 1.0);
  spec.B2 = MatrixXd::Constant(1, 1, 0.5);
  spec.G = MatrixXd::Constant(1, 1, 1.0);
  spec.Q = MatrixXd::Constant(1, 1, 4.0);
  spec.R1 = MatrixXd::Constant(1, 1, 1.0);
  spec.R2 = MatrixXd::Constant(1, 1, 0.5);
  spec.Sigma0 = MatrixXd::Zero(1, 1);
  return spec;
}

}  // namespace oracles

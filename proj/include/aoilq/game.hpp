#pragma once

#include <Eigen/Dense>

#include "aoilq/errors.hpp"

namespace aoilq {

using Eigen::MatrixXd;

/// Parameters of the continuous-time two-player LQ zero-sum game
///   dx = (A x + B1 u1 + B2 u2) dt + G dW,   x(0) ~ N(0, Sigma0),
/// with running payoff |x|^2_Q + |u1|^2_R1 - |u2|^2_R2. Player 1
/// minimizes, player 2 maximizes.
struct GameSpec {
  MatrixXd A;       // n x n drift
  MatrixXd B1;      // n x m1 minimizer input map
  MatrixXd B2;      // n x m2 maximizer input map
  MatrixXd G;       // n x p noise gain
  MatrixXd Q;       // n x n state weight, symmetric PSD
  MatrixXd R1;      // m1 x m1, symmetric PD
  MatrixXd R2;      // m2 x m2, symmetric PD
  MatrixXd Sigma0;  // n x n initial-state covariance, symmetric PSD

  Eigen::Index state_dim() const { return A.rows(); }

  /// Throws DimensionMismatch / ConfigError when shapes or definiteness
  /// requirements are violated. Error messages name the offending field.
  void validate() const;
};

/// Saddle-point solution of the game: the stabilizing solution P of
///   A^T P + P A + Q + P (B2 R2^-1 B2^T - B1 R1^-1 B1^T) P = 0
/// with the derived feedback gains and transformed matrices.
struct GameSolution {
  MatrixXd P;        // stabilizing symmetric PSD Riccati solution
  MatrixXd K1;       // R1^-1 B1^T P; u1* = -K1 x
  MatrixXd K2;       // R2^-1 B2^T P; u2* = +K2 x
  MatrixXd A_tilde;  // A + B2 R2^-1 B2^T P
  MatrixXd Q_tilde;  // Q - P B2 R2^-1 B2^T P (may be indefinite)
  MatrixXd M1;       // P B1 R1^-1 B1^T P
  MatrixXd M2;       // P B2 R2^-1 B2^T P
  double J_star = 0.0;  // tr(P G G^T), the security level
  double residual_norm = 0.0;
  bool Q_tilde_indefinite = false;
};

/// Computes the stabilizing PSD solution of the game Riccati equation by
/// extracting the stable invariant subspace of the 2n x 2n Hamiltonian
/// [[A, -S], [-Q, -A^T]], S = B1 R1^-1 B1^T - B2 R2^-1 B2^T, followed by
/// Newton refinement on the residual. P is symmetrized after every step.
///
/// Throws NoStabilizingSolution when the subspace has the wrong dimension,
/// the candidate is not PSD within tolerance, or the closed loop
/// A - B1 K1 + B2 K2 is unstable.
GameSolution solve_game_riccati(const GameSpec& spec, double tol = 1e-9,
                                int max_iter = 50);

/// tr(P G G^T): the expected cost under the saddle-point pair.
double security_level(const MatrixXd& P, const MatrixXd& G);

/// Norm of A~^T P + P A~ + Q~ - P B1 R1^-1 B1^T P. Algebraically forced
/// to zero by the Riccati equation (the transformed problem has the same
/// solution), so this must be small for every solved instance.
double transformed_are_residual(const GameSolution& sol, const GameSpec& spec);

}  // namespace aoilq

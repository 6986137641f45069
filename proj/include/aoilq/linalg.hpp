#pragma once

#include <Eigen/Dense>

#include "aoilq/errors.hpp"

namespace aoilq {

using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()) / 2.0;
}

/// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const MatrixXd& m);

/// Largest real part over the (generally complex) spectrum of a square matrix.
double spectral_abscissa(const MatrixXd& m);

/// Positive-semidefiniteness up to a scale-aware tolerance:
/// lambda_min >= -tol_scale * (1 + ||m||).
bool is_psd(const MatrixXd& m, double tol_scale = 1e-8);

/// Matrix exponential by scaling-and-squaring with a (13,13) Pade
/// approximant (Higham's coefficients).
MatrixXd expm(const MatrixXd& a);

/// Solves A^T X + X A + W = 0 for X by Kronecker vectorization.
/// Intended for the small dense problems this library targets.
MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& w);

/// Integral of e^{As} G G^T e^{A^T s} ds over [0, t], computed from the
/// exponential of the block matrix [[-A, GG^T], [0, A^T]] (Van Loan).
/// Exact up to matrix-exponential accuracy; no special casing for
/// singular A.
MatrixXd van_loan_gramian(const MatrixXd& a, const MatrixXd& g, double t);

/// Basis of the invariant subspace of `m` spanned by eigenvalues with
/// negative real part, obtained from a reordered complex Schur form.
/// Returns a (rows x k) complex matrix where k is the number of stable
/// eigenvalues.
Eigen::MatrixXcd stable_invariant_subspace(const MatrixXd& m);

}  // namespace aoilq

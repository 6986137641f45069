#include "aoilq/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

namespace aoilq {

double min_symmetric_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  return es.eigenvalues().minCoeff();
}

double spectral_abscissa(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_psd(const MatrixXd& m, double tol_scale) {
  return min_symmetric_eigenvalue(m) >= -tol_scale * (1.0 + m.norm());
}

namespace {

void pade13(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const auto n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  MatrixXd tmp = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  tmp += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u.noalias() = a * tmp;
  v.noalias() = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

MatrixXd expm(const MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("expm: matrix must be square");
  }
  if (!all_finite(a)) {
    throw NonFinite("expm: input has non-finite entries");
  }

  const double l1norm = a.cwiseAbs().colwise().sum().maxCoeff();
  const double pade13_bound = 5.371920351148152;
  int squarings = 0;
  MatrixXd scaled = a;
  if (l1norm > pade13_bound) {
    std::frexp(l1norm / pade13_bound, &squarings);
    if (squarings < 0) squarings = 0;
    scaled = a * std::ldexp(1.0, -squarings);
  }

  MatrixXd u, v;
  pade13(scaled, u, v);
  MatrixXd result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& w) {
  const auto n = a.rows();
  if (a.cols() != n || w.rows() != n || w.cols() != n) {
    throw DimensionMismatch("solve_lyapunov: incompatible shapes");
  }
  const MatrixXd id = MatrixXd::Identity(n, n);
  MatrixXd k(n * n, n * n);
  // vec(A^T X) = (I (x) A^T) vec(X), vec(X A) = (A^T (x) I) vec(X).
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k.block(j * n, i * n, n, n) = a(i, j) * id;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    k.block(j * n, j * n, n, n) += a.transpose();
  }
  const VectorXd rhs = -Eigen::Map<const VectorXd>(w.data(), n * n);
  VectorXd x = k.partialPivLu().solve(rhs);
  return Eigen::Map<MatrixXd>(x.data(), n, n);
}

MatrixXd van_loan_gramian(const MatrixXd& a, const MatrixXd& g, double t) {
  const auto n = a.rows();
  if (a.cols() != n || g.rows() != n) {
    throw DimensionMismatch("van_loan_gramian: incompatible shapes");
  }
  if (!all_finite(a) || !all_finite(g) || !std::isfinite(t)) {
    throw NonFinite("van_loan_gramian: non-finite input");
  }
  MatrixXd block = MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -a;
  block.topRightCorner(n, n) = g * g.transpose();
  block.bottomRightCorner(n, n) = a.transpose();
  const MatrixXd e = expm(block * t);
  const MatrixXd f12 = e.topRightCorner(n, n);
  const MatrixXd f22 = e.bottomRightCorner(n, n);
  return symmetrize(f22.transpose() * f12);
}

namespace {

// Swaps the adjacent diagonal entries k, k+1 of the upper-triangular
// complex Schur factor t by a unitary similarity, updating u alongside.
void swap_schur_entries(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u,
                        Eigen::Index k) {
  using Complex = std::complex<double>;
  const Complex coupling = t(k, k + 1);
  const Complex gap = t(k + 1, k + 1) - t(k, k);
  // [coupling; gap] spans the eigenvector of the trailing eigenvalue in
  // the 2x2 block; rotate it onto the first coordinate axis.
  Eigen::JacobiRotation<Complex> rot;
  rot.makeGivens(coupling, gap);
  t.applyOnTheLeft(k, k + 1, rot.adjoint());
  t.applyOnTheRight(k, k + 1, rot);
  u.applyOnTheRight(k, k + 1, rot);
  t(k + 1, k) = Complex(0, 0);
}

}  // namespace

Eigen::MatrixXcd stable_invariant_subspace(const MatrixXd& m) {
  if (!all_finite(m)) {
    throw NonFinite("stable_invariant_subspace: non-finite input");
  }
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m.cast<std::complex<double>>());
  if (schur.info() != Eigen::Success) {
    throw NoStabilizingSolution("complex Schur decomposition failed");
  }
  Eigen::MatrixXcd t = schur.matrixT();
  Eigen::MatrixXcd u = schur.matrixU();

  // Selection reorder: bubble every stable eigenvalue to the leading block.
  const Eigen::Index dim = m.rows();
  Eigen::Index placed = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (t(j, j).real() < 0.0) {
      for (Eigen::Index k = j; k > placed; --k) {
        swap_schur_entries(t, u, k - 1);
      }
      ++placed;
    }
  }
  return u.leftCols(placed);
}

}  // namespace aoilq

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "aoilq/errors.hpp"
#include "aoilq/game.hpp"

namespace aoilq {

/// Phi(t) = e^{A~ t}.
MatrixXd state_transition(const MatrixXd& A_tilde, double t);

/// One-step noise Gramian G~^h = integral of Phi(s) G G^T Phi(s)^T over
/// [0, h]. Symmetric PSD; satisfies G~^{2h} = G~^h + Phi(h) G~^h Phi(h)^T.
MatrixXd noise_gramian(const MatrixXd& A_tilde, const MatrixXd& G, double h);

/// Covariance of the estimation error after running open loop for `age`
/// seconds since the last sample: Sigma_e(age) = integral of
/// Phi(s) G G^T Phi(s)^T over [0, age]. Zero at age 0, PSD-monotone in age.
MatrixXd error_covariance(const MatrixXd& A_tilde, const MatrixXd& G,
                          double age);

/// Cached per-step age costs for the sensing MDP:
///   U(d) = tr(M1 * sum_{i<d} Phi(ih) G~^h Phi(ih)^T) = tr(M1 Sigma_e(d h)).
/// Built incrementally through the recurrence
///   U(d+1) = U(d) + tr(M1 Phi(dh) G~^h Phi(dh)^T),
/// caching the running power Phi(dh). Tables grow by doubling on demand;
/// CapacityExceeded is raised only at the hard cap.
class AgeCostTable {
 public:
  AgeCostTable(const GameSolution& sol, const MatrixXd& G, double h,
               std::size_t n_max);

  double h() const { return h_; }
  const MatrixXd& phi_h() const { return phi_h_; }
  const MatrixXd& gramian_h() const { return gramian_h_; }
  std::size_t capacity() const { return u_.size() - 1; }

  /// Age cost at integer age d; requires d <= capacity().
  double u(std::size_t d) const;

  /// sum_{l=1}^{d} U(l); requires d <= capacity().
  double prefix_sum(std::size_t d) const;

  /// Age cost at fractional age x >= 0 (in steps), evaluated through the
  /// continuous error covariance rather than table interpolation.
  double u_continuous(double x) const;

  /// Grows the table so entries up to `d` are available.
  void extend_to(std::size_t d);

  static constexpr std::size_t kHardCap = std::size_t{1} << 22;

 private:
  double h_;
  MatrixXd a_tilde_;
  MatrixXd g_;
  MatrixXd m1_;
  MatrixXd phi_h_;
  MatrixXd gramian_h_;
  MatrixXd phi_power_;          // Phi(d h) for d = next entry to append
  std::vector<double> u_;       // u_[d] = U(d), d = 0..capacity
  std::vector<double> prefix_;  // prefix_[d] = sum_{l<=d} U(l)
};

/// Convenience constructor matching the module operation signature.
AgeCostTable build_age_cost_table(const GameSolution& sol, const MatrixXd& G,
                                  double h, std::size_t n_max);

}  // namespace aoilq

#include "aoilq/discretization.hpp"

#include <cmath>
#include <string>

#include "aoilq/linalg.hpp"

namespace aoilq {

MatrixXd state_transition(const MatrixXd& A_tilde, double t) {
  if (t < 0.0) throw NonPositiveStep("state_transition: t must be >= 0");
  if (t == 0.0) return MatrixXd::Identity(A_tilde.rows(), A_tilde.cols());
  return expm(A_tilde * t);
}

MatrixXd noise_gramian(const MatrixXd& A_tilde, const MatrixXd& G, double h) {
  if (h <= 0.0) throw NonPositiveStep("noise_gramian: h must be > 0");
  return van_loan_gramian(A_tilde, G, h);
}

MatrixXd error_covariance(const MatrixXd& A_tilde, const MatrixXd& G,
                          double age) {
  if (age < 0.0) throw NonPositiveStep("error_covariance: age must be >= 0");
  if (age == 0.0) return MatrixXd::Zero(A_tilde.rows(), A_tilde.rows());
  return van_loan_gramian(A_tilde, G, age);
}

AgeCostTable::AgeCostTable(const GameSolution& sol, const MatrixXd& G,
                           double h, std::size_t n_max)
    : h_(h),
      a_tilde_(sol.A_tilde),
      g_(G),
      m1_(sol.M1),
      phi_h_(state_transition(sol.A_tilde, h)),
      gramian_h_(noise_gramian(sol.A_tilde, G, h)),
      phi_power_(MatrixXd::Identity(sol.A_tilde.rows(), sol.A_tilde.rows())) {
  if (h <= 0.0) throw NonPositiveStep("AgeCostTable: h must be > 0");
  if (n_max < 2) n_max = 2;
  u_.push_back(0.0);       // U(0) = 0
  prefix_.push_back(0.0);  // empty sum
  extend_to(n_max);
}

void AgeCostTable::extend_to(std::size_t d) {
  if (d <= capacity()) return;
  if (d > kHardCap) {
    throw CapacityExceeded("age-cost table would exceed " +
                           std::to_string(kHardCap) + " entries");
  }
  std::size_t target = capacity();
  while (target < d) target = std::min(kHardCap, std::max(target * 2, d));
  u_.reserve(target + 1);
  prefix_.reserve(target + 1);
  while (capacity() < target) {
    const double increment =
        (m1_ * phi_power_ * gramian_h_ * phi_power_.transpose()).trace();
    u_.push_back(u_.back() + std::max(increment, 0.0));
    prefix_.push_back(prefix_.back() + u_.back());
    phi_power_ = phi_h_ * phi_power_;
  }
}

double AgeCostTable::u(std::size_t d) const {
  if (d >= u_.size()) {
    throw CapacityExceeded("age cost requested beyond table capacity");
  }
  return u_[d];
}

double AgeCostTable::prefix_sum(std::size_t d) const {
  if (d >= prefix_.size()) {
    throw CapacityExceeded("age-cost prefix requested beyond table capacity");
  }
  return prefix_[d];
}

double AgeCostTable::u_continuous(double x) const {
  if (x < 0.0) throw NonPositiveStep("u_continuous: age must be >= 0");
  if (x == 0.0) return 0.0;
  return (m1_ * error_covariance(a_tilde_, g_, x * h_)).trace();
}

AgeCostTable build_age_cost_table(const GameSolution& sol, const MatrixXd& G,
                                  double h, std::size_t n_max) {
  return AgeCostTable(sol, G, h, n_max);
}

}  // namespace aoilq

#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "aoilq/discretization.hpp"
#include "aoilq/errors.hpp"

namespace aoilq {

/// Knobs for the age-of-information MDP solvers. The stage cost of the
/// Lagrangian-relaxed problem is U(age) + lambda * sense, charged before
/// the transition; sensing resets the age to 1, waiting increments it.
struct MdpConfig {
  double lambda = 0.0;   // Lagrange multiplier, >= 0
  double beta = 0.99;    // discount factor (discounted solver only)
  std::size_t n_max = 512;  // state-space truncation
  double vi_tol = 1e-9;  // sup-norm stopping tolerance
  double bisection_tol = 1e-4;  // multiplier search tolerance
  std::size_t max_sweeps = 5'000'000;

  void validate() const;
};

struct DiscountedSolution {
  std::vector<double> value;  // V(age), age = 0..n_max
  std::vector<int> action;    // greedy decision per age (1 = sense)
  std::size_t threshold = 0;  // smallest age >= 1 where sensing is optimal
  double bellman_residual = 0.0;  // sup over ages 1..n_max/2
  std::size_t sweeps = 0;
};

/// Value iteration for the beta-discounted relaxed problem. The returned
/// greedy policy is verified to be of threshold form; a policy that never
/// senses below the truncation raises TruncationTooSmall.
DiscountedSolution discounted_value_iteration(AgeCostTable& table,
                                              const MdpConfig& cfg);

struct AverageCostSolution {
  std::vector<double> f;  // relative values f(age) = V(age) - V(1)
  double average_cost = 0.0;
  std::size_t threshold = 0;
  double bellman_residual = 0.0;  // sup over ages 1..n_max/2
  std::size_t sweeps = 0;
};

/// Relative value iteration (reference state 1) for the average-cost
/// problem, run on the aperiodicity-transformed chain so the periodic
/// optimal cycle does not stall convergence.
AverageCostSolution relative_value_iteration(AgeCostTable& table,
                                             const MdpConfig& cfg);

/// Solution of U(eta + theta) * eta = sum_{l<=eta} U(l) + lambda.
struct ThresholdSolution {
  std::size_t eta_bar = 1;  // integer threshold
  double theta = 0.0;       // fractional part in [0, 1]
  double V_bar = 0.0;       // average cost U(eta + theta)
  double lambda = 0.0;
};

/// Finds the smallest integer eta admitting theta in [0, 1] that solves
/// the implicit threshold equation; U at fractional arguments is the
/// continuous error-covariance cost. The table auto-extends during the
/// scan; TableExhausted is raised when no solution exists below the hard
/// cap (flat age costs with lambda > 0).
ThresholdSolution solve_threshold_equation(AgeCostTable& table, double lambda);

/// Long-run average Lagrangian cost of the deterministic threshold-eta
/// policy over its renewal cycle: (lambda + sum_{l<=eta} U(l)) / eta.
double average_cost_of_threshold(AgeCostTable& table, std::size_t eta,
                                 double lambda);

/// (1 - beta) * V_beta(1) for each requested discount factor; the sequence
/// approaches the average cost of solve_threshold_equation as beta -> 1.
std::vector<double> vanishing_discount_check(AgeCostTable& table,
                                             double lambda,
                                             const std::vector<double>& betas,
                                             const MdpConfig& base_cfg);

enum class PolicyMode { Deterministic, Randomized };

/// Whether the Bernoulli threshold is drawn once at activation or redrawn
/// after every sensing event.
enum class RedrawMode { Once, PerCycle };

struct SensorPolicy {
  std::size_t eta_1 = 1;  // threshold at the infeasible-side multiplier
  std::size_t eta_2 = 1;  // threshold at the feasible-side multiplier
  double vartheta = 1.0;  // probability of drawing eta_1
  double lambda_star = 0.0;
  double b_1 = 0.0;  // 1 / (eta_1 h)
  double b_2 = 0.0;  // 1 / (eta_2 h)
  double h = 0.0;    // sensing grid the policy was built for
  PolicyMode mode = PolicyMode::Deterministic;
  RedrawMode redraw = RedrawMode::Once;

  /// Structural invariants: thresholds >= 1 with eta_1 <= eta_2,
  /// vartheta in [0, 1], and a deterministic policy collapses to a single
  /// threshold.
  void validate() const;
};

/// Multiplier search for the sensing budget b (expected sensing events per
/// unit time): grows the window [lambda_1, lambda_2] until the rate
/// constraint 1/eta <= b h brackets, bisects to eps, and mixes the two
/// bracketing thresholds so the expected rate meets b with equality.
/// Returns a deterministic policy when one bracketing rate already equals
/// b (within 1e-9 relative).
SensorPolicy lagrange_bisection(AgeCostTable& table, double b, double h,
                                double eps = 1e-4,
                                RedrawMode redraw = RedrawMode::Once);

/// Runtime state of a sensing policy: holds the active threshold drawn at
/// activation (and redrawn per cycle when configured). Callers own the
/// random stream, so thread confinement is theirs.
class PolicyExecutor {
 public:
  PolicyExecutor(const SensorPolicy& policy, std::mt19937_64& rng);

  /// Sensing decision for the current age (>= 1): 1 iff age reaches the
  /// active threshold.
  bool decide(std::size_t age, std::mt19937_64& rng);

  std::size_t active_threshold() const { return active_eta_; }
  const SensorPolicy& policy() const { return policy_; }

 private:
  void draw(std::mt19937_64& rng);

  SensorPolicy policy_;
  std::size_t active_eta_ = 1;
};

}  // namespace aoilq

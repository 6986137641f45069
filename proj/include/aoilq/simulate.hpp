#pragma once

#include <cstdint>
#include <vector>

#include "aoilq/game.hpp"
#include "aoilq/sensing.hpp"

namespace aoilq {

using Eigen::VectorXd;

/// How the closed-loop SDE is advanced between sensing instants.
///
/// ExactTransition draws the next state from the exact Gaussian transition
/// of the (linear) joint state/estimate dynamics over one dt step, so grid
/// samples carry no time-discretization bias. EulerMaruyama is the plain
/// first-order scheme (weak error O(dt)); it is kept for step-refinement
/// studies.
enum class IntegrationScheme { ExactTransition, EulerMaruyama };

struct SimConfig {
  double horizon_T = 5000.0;
  double dt = 0.01;  // integration step; must divide h
  double h = 0.1;    // sensing grid
  std::uint64_t seed = 0;
  SensorPolicy policy;
  std::size_t record_stride = 1;
  IntegrationScheme scheme = IntegrationScheme::ExactTransition;
  double state_guard = 1e6;  // Diverged when |x| exceeds this

  void validate() const;
  std::size_t steps_per_sense() const;  // h / dt, validated integral
};

/// Time-indexed log of one closed-loop run. Recorded rows are subsampled
/// by record_stride; the scalar summaries always cover every step.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<VectorXd> x;
  std::vector<VectorXd> x_hat;
  std::vector<VectorXd> e;   // x - x_hat at the recorded instant
  std::vector<VectorXd> u1;
  std::vector<VectorXd> u2;
  std::vector<int> sensed;
  std::vector<double> running_J;

  std::size_t n_T = 0;       // total sensing instances (t = 0 included)
  double J_empirical = 0.0;  // time average of |x|Q^2 + |u1|R1^2 - |u2|R2^2
  double error_cost_empirical = 0.0;  // time average of |e|^2_M1
  double rate_empirical = 0.0;        // n_T / T
  double horizon_T = 0.0;
  std::uint64_t seed = 0;
};

/// Closed-loop simulation: the maximizer plays its security feedback on
/// the true state, the sensing-limited minimizer runs the estimator-based
/// feedback u1 = -K1 x_hat with x_hat reset to x at policy-chosen h-grid
/// instants (t = 0 counts as sensed). Cost integrals use the trapezoid
/// rule, splitting across estimator resets. Identical configs and seeds
/// produce identical records.
TrajectoryRecord simulate(const GameSpec& spec, const GameSolution& sol,
                          const SimConfig& cfg);

struct CostDecomposition {
  double gap = 0.0;  // J_empirical - J_star
  double error_cost_empirical = 0.0;
};

/// The realized security-level gap next to the error cost that should
/// explain it: the two agree asymptotically.
CostDecomposition empirical_cost_decomposition(const TrajectoryRecord& rec,
                                               double J_star);

}  // namespace aoilq

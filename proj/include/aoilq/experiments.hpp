#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoilq/simulate.hpp"

namespace aoilq {

/// Shared settings for the sweep studies.
struct SweepOptions {
  std::size_t seeds_per_point = 20;
  double horizon_T = 5000.0;
  std::uint64_t base_seed = 0;  // run s uses seed base_seed + s
  double state_guard = 1e6;
  IntegrationScheme scheme = IntegrationScheme::ExactTransition;
  RedrawMode redraw = RedrawMode::Once;
  double bisection_tol = 1e-4;
  double dt_floor = 1e-3;  // dt = h / k with k = clamp(floor(h/dt_floor), 1, 10)
};

/// dt used for a given sensing grid under the sweep defaults.
double sweep_dt(double h, double dt_floor = 1e-3);

struct SweepResult {
  std::string axis_name;  // "h" or "b"
  std::vector<double> axis_values;
  std::vector<double> mean_cost;
  std::vector<double> std_error;
  std::size_t seeds_per_point = 0;
  double J_star = 0.0;
  std::string manifest;  // JSON echo of everything needed to re-run
};

/// Closed-loop cost versus the sensing grid h at a fixed budget. Each
/// point rebuilds the optimal policy and averages J over the seed batch;
/// points and seeds run in parallel, aggregation is ordered by index.
SweepResult sweep_h(const GameSpec& spec, double b,
                    const std::vector<double>& h_values,
                    const SweepOptions& opts);

/// Closed-loop cost versus the sensing budget b at a fixed grid h.
SweepResult sweep_budget(const GameSpec& spec, double h,
                         const std::vector<double>& b_values,
                         const SweepOptions& opts);

/// Single full-trajectory run at the optimal policy for (b, h), for
/// plotting state, error, and both control inputs.
TrajectoryRecord showcase_run(const GameSpec& spec, double b, double h,
                              double T, std::uint64_t seed,
                              std::size_t record_stride = 1,
                              const SweepOptions& opts = {});

}  // namespace aoilq

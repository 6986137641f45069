#include "aoilq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aoilq/io.hpp"
#include "aoilq/parallel.hpp"

namespace aoilq {

namespace {

ordered_json options_to_json(const SweepOptions& opts) {
  ordered_json j;
  j["seeds_per_point"] = opts.seeds_per_point;
  j["horizon_T"] = opts.horizon_T;
  j["base_seed"] = opts.base_seed;
  j["state_guard"] = opts.state_guard;
  j["scheme"] = opts.scheme == IntegrationScheme::ExactTransition
                    ? "exact"
                    : "euler_maruyama";
  j["redraw"] = opts.redraw == RedrawMode::Once ? "once" : "per_cycle";
  j["bisection_tol"] = opts.bisection_tol;
  j["dt_floor"] = opts.dt_floor;
  return j;
}

struct PointStats {
  double mean = 0.0;
  double std_error = 0.0;
};

PointStats seed_batch(const GameSpec& spec, const GameSolution& sol,
                      const SensorPolicy& policy, double h,
                      const SweepOptions& opts) {
  const std::size_t n_seeds = opts.seeds_per_point;
  std::vector<double> costs(n_seeds, 0.0);
  parallel_for(n_seeds, [&](std::size_t s) {
    SimConfig cfg;
    cfg.horizon_T = opts.horizon_T;
    cfg.dt = sweep_dt(h, opts.dt_floor);
    cfg.h = h;
    cfg.seed = opts.base_seed + s;
    cfg.policy = policy;
    cfg.record_stride = std::numeric_limits<std::size_t>::max();
    cfg.scheme = opts.scheme;
    cfg.state_guard = opts.state_guard;
    costs[s] = simulate(spec, sol, cfg).J_empirical;
  });

  PointStats stats;
  for (double c : costs) stats.mean += c;
  stats.mean /= static_cast<double>(n_seeds);
  if (n_seeds > 1) {
    double ss = 0.0;
    for (double c : costs) ss += (c - stats.mean) * (c - stats.mean);
    stats.std_error =
        std::sqrt(ss / static_cast<double>(n_seeds - 1)) /
        std::sqrt(static_cast<double>(n_seeds));
  }
  return stats;
}

SensorPolicy policy_for(const GameSolution& sol, const GameSpec& spec,
                        double b, double h, const SweepOptions& opts) {
  AgeCostTable table(sol, spec.G, h, 16);
  return lagrange_bisection(table, b, h, opts.bisection_tol, opts.redraw);
}

}  // namespace

double sweep_dt(double h, double dt_floor) {
  const double k =
      std::clamp(std::floor(h / dt_floor), 1.0, 10.0);
  return h / k;
}

SweepResult sweep_h(const GameSpec& spec, double b,
                    const std::vector<double>& h_values,
                    const SweepOptions& opts) {
  const GameSolution sol = solve_game_riccati(spec);

  SweepResult result;
  result.axis_name = "h";
  result.axis_values = h_values;
  result.seeds_per_point = opts.seeds_per_point;
  result.J_star = sol.J_star;
  result.mean_cost.resize(h_values.size());
  result.std_error.resize(h_values.size());

  for (std::size_t i = 0; i < h_values.size(); ++i) {
    const double h = h_values[i];
    const SensorPolicy policy = policy_for(sol, spec, b, h, opts);
    const PointStats stats = seed_batch(spec, sol, policy, h, opts);
    result.mean_cost[i] = stats.mean;
    result.std_error[i] = stats.std_error;
  }

  ordered_json manifest;
  manifest["axis"] = "h";
  manifest["axis_values"] = h_values;
  manifest["b"] = b;
  manifest["game"] = game_json(spec);
  manifest["options"] = options_to_json(opts);
  manifest["J_star"] = sol.J_star;
  result.manifest = manifest.dump(2);
  return result;
}

SweepResult sweep_budget(const GameSpec& spec, double h,
                         const std::vector<double>& b_values,
                         const SweepOptions& opts) {
  const GameSolution sol = solve_game_riccati(spec);

  SweepResult result;
  result.axis_name = "b";
  result.axis_values = b_values;
  result.seeds_per_point = opts.seeds_per_point;
  result.J_star = sol.J_star;
  result.mean_cost.resize(b_values.size());
  result.std_error.resize(b_values.size());

  for (std::size_t i = 0; i < b_values.size(); ++i) {
    const SensorPolicy policy = policy_for(sol, spec, b_values[i], h, opts);
    const PointStats stats = seed_batch(spec, sol, policy, h, opts);
    result.mean_cost[i] = stats.mean;
    result.std_error[i] = stats.std_error;
  }

  ordered_json manifest;
  manifest["axis"] = "b";
  manifest["axis_values"] = b_values;
  manifest["h"] = h;
  manifest["game"] = game_json(spec);
  manifest["options"] = options_to_json(opts);
  manifest["J_star"] = sol.J_star;
  result.manifest = manifest.dump(2);
  return result;
}

TrajectoryRecord showcase_run(const GameSpec& spec, double b, double h,
                              double T, std::uint64_t seed,
                              std::size_t record_stride,
                              const SweepOptions& opts) {
  const GameSolution sol = solve_game_riccati(spec);
  const SensorPolicy policy = policy_for(sol, spec, b, h, opts);

  SimConfig cfg;
  cfg.horizon_T = T;
  cfg.dt = sweep_dt(h, opts.dt_floor);
  cfg.h = h;
  cfg.seed = seed;
  cfg.policy = policy;
  cfg.record_stride = record_stride;
  cfg.scheme = opts.scheme;
  cfg.state_guard = opts.state_guard;
  return simulate(spec, sol, cfg);
}

}  // namespace aoilq

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "aoilq/experiments.hpp"
#include "aoilq/game.hpp"
#include "aoilq/sensing.hpp"
#include "aoilq/simulate.hpp"

namespace aoilq {

using ordered_json = nlohmann::ordered_json;

struct SensingConfig {
  double b = 0.4;
  double h = 0.1;
  RedrawMode redraw = RedrawMode::Once;
};

struct SimSettings {
  double horizon_T = 5000.0;
  double dt = 0.01;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;
  IntegrationScheme scheme = IntegrationScheme::ExactTransition;
  double state_guard = 1e6;
};

struct SweepSettings {
  std::vector<double> h_values{0.5, 0.25, 0.1, 0.05};
  std::vector<double> b_values{0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
  std::size_t seeds_per_point = 20;
  double horizon_T = 5000.0;
  std::uint64_t base_seed = 0;
  double state_guard = 1e6;
};

/// One parsed configuration document. Defaults are applied for omitted
/// sections; unknown keys anywhere are rejected with the offending path.
struct RunConfig {
  GameSpec game;
  SensingConfig sensing;
  MdpConfig mdp;
  SimSettings sim;
  SweepSettings sweep;
  std::string output_dir = ".";
};

/// Loads and validates a config document. Throws ConfigError with a
/// field/line diagnostic on any problem. The file itself is never
/// modified. When G or Sigma0 are omitted they default to the identity
/// and the zero matrix; the applied values are echoed into every output.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const ordered_json& doc);

ordered_json matrix_json(const MatrixXd& m);
ordered_json game_json(const GameSpec& spec);

void write_text(const std::string& path, const std::string& content);
std::string format_double(double v);  // >= 15 significant digits

ordered_json solution_json(const GameSolution& sol, const GameSpec& spec);
ordered_json policy_json(const SensorPolicy& policy, double V_bar,
                         const GameSpec& spec, const SensingConfig& sensing);
ordered_json summary_json(const TrajectoryRecord& rec, double J_star,
                          const GameSpec& spec, const SimSettings& sim,
                          const SensorPolicy& policy);

std::string trajectory_csv(const TrajectoryRecord& rec);
std::string age_costs_csv(const AgeCostTable& table, std::size_t up_to);
std::string value_iteration_csv(const DiscountedSolution& sol);
std::string sweep_csv(const SweepResult& result);

}  // namespace aoilq

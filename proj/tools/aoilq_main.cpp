#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "aoilq/io.hpp"

namespace {

using namespace aoilq;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

SensorPolicy build_policy(const RunConfig& cfg, const GameSolution& sol) {
  AgeCostTable table(sol, cfg.game.G, cfg.sensing.h, 16);
  return lagrange_bisection(table, cfg.sensing.b, cfg.sensing.h,
                            cfg.mdp.bisection_tol, cfg.sensing.redraw);
}

void warn_indefinite(const GameSolution& sol) {
  if (sol.Q_tilde_indefinite) {
    std::cerr << "warning: Q_tilde is indefinite; the transformed problem "
                 "is still solved through the original Riccati solution\n";
  }
}

int run_solve(const RunConfig& cfg, const std::string& out_dir) {
  const GameSolution sol = solve_game_riccati(cfg.game);
  warn_indefinite(sol);
  const std::string path = join(out_dir, "solution.json");
  write_text(path, solution_json(sol, cfg.game).dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run_policy(const RunConfig& cfg, const std::string& out_dir,
               bool dump_age_costs, bool dump_vi) {
  const GameSolution sol = solve_game_riccati(cfg.game);
  warn_indefinite(sol);
  AgeCostTable table(sol, cfg.game.G, cfg.sensing.h, 16);
  const SensorPolicy policy =
      lagrange_bisection(table, cfg.sensing.b, cfg.sensing.h,
                         cfg.mdp.bisection_tol, cfg.sensing.redraw);
  const ThresholdSolution at_star =
      solve_threshold_equation(table, policy.lambda_star);

  const std::string path = join(out_dir, "policy.json");
  write_text(path,
             policy_json(policy, at_star.V_bar, cfg.game, cfg.sensing).dump(2) +
                 "\n");
  std::cout << "wrote " << path << "\n";

  if (dump_age_costs) {
    const std::size_t up_to = policy.eta_2 + 10;
    table.extend_to(up_to);
    const std::string csv_path = join(out_dir, "age_costs.csv");
    write_text(csv_path, age_costs_csv(table, up_to));
    std::cout << "wrote " << csv_path << "\n";
  }
  if (dump_vi) {
    MdpConfig mdp = cfg.mdp;
    mdp.lambda = policy.lambda_star;
    const DiscountedSolution vi = discounted_value_iteration(table, mdp);
    const std::string csv_path = join(out_dir, "value_iteration.csv");
    write_text(csv_path, value_iteration_csv(vi));
    std::cout << "wrote " << csv_path << "\n";
  }
  return 0;
}

int run_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const GameSolution sol = solve_game_riccati(cfg.game);
  warn_indefinite(sol);
  const SensorPolicy policy = build_policy(cfg, sol);

  SimConfig sim;
  sim.horizon_T = cfg.sim.horizon_T;
  sim.dt = cfg.sim.dt;
  sim.h = cfg.sensing.h;
  sim.seed = cfg.sim.seed;
  sim.policy = policy;
  sim.record_stride = cfg.sim.record_stride;
  sim.scheme = cfg.sim.scheme;
  sim.state_guard = cfg.sim.state_guard;

  const TrajectoryRecord rec = simulate(cfg.game, sol, sim);

  const std::string traj_path = join(out_dir, "trajectory.csv");
  write_text(traj_path, trajectory_csv(rec));
  const std::string summary_path = join(out_dir, "summary.json");
  write_text(summary_path,
             summary_json(rec, sol.J_star, cfg.game, cfg.sim, policy).dump(2) +
                 "\n");
  std::cout << "wrote " << traj_path << "\n"
            << "wrote " << summary_path << "\n";
  return 0;
}

int run_sweep(const RunConfig& cfg, const std::string& out_dir,
              const std::string& axis) {
  SweepOptions opts;
  opts.seeds_per_point = cfg.sweep.seeds_per_point;
  opts.horizon_T = cfg.sweep.horizon_T;
  opts.base_seed = cfg.sweep.base_seed;
  opts.state_guard = cfg.sweep.state_guard;
  opts.scheme = cfg.sim.scheme;
  opts.redraw = cfg.sensing.redraw;
  opts.bisection_tol = cfg.mdp.bisection_tol;

  const SweepResult result =
      axis == "h" ? sweep_h(cfg.game, cfg.sensing.b, cfg.sweep.h_values, opts)
                  : sweep_budget(cfg.game, cfg.sensing.h, cfg.sweep.b_values,
                                 opts);

  const std::string csv_path = join(out_dir, "sweep_" + axis + ".csv");
  write_text(csv_path, sweep_csv(result));
  const std::string manifest_path =
      join(out_dir, "sweep_" + axis + "_manifest.json");
  write_text(manifest_path, result.manifest + "\n");
  std::cout << "wrote " << csv_path << "\n"
            << "wrote " << manifest_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LQ zero-sum differential game under intermittent sensing: "
               "Riccati solver, sensing policy synthesis, closed-loop "
               "simulation, and parameter sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string axis = "h";
  std::optional<std::uint64_t> seed_override;
  bool dump_age_costs = false;
  bool dump_vi = false;

  auto* solve_cmd = app.add_subcommand("solve", "solve the game Riccati equation");
  auto* policy_cmd = app.add_subcommand("policy", "compute the optimal sensing policy");
  auto* simulate_cmd = app.add_subcommand("simulate", "run one closed-loop simulation");
  auto* sweep_cmd = app.add_subcommand("sweep", "cost sweep over h or b");

  for (auto* cmd : {solve_cmd, policy_cmd, simulate_cmd, sweep_cmd}) {
    cmd->add_option("--config", config_path, "configuration JSON")->required();
    cmd->add_option("--output", output_dir,
                    "output directory (default: config output_dir)");
    cmd->add_option("--seed", seed_override, "seed override");
  }
  policy_cmd->add_flag("--dump-age-costs", dump_age_costs,
                       "write age_costs.csv alongside the policy");
  policy_cmd->add_flag("--dump-vi", dump_vi,
                       "write the discounted value function CSV");
  sweep_cmd->add_option("--axis", axis, "sweep axis")
      ->check(CLI::IsMember({"h", "b"}))
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_override) {
      cfg.sim.seed = *seed_override;
      cfg.sweep.base_seed = *seed_override;
    }
    const std::string out_dir =
        output_dir.empty() ? cfg.output_dir : output_dir;
    std::filesystem::create_directories(out_dir);

    if (app.got_subcommand(solve_cmd)) return run_solve(cfg, out_dir);
    if (app.got_subcommand(policy_cmd)) {
      return run_policy(cfg, out_dir, dump_age_costs, dump_vi);
    }
    if (app.got_subcommand(simulate_cmd)) return run_simulate(cfg, out_dir);
    return run_sweep(cfg, out_dir, axis);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const ConfigMismatch& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const DimensionMismatch& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const NoStabilizingSolution& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return 2;
  } catch (const Diverged& err) {
    std::cerr << "simulation error: " << err.what() << "\n";
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}

#include "aoilq/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace aoilq {

namespace {

void reject_unknown_keys(const ordered_json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double number_at(const ordered_json& obj, const std::string& where,
                 const std::string& key, double fallback,
                 bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(where + "." + key + " is required");
    return fallback;
  }
  if (!obj[key].is_number()) {
    throw ConfigError(where + "." + key + " must be a number");
  }
  return obj[key].get<double>();
}

MatrixXd matrix_at(const ordered_json& obj, const std::string& where,
                   const std::string& key) {
  const std::string path = where + "." + key;
  if (!obj.contains(key)) throw ConfigError(path + " is required");
  const auto& rows = obj[key];
  if (!rows.is_array() || rows.empty()) {
    throw ConfigError(path + " must be a non-empty array of rows");
  }
  const std::size_t n_rows = rows.size();
  std::size_t n_cols = 0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (!rows[i].is_array() || rows[i].empty()) {
      throw ConfigError(path + " rows must be non-empty arrays");
    }
    if (i == 0) {
      n_cols = rows[i].size();
    } else if (rows[i].size() != n_cols) {
      throw ConfigError(path + " rows have unequal lengths");
    }
  }
  MatrixXd m(n_rows, n_cols);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (!rows[i][j].is_number()) {
        throw ConfigError(path + " entries must be numbers");
      }
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

GameSpec parse_game(const ordered_json& obj) {
  reject_unknown_keys(obj, "game",
                      {"A", "B1", "B2", "G", "Q", "R1", "R2", "Sigma0"});
  GameSpec spec;
  spec.A = matrix_at(obj, "game", "A");
  spec.B1 = matrix_at(obj, "game", "B1");
  spec.B2 = matrix_at(obj, "game", "B2");
  spec.Q = matrix_at(obj, "game", "Q");
  spec.R1 = matrix_at(obj, "game", "R1");
  spec.R2 = matrix_at(obj, "game", "R2");
  const auto n = spec.A.rows();
  spec.G = obj.contains("G") ? matrix_at(obj, "game", "G")
                             : MatrixXd::Identity(n, n);
  spec.Sigma0 = obj.contains("Sigma0") ? matrix_at(obj, "game", "Sigma0")
                                       : MatrixXd::Zero(n, n).eval();
  return spec;
}

RedrawMode parse_redraw(const ordered_json& obj, const std::string& where) {
  const std::string value = obj.value("redraw", "once");
  if (value == "once") return RedrawMode::Once;
  if (value == "per_cycle") return RedrawMode::PerCycle;
  throw ConfigError(where + ".redraw must be \"once\" or \"per_cycle\"");
}

}  // namespace

RunConfig parse_config(const ordered_json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(doc, "config root",
                      {"game", "sensing", "mdp", "sim", "sweep", "output_dir"});
  if (!doc.contains("game")) throw ConfigError("game section is required");

  RunConfig cfg;
  cfg.game = parse_game(doc["game"]);
  cfg.game.validate();

  if (doc.contains("sensing")) {
    const auto& s = doc["sensing"];
    reject_unknown_keys(s, "sensing", {"b", "h", "redraw"});
    cfg.sensing.b = number_at(s, "sensing", "b", cfg.sensing.b);
    cfg.sensing.h = number_at(s, "sensing", "h", cfg.sensing.h);
    cfg.sensing.redraw = parse_redraw(s, "sensing");
    if (cfg.sensing.b <= 0.0) throw ConfigError("sensing.b must be > 0");
    if (cfg.sensing.h <= 0.0) throw ConfigError("sensing.h must be > 0");
  }

  if (doc.contains("mdp")) {
    const auto& m = doc["mdp"];
    reject_unknown_keys(
        m, "mdp", {"lambda", "beta", "N_max", "vi_tol", "bisection_tol"});
    cfg.mdp.lambda = number_at(m, "mdp", "lambda", cfg.mdp.lambda);
    cfg.mdp.beta = number_at(m, "mdp", "beta", cfg.mdp.beta);
    cfg.mdp.n_max = static_cast<std::size_t>(
        number_at(m, "mdp", "N_max", static_cast<double>(cfg.mdp.n_max)));
    cfg.mdp.vi_tol = number_at(m, "mdp", "vi_tol", cfg.mdp.vi_tol);
    cfg.mdp.bisection_tol =
        number_at(m, "mdp", "bisection_tol", cfg.mdp.bisection_tol);
    cfg.mdp.validate();
  }

  if (doc.contains("sim")) {
    const auto& s = doc["sim"];
    reject_unknown_keys(s, "sim",
                        {"horizon_T", "dt", "seed", "record_stride", "scheme",
                         "state_guard"});
    cfg.sim.horizon_T = number_at(s, "sim", "horizon_T", cfg.sim.horizon_T);
    cfg.sim.dt = number_at(s, "sim", "dt", cfg.sim.dt);
    cfg.sim.seed = static_cast<std::uint64_t>(
        number_at(s, "sim", "seed", static_cast<double>(cfg.sim.seed)));
    cfg.sim.record_stride = static_cast<std::size_t>(number_at(
        s, "sim", "record_stride", static_cast<double>(cfg.sim.record_stride)));
    cfg.sim.state_guard =
        number_at(s, "sim", "state_guard", cfg.sim.state_guard);
    const std::string scheme = s.value("scheme", "exact");
    if (scheme == "exact") {
      cfg.sim.scheme = IntegrationScheme::ExactTransition;
    } else if (scheme == "euler_maruyama") {
      cfg.sim.scheme = IntegrationScheme::EulerMaruyama;
    } else {
      throw ConfigError("sim.scheme must be \"exact\" or \"euler_maruyama\"");
    }
  }

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    reject_unknown_keys(s, "sweep",
                        {"h_values", "b_values", "seeds_per_point",
                         "horizon_T", "base_seed", "state_guard"});
    const auto list_at = [&](const char* key, std::vector<double> fallback) {
      if (!s.contains(key)) return fallback;
      if (!s[key].is_array() || s[key].empty()) {
        throw ConfigError(std::string("sweep.") + key +
                          " must be a non-empty array");
      }
      std::vector<double> values;
      for (const auto& v : s[key]) {
        if (!v.is_number()) {
          throw ConfigError(std::string("sweep.") + key +
                            " entries must be numbers");
        }
        values.push_back(v.get<double>());
      }
      return values;
    };
    cfg.sweep.h_values = list_at("h_values", cfg.sweep.h_values);
    cfg.sweep.b_values = list_at("b_values", cfg.sweep.b_values);
    cfg.sweep.seeds_per_point = static_cast<std::size_t>(
        number_at(s, "sweep", "seeds_per_point",
                  static_cast<double>(cfg.sweep.seeds_per_point)));
    cfg.sweep.horizon_T =
        number_at(s, "sweep", "horizon_T", cfg.sweep.horizon_T);
    cfg.sweep.base_seed = static_cast<std::uint64_t>(number_at(
        s, "sweep", "base_seed", static_cast<double>(cfg.sweep.base_seed)));
    cfg.sweep.state_guard =
        number_at(s, "sweep", "state_guard", cfg.sweep.state_guard);
  }

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) {
      throw ConfigError("output_dir must be a string");
    }
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + err.what());
  }
  return parse_config(doc);
}

ordered_json matrix_json(const MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json game_json(const GameSpec& spec) {
  ordered_json j;
  j["A"] = matrix_json(spec.A);
  j["B1"] = matrix_json(spec.B1);
  j["B2"] = matrix_json(spec.B2);
  j["G"] = matrix_json(spec.G);
  j["Q"] = matrix_json(spec.Q);
  j["R1"] = matrix_json(spec.R1);
  j["R2"] = matrix_json(spec.R2);
  j["Sigma0"] = matrix_json(spec.Sigma0);
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json solution_json(const GameSolution& sol, const GameSpec& spec) {
  ordered_json j;
  j["P"] = matrix_json(sol.P);
  j["K1"] = matrix_json(sol.K1);
  j["K2"] = matrix_json(sol.K2);
  j["A_tilde"] = matrix_json(sol.A_tilde);
  j["Q_tilde"] = matrix_json(sol.Q_tilde);
  j["M1"] = matrix_json(sol.M1);
  j["M2"] = matrix_json(sol.M2);
  j["J_star"] = sol.J_star;
  j["residual_norm"] = sol.residual_norm;
  j["Q_tilde_indefinite"] = sol.Q_tilde_indefinite;
  j["game"] = game_json(spec);
  return j;
}

ordered_json policy_json(const SensorPolicy& policy, double V_bar,
                         const GameSpec& spec, const SensingConfig& sensing) {
  ordered_json j;
  j["lambda_star"] = policy.lambda_star;
  j["eta_1"] = policy.eta_1;
  j["eta_2"] = policy.eta_2;
  j["vartheta"] = policy.vartheta;
  j["b_1"] = policy.b_1;
  j["b_2"] = policy.b_2;
  j["V_bar"] = V_bar;
  j["mode"] =
      policy.mode == PolicyMode::Deterministic ? "deterministic" : "randomized";
  j["redraw"] = policy.redraw == RedrawMode::Once ? "once" : "per_cycle";
  j["h"] = policy.h;
  j["b"] = sensing.b;
  j["game"] = game_json(spec);
  return j;
}

ordered_json summary_json(const TrajectoryRecord& rec, double J_star,
                          const GameSpec& spec, const SimSettings& sim,
                          const SensorPolicy& policy) {
  ordered_json j;
  j["J_empirical"] = rec.J_empirical;
  j["J_star"] = J_star;
  j["gap"] = rec.J_empirical - J_star;
  j["error_cost_empirical"] = rec.error_cost_empirical;
  j["n_T"] = rec.n_T;
  j["rate_empirical"] = rec.rate_empirical;
  j["seed"] = rec.seed;
  j["horizon_T"] = rec.horizon_T;
  j["dt"] = sim.dt;
  j["h"] = policy.h;
  j["scheme"] = sim.scheme == IntegrationScheme::ExactTransition
                    ? "exact"
                    : "euler_maruyama";
  j["policy"]["eta_1"] = policy.eta_1;
  j["policy"]["eta_2"] = policy.eta_2;
  j["policy"]["vartheta"] = policy.vartheta;
  j["policy"]["mode"] =
      policy.mode == PolicyMode::Deterministic ? "deterministic" : "randomized";
  j["game"] = game_json(spec);
  return j;
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
  std::ostringstream out;
  const auto n = rec.x.empty() ? 0 : rec.x.front().size();
  const auto m1 = rec.u1.empty() ? 0 : rec.u1.front().size();
  const auto m2 = rec.u2.empty() ? 0 : rec.u2.front().size();

  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",xhat_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",e_" << i;
  for (Eigen::Index i = 1; i <= m1; ++i) out << ",u1_" << i;
  for (Eigen::Index i = 1; i <= m2; ++i) out << ",u2_" << i;
  out << ",sensed,running_J\n";

  const auto put = [&](const VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out << ',' << format_double(v[i]);
    }
  };
  for (std::size_t row = 0; row < rec.times.size(); ++row) {
    out << format_double(rec.times[row]);
    put(rec.x[row]);
    put(rec.x_hat[row]);
    put(rec.e[row]);
    put(rec.u1[row]);
    put(rec.u2[row]);
    out << ',' << rec.sensed[row] << ',' << format_double(rec.running_J[row])
        << '\n';
  }
  return out.str();
}

std::string age_costs_csv(const AgeCostTable& table, std::size_t up_to) {
  std::ostringstream out;
  out << "delta,u\n";
  for (std::size_t d = 0; d <= up_to; ++d) {
    out << d << ',' << format_double(table.u(d)) << '\n';
  }
  return out.str();
}

std::string value_iteration_csv(const DiscountedSolution& sol) {
  std::ostringstream out;
  out << "delta,value,action\n";
  for (std::size_t d = 0; d < sol.value.size(); ++d) {
    out << d << ',' << format_double(sol.value[d]) << ',' << sol.action[d]
        << '\n';
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "axis_value,mean_cost,stderr,n_seeds,J_star\n";
  for (std::size_t i = 0; i < result.axis_values.size(); ++i) {
    out << format_double(result.axis_values[i]) << ','
        << format_double(result.mean_cost[i]) << ','
        << format_double(result.std_error[i]) << ',' << result.seeds_per_point
        << ',' << format_double(result.J_star) << '\n';
  }
  return out.str();
}

}  // namespace aoilq

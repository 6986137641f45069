#include "aoilq/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aoilq {

void SensorPolicy::validate() const {
  if (eta_1 < 1 || eta_2 < 1) throw ConfigError("thresholds must be >= 1");
  if (eta_1 > eta_2) throw ConfigError("eta_1 must not exceed eta_2");
  if (!(vartheta >= 0.0 && vartheta <= 1.0)) {
    throw ConfigError("vartheta must lie in [0, 1]");
  }
  if (mode == PolicyMode::Deterministic && eta_1 != eta_2) {
    throw ConfigError("deterministic policy must have a single threshold");
  }
  if (h <= 0.0) throw ConfigError("policy h must be > 0");
}

void MdpConfig::validate() const {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (vi_tol <= 0.0) throw ConfigError("vi_tol must be > 0");
  if (bisection_tol <= 0.0) throw ConfigError("bisection_tol must be > 0");
  if (n_max < 4) throw ConfigError("N_max must be at least 4");
}

namespace {

// One Bellman sweep of the discounted operator. State n_max forces a
// sensing action so the truncation cannot be escaped upward.
void discounted_sweep(const AgeCostTable& table, const MdpConfig& cfg,
                      const std::vector<double>& v, std::vector<double>& out) {
  const std::size_t n = cfg.n_max;
  const double sense_tail = cfg.lambda + cfg.beta * v[1];
  for (std::size_t age = 0; age < n; ++age) {
    out[age] = table.u(age) + std::min(sense_tail, cfg.beta * v[age + 1]);
  }
  out[n] = table.u(n) + sense_tail;
}

std::vector<int> greedy_actions(const MdpConfig& cfg,
                                const std::vector<double>& v) {
  const std::size_t n = cfg.n_max;
  std::vector<int> action(n + 1, 0);
  const double sense_tail = cfg.lambda + cfg.beta * v[1];
  for (std::size_t age = 0; age <= n; ++age) {
    // Ties resolve toward sensing, which yields the smallest threshold.
    action[age] = (age == n || sense_tail <= cfg.beta * v[age + 1]) ? 1 : 0;
  }
  return action;
}

std::size_t threshold_of(const std::vector<int>& action,
                         std::size_t n_max) {
  for (std::size_t age = 1; age <= n_max; ++age) {
    if (action[age] == 1) return age;
  }
  return n_max;
}

void check_threshold_form(const std::vector<int>& action, std::size_t n_max) {
  for (std::size_t age = 2; age <= n_max; ++age) {
    if (action[age] < action[age - 1]) {
      throw Error("greedy policy is not of threshold form at age " +
                  std::to_string(age));
    }
  }
}

}  // namespace

DiscountedSolution discounted_value_iteration(AgeCostTable& table,
                                              const MdpConfig& cfg) {
  cfg.validate();
  table.extend_to(cfg.n_max + 1);

  const std::size_t n = cfg.n_max;
  std::vector<double> v(n + 1, 0.0), next(n + 1, 0.0);
  const double stop = cfg.vi_tol * (1.0 - cfg.beta) / (2.0 * cfg.beta);
  std::size_t sweeps = 0;
  for (; sweeps < cfg.max_sweeps; ++sweeps) {
    discounted_sweep(table, cfg, v, next);
    double change = 0.0;
    for (std::size_t age = 0; age <= n; ++age) {
      change = std::max(change, std::abs(next[age] - v[age]));
    }
    v.swap(next);
    if (change <= stop) break;
  }
  if (sweeps == cfg.max_sweeps) {
    throw NoConvergence("discounted value iteration hit the sweep cap");
  }

  DiscountedSolution sol;
  sol.sweeps = sweeps + 1;
  sol.action = greedy_actions(cfg, v);
  check_threshold_form(sol.action, n);
  sol.threshold = threshold_of(sol.action, n);
  if (sol.threshold == n) {
    throw TruncationTooSmall(
        "greedy policy never senses below N_max = " + std::to_string(n));
  }

  discounted_sweep(table, cfg, v, next);
  double residual = 0.0;
  for (std::size_t age = 1; age <= n / 2; ++age) {
    residual = std::max(residual, std::abs(next[age] - v[age]));
  }
  sol.bellman_residual = residual;
  sol.value = std::move(v);
  return sol;
}

AverageCostSolution relative_value_iteration(AgeCostTable& table,
                                             const MdpConfig& cfg) {
  cfg.validate();
  table.extend_to(cfg.n_max + 1);

  const std::size_t n = cfg.n_max;
  // Aperiodicity transform: the optimal cycle 1 -> ... -> eta -> 1 is
  // periodic, so iterate on the damped chain P' = (I + P)/2 with halved
  // stage costs. Fixed points coincide; the gain comes out halved.
  //
  // Convergence is judged on ages up to n/2 + 1 (the range the residual
  // is certified on) with a magnitude-aware tolerance: tail relative
  // values inherit the age cost's scale, where double rounding alone
  // exceeds any absolute tolerance.
  const double damp = 0.5;
  const std::size_t span_range = n / 2 + 1;
  std::vector<double> f(n + 1, 0.0), tf(n + 1, 0.0);
  double gain = 0.0;
  std::size_t sweeps = 0;
  for (; sweeps < cfg.max_sweeps; ++sweeps) {
    for (std::size_t age = 0; age <= n; ++age) {
      const double sense = cfg.lambda + f[1];
      const double wait =
          (age < n) ? f[age + 1] : std::numeric_limits<double>::infinity();
      tf[age] = damp * (table.u(age) + std::min(sense, wait)) + damp * f[age];
    }
    gain = tf[1];
    double span_max = -std::numeric_limits<double>::infinity();
    double span_min = std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (std::size_t age = 0; age <= n; ++age) {
      if (age <= span_range) {
        const double diff = tf[age] - f[age];
        span_max = std::max(span_max, diff);
        span_min = std::min(span_min, diff);
        scale = std::max(scale, std::abs(tf[age]));
      }
      f[age] = tf[age] - gain;
    }
    const double rounding_floor =
        8.0 * std::numeric_limits<double>::epsilon() * scale;
    if (span_max - span_min <= damp * std::max(cfg.vi_tol, rounding_floor)) {
      break;
    }
  }
  if (sweeps == cfg.max_sweeps) {
    throw NoConvergence("relative value iteration hit the sweep cap");
  }

  AverageCostSolution sol;
  sol.sweeps = sweeps + 1;
  sol.average_cost = gain / damp;
  sol.f = f;

  std::vector<int> action(n + 1, 0);
  for (std::size_t age = 0; age <= n; ++age) {
    action[age] = (age == n || cfg.lambda + f[1] <= f[age + 1]) ? 1 : 0;
  }
  check_threshold_form(action, n);
  sol.threshold = threshold_of(action, n);

  // Residual of the untransformed average-cost Bellman equation.
  double residual = 0.0;
  for (std::size_t age = 1; age <= n / 2; ++age) {
    const double rhs = table.u(age) +
                       std::min(cfg.lambda + f[1], f[age + 1]);
    residual = std::max(residual, std::abs(sol.average_cost + f[age] - rhs));
  }
  sol.bellman_residual = residual;
  return sol;
}

namespace {

double cycle_cost(const AgeCostTable& table, std::size_t eta, double lambda) {
  return (lambda + table.prefix_sum(eta)) / static_cast<double>(eta);
}

// Smallest eta for which theta in [0, 1] solves the implicit equation,
// i.e. the first eta whose cycle average is overtaken by U(eta + 1).
// Returns at most `cap`; callers that only need feasibility treat a
// capped return as "threshold at least cap".
std::size_t scan_threshold(AgeCostTable& table, double lambda,
                           std::size_t cap) {
  std::size_t eta = 1;
  for (;; ++eta) {
    if (eta >= cap) return cap;
    try {
      table.extend_to(eta + 1);
    } catch (const CapacityExceeded&) {
      throw TableExhausted(
          "threshold equation has no solution below the table cap "
          "(flat age costs with lambda > 0?)");
    }
    const double g = cycle_cost(table, eta, lambda);
    const double u_next = table.u(eta + 1);
    if (g <= u_next + 1e-12 * (1.0 + std::abs(u_next))) return eta;
  }
}

}  // namespace

ThresholdSolution solve_threshold_equation(AgeCostTable& table, double lambda) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  const std::size_t eta = scan_threshold(table, lambda, AgeCostTable::kHardCap);
  if (eta == AgeCostTable::kHardCap) {
    throw TableExhausted("threshold equation unsolved at the hard cap");
  }

  ThresholdSolution sol;
  sol.eta_bar = eta;
  sol.lambda = lambda;
  sol.V_bar = cycle_cost(table, eta, lambda);

  // theta solves U(eta + theta) = V_bar on [0, 1]; U is continuous and
  // nondecreasing there, so plain bisection suffices.
  double lo = 0.0, hi = 1.0;
  if (table.u_continuous(static_cast<double>(eta) + 1.0) <= sol.V_bar) {
    sol.theta = 1.0;
    return sol;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (table.u_continuous(static_cast<double>(eta) + mid) < sol.V_bar) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  sol.theta = 0.5 * (lo + hi);
  return sol;
}

double average_cost_of_threshold(AgeCostTable& table, std::size_t eta,
                                 double lambda) {
  if (eta < 1) throw ConfigError("threshold must be >= 1");
  table.extend_to(eta);
  return cycle_cost(table, eta, lambda);
}

std::vector<double> vanishing_discount_check(AgeCostTable& table,
                                             double lambda,
                                             const std::vector<double>& betas,
                                             const MdpConfig& base_cfg) {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (betas[i] <= 0.0 || betas[i] >= 1.0 ||
        (i > 0 && betas[i] <= betas[i - 1])) {
      throw ConfigError("betas must increase strictly toward 1");
    }
  }
  std::vector<double> scaled;
  scaled.reserve(betas.size());
  MdpConfig cfg = base_cfg;
  cfg.lambda = lambda;
  for (double beta : betas) {
    cfg.beta = beta;
    const DiscountedSolution sol = discounted_value_iteration(table, cfg);
    scaled.push_back((1.0 - beta) * sol.value[1]);
  }
  return scaled;
}

namespace {

SensorPolicy deterministic_policy(std::size_t eta, double lambda_star,
                                  double h, RedrawMode redraw) {
  SensorPolicy policy;
  policy.eta_1 = policy.eta_2 = eta;
  policy.vartheta = 1.0;
  policy.lambda_star = lambda_star;
  policy.b_1 = policy.b_2 = 1.0 / (static_cast<double>(eta) * h);
  policy.h = h;
  policy.mode = PolicyMode::Deterministic;
  policy.redraw = redraw;
  return policy;
}

}  // namespace

SensorPolicy lagrange_bisection(AgeCostTable& table, double b, double h,
                                double eps, RedrawMode redraw) {
  if (b <= 0.0) throw ConfigError("budget b must be > 0");
  if (h <= 0.0) throw NonPositiveStep("h must be > 0");
  if (eps <= 0.0) throw ConfigError("eps must be > 0");
  if (std::abs(h - table.h()) > 1e-12 * (1.0 + h)) {
    throw ConfigMismatch("age-cost table was built for a different h");
  }

  const double bh = b * h;
  if (bh < 1.0 / static_cast<double>(AgeCostTable::kHardCap)) {
    throw TableExhausted("budget requires thresholds beyond the table cap");
  }
  // Smallest integer threshold satisfying the per-step rate bound
  // 1/eta <= b h; the 1e-9 slack absorbs floating-point dust so exact
  // budgets such as 1/(eta h) land on the intended integer.
  const std::size_t eta_req = (bh >= 1.0)
      ? 1
      : static_cast<std::size_t>(std::ceil(1.0 / bh - 1e-9));
  const std::size_t scan_cap = eta_req + 1024;
  // Thresholds scale like 1/(bh); keep the table comfortably beyond that.
  table.extend_to(std::min(10 * eta_req, AgeCostTable::kHardCap));

  // Constraint slack at lambda = 0: the unconstrained optimum is feasible.
  std::size_t eta0 = scan_threshold(table, 0.0, scan_cap);
  if (eta0 >= scan_cap) eta0 = eta_req;
  if (eta0 >= eta_req) {
    return deterministic_policy(eta0, 0.0, h, redraw);
  }

  // Flat age costs make every feasible threshold optimal; pick the
  // cheapest feasible one instead of chasing an unbounded multiplier.
  table.extend_to(eta_req + 1);
  if (table.u(eta_req + 1) <= 0.0) {
    return deterministic_policy(eta_req, 0.0, h, redraw);
  }

  const auto feasible = [&](double lambda) {
    return scan_threshold(table, lambda, scan_cap) >= eta_req;
  };

  // Window growth. A fixed +1 widening would be O(lambda*), and lambda*
  // scales like eta * U(eta) -- around 1e24 for tight budgets on unstable
  // error dynamics. Doubling reaches a valid bracket in O(log lambda*)
  // steps and the bisection below converges to the same jump multiplier.
  double lambda_lo = 0.0, lambda_hi = 1.0;
  while (!feasible(lambda_hi)) {
    lambda_lo = lambda_hi;
    lambda_hi *= 2.0;
    if (!std::isfinite(lambda_hi)) {
      throw TableExhausted("no feasible multiplier found");
    }
  }

  // Bisection keeps lambda_lo infeasible and lambda_hi feasible. eps is
  // absolute, so also stop once the midpoint degenerates (huge lambda*
  // exhausts double spacing long before eps).
  while (lambda_hi - lambda_lo >= eps) {
    const double mid = 0.5 * (lambda_lo + lambda_hi);
    if (mid <= lambda_lo || mid >= lambda_hi) break;
    (feasible(mid) ? lambda_hi : lambda_lo) = mid;
  }

  const std::size_t eta_1 = scan_threshold(table, lambda_lo, scan_cap);
  std::size_t eta_2 = scan_threshold(table, lambda_hi, scan_cap);
  if (eta_2 >= scan_cap) eta_2 = eta_req;
  const double lambda_star = 0.5 * (lambda_lo + lambda_hi);

  const double b_1 = 1.0 / (static_cast<double>(eta_1) * h);
  const double b_2 = 1.0 / (static_cast<double>(eta_2) * h);
  if (std::abs(b_1 - b) <= 1e-9 * b) {
    return deterministic_policy(eta_1, lambda_star, h, redraw);
  }
  if (std::abs(b_2 - b) <= 1e-9 * b) {
    return deterministic_policy(eta_2, lambda_star, h, redraw);
  }
  if (eta_1 == eta_2) {
    throw DegenerateBracket(
        "bracket collapsed to a single threshold; widen eps");
  }

  SensorPolicy policy;
  policy.eta_1 = eta_1;
  policy.eta_2 = eta_2;
  policy.vartheta = (b - b_2) / (b_1 - b_2);
  policy.lambda_star = lambda_star;
  policy.b_1 = b_1;
  policy.b_2 = b_2;
  policy.h = h;
  policy.mode = PolicyMode::Randomized;
  policy.redraw = redraw;
  return policy;
}

PolicyExecutor::PolicyExecutor(const SensorPolicy& policy,
                               std::mt19937_64& rng)
    : policy_(policy) {
  policy_.validate();
  draw(rng);
}

void PolicyExecutor::draw(std::mt19937_64& rng) {
  if (policy_.mode == PolicyMode::Deterministic) {
    active_eta_ = policy_.eta_1;
    return;
  }
  std::bernoulli_distribution pick_first(policy_.vartheta);
  active_eta_ = pick_first(rng) ? policy_.eta_1 : policy_.eta_2;
}

bool PolicyExecutor::decide(std::size_t age, std::mt19937_64& rng) {
  const bool sense = age >= active_eta_;
  if (sense && policy_.mode == PolicyMode::Randomized &&
      policy_.redraw == RedrawMode::PerCycle) {
    draw(rng);
  }
  return sense;
}

}  // namespace aoilq

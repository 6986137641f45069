#include "aoilq/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "aoilq/linalg.hpp"

namespace aoilq {

void SimConfig::validate() const {
  if (dt <= 0.0) throw ConfigError("dt must be > 0");
  if (h <= 0.0) throw ConfigError("h must be > 0");
  if (horizon_T < h) throw ConfigError("horizon_T must be at least h");
  if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
  if (state_guard <= 0.0) throw ConfigError("state_guard must be > 0");
  const double ratio = h / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("h must be an integer multiple of dt");
  }
  policy.validate();
  if (std::abs(policy.h - h) > 1e-12 * (1.0 + h)) {
    throw ConfigMismatch("policy was built for h = " +
                         std::to_string(policy.h) + ", simulation uses h = " +
                         std::to_string(h));
  }
}

std::size_t SimConfig::steps_per_sense() const {
  return static_cast<std::size_t>(std::llround(h / dt));
}

namespace {

// Factor of a PSD matrix with eigenvalues clamped at zero, suitable for
// sampling N(0, m) as factor * standard_normals.
MatrixXd psd_factor(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  const VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clamped.cwiseSqrt().asDiagonal();
}

// Incremental mean with uniform weights; keeps long horizons stable.
class StreamingMean {
 public:
  void add(double value) {
    ++count_;
    mean_ += (value - mean_) / static_cast<double>(count_);
  }
  double mean() const { return mean_; }

 private:
  double mean_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace

TrajectoryRecord simulate(const GameSpec& spec, const GameSolution& sol,
                          const SimConfig& cfg) {
  spec.validate();
  cfg.validate();

  const auto n = spec.state_dim();
  const auto p = spec.G.cols();
  const std::size_t steps = static_cast<std::size_t>(
      std::llround(cfg.horizon_T / cfg.dt));
  const double effective_T = static_cast<double>(steps) * cfg.dt;
  const std::size_t sense_every = cfg.steps_per_sense();

  // Joint dynamics of z = [x; x_hat] between sensing instants:
  //   dx     = (A~ x - B1 K1 x_hat) dt + G dW
  //   dx_hat = (A~ - B1 K1) x_hat dt
  const MatrixXd b1k1 = spec.B1 * sol.K1;
  MatrixXd drift = MatrixXd::Zero(2 * n, 2 * n);
  drift.topLeftCorner(n, n) = sol.A_tilde;
  drift.topRightCorner(n, n) = -b1k1;
  drift.bottomRightCorner(n, n) = sol.A_tilde - b1k1;
  MatrixXd noise_gain = MatrixXd::Zero(2 * n, p);
  noise_gain.topRows(n) = spec.G;

  MatrixXd phi;           // exact one-step transition
  MatrixXd noise_factor;  // factor of the one-step noise covariance
  if (cfg.scheme == IntegrationScheme::ExactTransition) {
    phi = expm(drift * cfg.dt);
    noise_factor = psd_factor(van_loan_gramian(drift, noise_gain, cfg.dt));
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](Eigen::Index count) {
    VectorXd xi(count);
    for (Eigen::Index i = 0; i < count; ++i) xi[i] = normal(rng);
    return xi;
  };

  VectorXd z = VectorXd::Zero(2 * n);
  z.head(n) = psd_factor(spec.Sigma0) * draw(n);
  z.tail(n) = z.head(n);  // the first grid point counts as sensed

  PolicyExecutor executor(cfg.policy, rng);

  const auto payoff_integrand = [&](const VectorXd& state) {
    const VectorXd xv = state.head(n);
    const VectorXd u1v = -sol.K1 * state.tail(n);
    const VectorXd u2v = sol.K2 * xv;
    return xv.dot(spec.Q * xv) + u1v.dot(spec.R1 * u1v) -
           u2v.dot(spec.R2 * u2v);
  };
  const auto error_integrand = [&](const VectorXd& state) {
    const VectorXd ev = state.head(n) - state.tail(n);
    return ev.dot(sol.M1 * ev);
  };

  TrajectoryRecord rec;
  rec.horizon_T = effective_T;
  rec.seed = cfg.seed;
  rec.n_T = 1;
  StreamingMean j_mean, e_mean;

  const auto record_row = [&](std::size_t step, bool sensed_now) {
    rec.times.push_back(static_cast<double>(step) * cfg.dt);
    rec.x.push_back(z.head(n));
    rec.x_hat.push_back(z.tail(n));
    rec.e.push_back(z.head(n) - z.tail(n));
    rec.u1.push_back(-sol.K1 * z.tail(n));
    rec.u2.push_back(sol.K2 * z.head(n));
    rec.sensed.push_back(sensed_now ? 1 : 0);
    rec.running_J.push_back(j_mean.mean());
  };
  record_row(0, true);

  double j_prev = payoff_integrand(z);
  double e_prev = error_integrand(z);
  std::size_t age = 0;  // h-steps since the last sample

  for (std::size_t k = 1; k <= steps; ++k) {
    if (cfg.scheme == IntegrationScheme::ExactTransition) {
      z = phi * z + noise_factor * draw(2 * n);
    } else {
      z += drift * z * cfg.dt +
           noise_gain * (std::sqrt(cfg.dt) * draw(p));
    }

    const double x_norm = z.head(n).norm();
    if (!std::isfinite(x_norm) || x_norm > cfg.state_guard) {
      throw Diverged("state norm " + std::to_string(x_norm) + " at t = " +
                     std::to_string(static_cast<double>(k) * cfg.dt) +
                     " exceeded the guard " + std::to_string(cfg.state_guard) +
                     " (dt too coarse or horizon-scale instability)");
    }

    // Trapezoid segment ending at the pre-reset state.
    j_mean.add(0.5 * (j_prev + payoff_integrand(z)));
    e_mean.add(0.5 * (e_prev + error_integrand(z)));

    bool sensed_now = false;
    if (k % sense_every == 0) {
      ++age;
      if (executor.decide(age, rng)) {
        z.tail(n) = z.head(n);
        age = 0;
        ++rec.n_T;
        sensed_now = true;
      }
    }
    j_prev = payoff_integrand(z);
    e_prev = error_integrand(z);

    if (k % cfg.record_stride == 0) record_row(k, sensed_now);
  }

  rec.J_empirical = j_mean.mean();
  rec.error_cost_empirical = e_mean.mean();
  rec.rate_empirical = static_cast<double>(rec.n_T) / effective_T;
  return rec;
}

CostDecomposition empirical_cost_decomposition(const TrajectoryRecord& rec,
                                               double J_star) {
  return {rec.J_empirical - J_star, rec.error_cost_empirical};
}

}  // namespace aoilq

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "sossm/engine.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// Gaussian sufficient statistics of the conditional state law.
struct KalmanState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// A time-varying linear-Gaussian SSM:
///   Y_t | X_t ~ N(m_t(theta) + A_t(theta) X_t, B_t(theta)),
///   X_t | X_{t-1} ~ N(C_t(theta) X_{t-1}, D_t(theta)),   t >= 2,
///   X_1 ~ N(init_mean(theta), init_cov(theta)).
struct LgSpec {
  int state_dim = 0;
  int obs_dim = 0;
  long period = 1;

  std::function<Eigen::VectorXd(long t, std::span<const double> theta)> m;
  std::function<Eigen::MatrixXd(long t, std::span<const double> theta)> A;
  std::function<Eigen::MatrixXd(long t, std::span<const double> theta)> B;
  std::function<Eigen::MatrixXd(long t, std::span<const double> theta)> C;
  std::function<Eigen::MatrixXd(long t, std::span<const double> theta)> D;
  std::function<Eigen::VectorXd(std::span<const double> theta)> init_mean;
  std::function<Eigen::MatrixXd(std::span<const double> theta)> init_cov;
};

/// Measurement update at time t; returns the log predictive density of y, or
/// nullopt when the innovation covariance is not positive definite.
std::optional<double> kf_update(KalmanState& state, const LgSpec& spec,
                                std::span<const double> theta, long t,
                                std::span<const double> y);

/// Predict through (C_t, D_t); the covariance is re-symmetrized.
void kf_predict(KalmanState& state, const LgSpec& spec, std::span<const double> theta, long t);

/// Predict with (C_t, D_t) then update with (m_t, A_t, B_t); throws on a
/// non-positive-definite innovation covariance, naming t.
std::pair<KalmanState, double> kf_step(const KalmanState& state, const LgSpec& spec,
                                       std::span<const double> theta, long t,
                                       std::span<const double> y);

/// Exact log-likelihood: update-only at t = 1 from the initial law, then
/// predict/update sweeps. T = 0 gives 0.
double kf_loglik(const LgSpec& spec, std::span<const double> theta, const ObsSequence& ys);

/// Filtering means (row t-1 holds E[X_t | y_{1:t}]).
std::vector<Eigen::VectorXd> kf_filter_means(const LgSpec& spec, std::span<const double> theta,
                                             const ObsSequence& ys);

/// Clone an LgSpec into its T-periodic data-cloning form: the transition into
/// every time t = kT + 1 reinitializes from the (zero-mean) initial law.
/// Requires init_mean == 0, since the transition family carries no offset.
LgSpec clone_lg_spec(const LgSpec& base, long T);

/// Particle ops for the Rao-Blackwellised PF: each particle carries Kalman
/// sufficient statistics; mutation is the exact predict, weighting the exact
/// log predictive density. State layout per particle: [mean | cov row-major].
struct KalmanOps {
  explicit KalmanOps(const LgSpec& s) : spec(&s) {}

  int state_stride() const { return spec->state_dim * (1 + spec->state_dim); }
  int summary_dim() const { return spec->state_dim; }

  void init_state(std::span<const double> theta, Rng& rng, std::span<double> out) const;
  void advance(long t, std::span<const double> theta, std::span<double> state, Rng& rng) const;
  double observe(long t, std::span<const double> theta, std::span<double> state,
                 std::span<const double> y) const;
  void state_summary(std::span<const double> state, std::span<double> out) const {
    std::copy(state.begin(), state.begin() + spec->state_dim, out.begin());
  }

  const LgSpec* spec;
};

/// One RB-PF loop iteration; mirrors so_pf_step with Kalman payloads.
void rb_pf_step(ParticleCloud& cloud, const LgSpec& spec, const DynamicsSchedule& schedule,
                const ParameterSpace& space, std::span<const double> y_t, const EngineConfig& cfg,
                Rng& rng, StepRecord* record = nullptr);

/// Full RB-PF runs under the three dynamics policies.
RunRecord run_rb_pf(const LgSpec& spec, const DynamicsSchedule& schedule,
                    const ParameterSpace& space, const Mu0Sampler& mu0, const ObsSequence& ys,
                    const EngineConfig& cfg, Rng& rng);

}  // namespace sossm

#include "sossm/kalman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sossm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void symmetrize(Eigen::MatrixXd& p) { p = 0.5 * (p + p.transpose()).eval(); }

bool chol_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    if (!(L(i, i) > 0.0)) return false;
  return true;
}

}  // namespace

void kf_predict(KalmanState& state, const LgSpec& spec, std::span<const double> theta, long t) {
  const Eigen::MatrixXd C = spec.C(t, theta);
  const Eigen::MatrixXd D = spec.D(t, theta);
  state.mean = C * state.mean;
  state.cov = C * state.cov * C.transpose() + D;
  symmetrize(state.cov);
}

std::optional<double> kf_update(KalmanState& state, const LgSpec& spec,
                                std::span<const double> theta, long t,
                                std::span<const double> y) {
  const Eigen::VectorXd m = spec.m(t, theta);
  const Eigen::MatrixXd A = spec.A(t, theta);
  const Eigen::MatrixXd B = spec.B(t, theta);
  const Eigen::MatrixXd S = (A * state.cov * A.transpose() + B).eval();
  const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (S + S.transpose()));
  if (!chol_ok(llt)) return std::nullopt;
  Eigen::VectorXd resid(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) resid[static_cast<Eigen::Index>(i)] = y[i];
  resid -= m + A * state.mean;

  const Eigen::MatrixXd L = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) logdet += 2.0 * std::log(L(i, i));
  const Eigen::VectorXd alpha = llt.solve(resid);
  const double loglik =
      -0.5 * (static_cast<double>(y.size()) * kLog2Pi + logdet + resid.dot(alpha));

  const Eigen::MatrixXd K = llt.solve(A * state.cov).transpose();
  state.mean += K * resid;
  state.cov = ((Eigen::MatrixXd::Identity(state.cov.rows(), state.cov.cols()) - K * A) *
               state.cov).eval();
  symmetrize(state.cov);
  return loglik;
}

std::pair<KalmanState, double> kf_step(const KalmanState& state, const LgSpec& spec,
                                       std::span<const double> theta, long t,
                                       std::span<const double> y) {
  KalmanState next = state;
  kf_predict(next, spec, theta, t);
  const auto inc = kf_update(next, spec, theta, t, y);
  if (!inc)
    throw std::runtime_error("kf_step: innovation covariance not positive definite at t=" +
                             std::to_string(t));
  return {std::move(next), *inc};
}

double kf_loglik(const LgSpec& spec, std::span<const double> theta, const ObsSequence& ys) {
  if (ys.empty()) return 0.0;
  KalmanState state{spec.init_mean(theta), spec.init_cov(theta)};
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const long t = static_cast<long>(i) + 1;
    if (t > 1) kf_predict(state, spec, theta, t);
    const auto inc = kf_update(state, spec, theta, t, ys[i]);
    if (!inc)
      throw std::runtime_error("kf_loglik: innovation covariance not positive definite at t=" +
                               std::to_string(t));
    total += *inc;
  }
  return total;
}

std::vector<Eigen::VectorXd> kf_filter_means(const LgSpec& spec, std::span<const double> theta,
                                             const ObsSequence& ys) {
  std::vector<Eigen::VectorXd> means;
  means.reserve(ys.size());
  KalmanState state{spec.init_mean(theta), spec.init_cov(theta)};
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const long t = static_cast<long>(i) + 1;
    if (t > 1) kf_predict(state, spec, theta, t);
    const auto inc = kf_update(state, spec, theta, t, ys[i]);
    if (!inc)
      throw std::runtime_error("kf_filter_means: innovation covariance not PD at t=" +
                               std::to_string(t));
    means.push_back(state.mean);
  }
  return means;
}

LgSpec clone_lg_spec(const LgSpec& base, long T) {
  LgSpec out = base;
  out.period = T;
  auto phase = [T](long t) { return t - T * ((t - 1) / T); };
  out.m = [base, phase](long t, std::span<const double> th) { return base.m(phase(t), th); };
  out.A = [base, phase](long t, std::span<const double> th) { return base.A(phase(t), th); };
  out.B = [base, phase](long t, std::span<const double> th) { return base.B(phase(t), th); };
  out.C = [base, phase](long t, std::span<const double> th) -> Eigen::MatrixXd {
    if (phase(t) == 1) return Eigen::MatrixXd::Zero(base.state_dim, base.state_dim);
    return base.C(phase(t), th);
  };
  out.D = [base, phase](long t, std::span<const double> th) -> Eigen::MatrixXd {
    if (phase(t) == 1) return base.init_cov(th);
    return base.D(phase(t), th);
  };
  // The reinitializing transition N(0, init_cov) matches the initial law only
  // when its mean vanishes, which holds for the bundled models.
  return out;
}

void KalmanOps::init_state(std::span<const double> theta, Rng&, std::span<double> out) const {
  const Eigen::VectorXd mu = spec->init_mean(theta);
  const Eigen::MatrixXd cov = spec->init_cov(theta);
  const int d = spec->state_dim;
  for (int i = 0; i < d; ++i) out[i] = mu[i];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out[d + i * d + j] = cov(i, j);
}

void KalmanOps::advance(long t, std::span<const double> theta, std::span<double> state,
                        Rng&) const {
  const int d = spec->state_dim;
  KalmanState ks{Eigen::VectorXd(d), Eigen::MatrixXd(d, d)};
  for (int i = 0; i < d; ++i) ks.mean[i] = state[i];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ks.cov(i, j) = state[d + i * d + j];
  kf_predict(ks, *spec, theta, t);
  for (int i = 0; i < d; ++i) state[i] = ks.mean[i];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) state[d + i * d + j] = ks.cov(i, j);
}

double KalmanOps::observe(long t, std::span<const double> theta, std::span<double> state,
                          std::span<const double> y) const {
  const int d = spec->state_dim;
  KalmanState ks{Eigen::VectorXd(d), Eigen::MatrixXd(d, d)};
  for (int i = 0; i < d; ++i) ks.mean[i] = state[i];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ks.cov(i, j) = state[d + i * d + j];
  const auto inc = kf_update(ks, *spec, theta, t, y);
  if (!inc) return -std::numeric_limits<double>::infinity();  // invalid particle, not a failure
  for (int i = 0; i < d; ++i) state[i] = ks.mean[i];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) state[d + i * d + j] = ks.cov(i, j);
  return *inc;
}

void rb_pf_step(ParticleCloud& cloud, const LgSpec& spec, const DynamicsSchedule& schedule,
                const ParameterSpace& space, std::span<const double> y_t, const EngineConfig& cfg,
                Rng& rng, StepRecord* record) {
  KalmanOps ops(spec);
  StepRecord rec;
  engine::step(cloud, ops, schedule, space, y_t, is_epoch(schedule, cloud.t + 1), cfg, rng, rec);
  if (record) *record = std::move(rec);
}

RunRecord run_rb_pf(const LgSpec& spec, const DynamicsSchedule& schedule,
                    const ParameterSpace& space, const Mu0Sampler& mu0, const ObsSequence& ys,
                    const EngineConfig& cfg, Rng& rng) {
  schedule.validate(space.continuous_dim());
  KalmanOps ops(spec);
  return engine::run(ops, schedule, space, mu0, ys, cfg, rng);
}

}  // namespace sossm

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sossm/dynamics.hpp"
#include "sossm/param_space.hpp"
#include "sossm/particle_cloud.hpp"
#include "sossm/resampling.hpp"
#include "sossm/rng.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// Which generative ordering the SO-SSM uses for the state mutation.
enum class SoVariant {
  theta_after_state,   // state moves under the pre-kernel parameter
  theta_before_state,  // state moves under the freshly moved parameter
};

/// When the artificial dynamics fires.
enum class DynamicsPolicy {
  every_step,       // kernel applied at every t (plain bootstrap PF)
  on_trigger,       // kernel only when a resampling fires (fast adaptive)
  on_trigger_epoch  // kernel when resampling fires or t is an epoch (slow adaptive)
};

struct EngineConfig {
  int n_particles = 0;
  double c_ess = 0.7;
  SoVariant variant = SoVariant::theta_after_state;
  ResamplingScheme resampling = ResamplingScheme::ssp;
  DynamicsPolicy policy = DynamicsPolicy::every_step;
  bool summarize_steps = true;  // pass-structured callers summarize on their own cadence
};

struct StepRecord {
  long t = 0;
  std::vector<double> theta_hat;
  std::vector<double> theta_proj;
  std::vector<double> state_mean;
  double ess = 0.0;  // of the weights after this step
  bool resampled = false;
  bool kernel_applied = false;
  double log_increment = 0.0;
};

struct RunRecord {
  std::vector<StepRecord> steps;
  std::vector<double> theta_star;  // ground truth for synthetic runs, when known
  long kernel_applications = 0;    // number of steps at which theta moved

  double log_likelihood() const {
    double s = 0.0;
    for (const auto& r : steps) s += r.log_increment;
    return s;
  }
};

using Mu0Sampler = std::function<void(Rng&, std::span<double>)>;

namespace engine {

constexpr std::uint64_t kResampleTag = 0x8000000000000000ULL;

inline double cloud_ess(const ParticleCloud& cloud) {
  double sumsq = 0.0;
  for (int n = 0; n < cloud.n_particles; ++n) sumsq += cloud.weights[n] * cloud.weights[n];
  return 1.0 / sumsq;
}

/// Weighted parameter/state means and the projection into the space.
template <class Ops>
void summarize(const ParticleCloud& cloud, const Ops& ops, const ParameterSpace& space,
               StepRecord& rec) {
  rec.theta_hat.assign(cloud.theta_dim, 0.0);
  for (int n = 0; n < cloud.n_particles; ++n) {
    const double w = cloud.weights[n];
    const auto th = cloud.theta_row(n);
    for (int j = 0; j < cloud.theta_dim; ++j) rec.theta_hat[j] += w * th[j];
  }
  rec.theta_proj = space.project(rec.theta_hat);
  const int sd = ops.summary_dim();
  rec.state_mean.assign(sd, 0.0);
  if (sd > 0) {
    std::vector<double> buf(sd);
    for (int n = 0; n < cloud.n_particles; ++n) {
      ops.state_summary(cloud.state_row(n), buf);
      for (int j = 0; j < sd; ++j) rec.state_mean[j] += cloud.weights[n] * buf[j];
    }
  }
  rec.ess = cloud_ess(cloud);
}

/// Lines 1-4 of the bootstrap PF: draw theta_0 ~ mu_0, X_1 ~ chi_{theta_0},
/// move theta_1 through K_1 (theta-after-state ordering only), weight by y_1.
template <class Ops>
ParticleCloud initialize(const Ops& ops, const DynamicsSchedule& schedule,
                         const ParameterSpace& space, const Mu0Sampler& mu0,
                         std::span<const double> y1, const EngineConfig& cfg, Rng& rng,
                         StepRecord& rec) {
  if (cfg.n_particles < 1) throw std::invalid_argument("engine: need at least one particle");
  ParticleCloud cloud;
  cloud.n_particles = cfg.n_particles;
  cloud.theta_dim = space.dim();
  cloud.state_stride = ops.state_stride();
  cloud.t = 1;
  cloud.theta.resize(static_cast<std::size_t>(cfg.n_particles) * cloud.theta_dim);
  cloud.state.resize(static_cast<std::size_t>(cfg.n_particles) * cloud.state_stride);
  cloud.logw.resize(cfg.n_particles);
  cloud.weights.resize(cfg.n_particles);
  cloud.ancestry.resize(cfg.n_particles);

  const bool move_theta1 =
      cfg.variant == SoVariant::theta_after_state && schedule.flavor != Flavor::none;
  std::vector<double> theta0(cloud.theta_dim);
  for (int n = 0; n < cfg.n_particles; ++n) {
    Rng prior_rng = rng.substream(0, static_cast<std::uint64_t>(n));
    if (mu0)
      mu0(prior_rng, theta0);
    else
      space.sample_uniform(prior_rng, theta0);
    Rng step_rng = rng.substream(1, static_cast<std::uint64_t>(n));
    auto th = cloud.theta_row(n);
    if (move_theta1)
      apply_kernel(schedule, 1, is_epoch(schedule, 1), theta0, space, step_rng, th);
    else
      std::copy(theta0.begin(), theta0.end(), th.begin());
    ops.init_state(theta0, step_rng, cloud.state_row(n));
    cloud.logw[n] = ops.observe(1, cloud.theta_row(n), cloud.state_row(n), y1);
    cloud.ancestry[n] = static_cast<std::uint32_t>(n);
  }
  cloud.normalize("initialization");
  rec = StepRecord{};
  rec.t = 1;
  rec.kernel_applied = move_theta1;
  rec.log_increment = cloud.logw_lse - std::log(static_cast<double>(cfg.n_particles));
  summarize(cloud, ops, space, rec);
  return cloud;
}

/// Reusable step buffers; engines allocate one per run.
struct StepWorkspace {
  std::vector<double> theta_next;
  std::vector<double> state_next;
  std::vector<double> logw_next;
};

template <class Ops>
void step(ParticleCloud& cloud, const Ops& ops, const DynamicsSchedule& schedule,
          const ParameterSpace& space, std::span<const double> y, bool at_epoch,
          const EngineConfig& cfg, Rng& rng, StepRecord& rec, StepWorkspace& ws);

/// One iteration of the PF loop body (time t = cloud.t + 1), with a throwaway
/// workspace.
template <class Ops>
void step(ParticleCloud& cloud, const Ops& ops, const DynamicsSchedule& schedule,
          const ParameterSpace& space, std::span<const double> y, bool at_epoch,
          const EngineConfig& cfg, Rng& rng, StepRecord& rec) {
  StepWorkspace ws;
  step(cloud, ops, schedule, space, y, at_epoch, cfg, rng, rec, ws);
}

/// One iteration of the PF loop body (time t = cloud.t + 1). `at_epoch` is the
/// epoch membership of t under the schedule; with on_trigger_epoch policy it
/// also forces the resample + move.
template <class Ops>
void step(ParticleCloud& cloud, const Ops& ops, const DynamicsSchedule& schedule,
          const ParameterSpace& space, std::span<const double> y, bool at_epoch,
          const EngineConfig& cfg, Rng& rng, StepRecord& rec, StepWorkspace& ws) {
  const long t = cloud.t + 1;
  const int n_particles = cloud.n_particles;
  const double ess_prev = ess(cloud.weights);

  bool trigger = ess_prev <= cfg.c_ess * static_cast<double>(n_particles);
  if (cfg.policy == DynamicsPolicy::on_trigger_epoch && at_epoch) trigger = true;

  const bool move = cfg.policy == DynamicsPolicy::every_step
                        ? schedule.flavor != Flavor::none
                        : (trigger && schedule.flavor != Flavor::none);

  const double lse_before = cloud.logw_lse;
  if (trigger) {
    Rng res_rng = rng.substream(static_cast<std::uint64_t>(t), kResampleTag);
    cloud.ancestry = resample(cloud.weights, cfg.resampling, res_rng);
    std::fill(cloud.logw.begin(), cloud.logw.end(), 0.0);
    cloud.resampled_at.push_back(t);
  } else {
    for (int n = 0; n < n_particles; ++n) cloud.ancestry[n] = static_cast<std::uint32_t>(n);
  }

  std::vector<double>& theta_next = ws.theta_next;
  std::vector<double>& state_next = ws.state_next;
  std::vector<double>& logw_next = ws.logw_next;
  theta_next.resize(cloud.theta.size());
  state_next.resize(cloud.state.size());
  logw_next.resize(static_cast<std::size_t>(n_particles));
  for (int n = 0; n < n_particles; ++n) {
    const int a = static_cast<int>(cloud.ancestry[n]);
    Rng part_rng = rng.substream(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(n));
    const auto theta_prev = cloud.theta_row(a);
    std::span<double> theta_new(theta_next.data() + static_cast<std::size_t>(n) * cloud.theta_dim,
                                static_cast<std::size_t>(cloud.theta_dim));
    if (move)
      apply_kernel(schedule, t, at_epoch, theta_prev, space, part_rng, theta_new);
    else
      std::copy(theta_prev.begin(), theta_prev.end(), theta_new.begin());

    std::span<double> state_new(state_next.data() + static_cast<std::size_t>(n) * cloud.state_stride,
                                static_cast<std::size_t>(cloud.state_stride));
    const auto state_prev = cloud.state_row(a);
    std::copy(state_prev.begin(), state_prev.end(), state_new.begin());
    const auto theta_for_state =
        cfg.variant == SoVariant::theta_after_state ? std::span<const double>(theta_prev)
                                                    : std::span<const double>(theta_new);
    ops.advance(t, theta_for_state, state_new, part_rng);
    logw_next[n] = cloud.logw[a] + ops.observe(t, theta_new, state_new, y);
  }
  cloud.theta.swap(theta_next);
  cloud.state.swap(state_next);
  cloud.logw.swap(logw_next);
  cloud.t = t;
  cloud.normalize("step");

  rec = StepRecord{};
  rec.t = t;
  rec.resampled = trigger;
  rec.kernel_applied = move;
  rec.log_increment =
      cloud.logw_lse - (trigger ? std::log(static_cast<double>(n_particles)) : lse_before);
  if (cfg.summarize_steps)
    summarize(cloud, ops, space, rec);
  else
    rec.ess = cloud_ess(cloud);
}

/// Full run over ys (Algorithms 1-3 depending on cfg.policy).
template <class Ops>
RunRecord run(const Ops& ops, const DynamicsSchedule& schedule, const ParameterSpace& space,
              const Mu0Sampler& mu0, const ObsSequence& ys, const EngineConfig& cfg, Rng& rng) {
  if (ys.empty()) throw std::invalid_argument("engine::run: empty observation sequence");
  RunRecord record;
  record.steps.reserve(ys.size());
  StepRecord rec;
  ParticleCloud cloud = initialize(ops, schedule, space, mu0, ys[0], cfg, rng, rec);
  if (rec.kernel_applied) ++record.kernel_applications;
  record.steps.push_back(std::move(rec));
  EpochSequence epochs(schedule);
  StepWorkspace ws;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const long t = static_cast<long>(i) + 1;
    const bool at_epoch = epochs.matches(t);
    step(cloud, ops, schedule, space, ys[i], at_epoch, cfg, rng, rec, ws);
    if (at_epoch) epochs.advance();
    if (rec.kernel_applied) ++record.kernel_applications;
    record.steps.push_back(std::move(rec));
  }
  return record;
}

}  // namespace engine

}  // namespace sossm

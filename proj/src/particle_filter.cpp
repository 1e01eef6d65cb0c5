#include "sossm/particle_filter.hpp"

namespace sossm {

namespace {

EngineConfig make_config(const PfOptions& opts, DynamicsPolicy policy) {
  EngineConfig cfg;
  cfg.n_particles = opts.n_particles;
  cfg.c_ess = opts.c_ess;
  cfg.variant = opts.variant;
  cfg.resampling = opts.resampling;
  cfg.policy = policy;
  return cfg;
}

}  // namespace

void so_pf_step(ParticleCloud& cloud, const SsmModel& model, const DynamicsSchedule& schedule,
                const ParameterSpace& space, std::span<const double> y_t, const PfOptions& opts,
                Rng& rng, StepRecord* record) {
  RawStateOps ops(model);
  const EngineConfig cfg = make_config(opts, DynamicsPolicy::every_step);
  StepRecord rec;
  engine::step(cloud, ops, schedule, space, y_t, is_epoch(schedule, cloud.t + 1), cfg, rng, rec);
  if (record) *record = std::move(rec);
}

RunRecord run_bootstrap_so_pf(const SsmModel& model, const DynamicsSchedule& schedule,
                              const ParameterSpace& space, const Mu0Sampler& mu0,
                              const ObsSequence& ys, const PfOptions& opts, Rng& rng) {
  schedule.validate(space.continuous_dim());
  RawStateOps ops(model);
  return engine::run(ops, schedule, space, mu0, ys, make_config(opts, DynamicsPolicy::every_step),
                     rng);
}

RunRecord run_adaptive_fast(const SsmModel& model, const DynamicsSchedule& schedule,
                            const ParameterSpace& space, const Mu0Sampler& mu0,
                            const ObsSequence& ys, const PfOptions& opts, Rng& rng) {
  schedule.validate(space.continuous_dim());
  RawStateOps ops(model);
  return engine::run(ops, schedule, space, mu0, ys, make_config(opts, DynamicsPolicy::on_trigger),
                     rng);
}

RunRecord run_adaptive_slow(const SsmModel& model, const DynamicsSchedule& schedule,
                            const ParameterSpace& space, const Mu0Sampler& mu0,
                            const ObsSequence& ys, const PfOptions& opts, Rng& rng) {
  schedule.validate(space.continuous_dim());
  RawStateOps ops(model);
  return engine::run(ops, schedule, space, mu0, ys,
                     make_config(opts, DynamicsPolicy::on_trigger_epoch), rng);
}

std::pair<std::vector<double>, std::vector<double>> estimate_theta(const ParticleCloud& cloud,
                                                                   const ParameterSpace& space) {
  std::vector<double> theta_hat(cloud.theta_dim, 0.0);
  for (int n = 0; n < cloud.n_particles; ++n) {
    const auto th = cloud.theta_row(n);
    for (int j = 0; j < cloud.theta_dim; ++j) theta_hat[j] += cloud.weights[n] * th[j];
  }
  std::vector<double> theta_proj = space.project(theta_hat);
  return {std::move(theta_hat), std::move(theta_proj)};
}

}  // namespace sossm

#include "sossm/mle.hpp"

#include <cmath>
#include <stdexcept>

#include "sossm/particle_filter.hpp"

namespace sossm {

ClonedDataset::ClonedDataset(ObsSequence base) : base_(std::move(base)) {
  if (base_.empty()) throw std::invalid_argument("ClonedDataset: empty base sequence");
}

const std::vector<double>& ClonedDataset::obs_at(long t) const {
  if (t < 1) throw std::invalid_argument("ClonedDataset: t must be >= 1");
  const long T = length();
  return base_[static_cast<std::size_t>(t - 1 - T * ((t - 1) / T))];
}

SsmModel clone_model(const SsmModel& base, long T) {
  if (T < 1) throw std::invalid_argument("clone_model: T must be >= 1");
  SsmModel out = base;
  out.period = static_cast<int>(T);
  auto phase = [T](long t) { return t - T * ((t - 1) / T); };
  out.sample_transition = [base, phase](long t, std::span<const double> th,
                                        std::span<const double> xp, Rng& rng,
                                        std::span<double> x) {
    const long s = phase(t);
    if (s == 1) {
      // Pass boundary: the chain forgets its state and redraws from chi_theta.
      if (base.sample_initial) base.sample_initial(th, rng, x);
    } else {
      base.sample_transition(s, th, xp, rng, x);
    }
  };
  out.obs_logdensity = [base, phase](long t, std::span<const double> th,
                                     std::span<const double> x, std::span<const double> y) {
    return base.obs_logdensity(phase(t), th, x, y);
  };
  out.exact_loglik = nullptr;
  return out;
}

namespace {

RunRecord run_if_core(const SsmModel& base, const ObsSequence& y_tilde,
                      const ParameterSpace& space, const Mu0Sampler& mu0, const IfConfig& cfg,
                      Rng& rng, bool with_epochs) {
  if (y_tilde.empty()) throw std::invalid_argument("iterated filtering: empty data");
  const long T = static_cast<long>(y_tilde.size());
  DynamicsSchedule schedule = cfg.schedule;
  schedule.period = T;
  if (with_epochs) {
    if (cfg.t0 < 2 || cfg.t0 % T != 0)
      throw std::invalid_argument(
          "iterated filtering: t0 must be a positive multiple of T (and >= 2)");
    schedule.epoch_rule = EpochRule::if_log_sq_floor;
    schedule.t1 = cfg.t0 + 1;
    schedule.delta = cfg.delta;
  } else {
    schedule.t1 = 0;  // no epochs in the fast variant
  }
  schedule.validate(space.continuous_dim());

  const SsmModel cloned = clone_model(base, T);
  RawStateOps ops(cloned);
  EngineConfig ec;
  ec.n_particles = cfg.n_particles;
  ec.c_ess = cfg.c_ess;
  ec.variant = SoVariant::theta_before_state;  // the convergence theory covers this ordering
  ec.resampling = cfg.resampling;
  ec.policy = with_epochs ? DynamicsPolicy::on_trigger_epoch : DynamicsPolicy::on_trigger;
  ec.summarize_steps = false;  // rows are per pass

  // Pass-zero particle system: theta from mu0, unit weights, empty states.
  ParticleCloud cloud;
  cloud.n_particles = cfg.n_particles;
  cloud.theta_dim = space.dim();
  cloud.state_stride = ops.state_stride();
  cloud.t = 0;
  cloud.theta.resize(static_cast<std::size_t>(cfg.n_particles) * cloud.theta_dim);
  cloud.state.assign(static_cast<std::size_t>(cfg.n_particles) * cloud.state_stride, 0.0);
  cloud.logw.assign(cfg.n_particles, 0.0);
  cloud.weights.resize(cfg.n_particles);
  cloud.ancestry.resize(cfg.n_particles);
  for (int n = 0; n < cfg.n_particles; ++n) {
    Rng prior_rng = rng.substream(0, static_cast<std::uint64_t>(n));
    auto th = cloud.theta_row(n);
    if (mu0)
      mu0(prior_rng, th);
    else
      space.sample_uniform(prior_rng, th);
  }
  cloud.normalize("initialization");

  EpochSequence epochs(schedule);
  engine::StepWorkspace ws;
  RunRecord record;
  record.steps.reserve(static_cast<std::size_t>(cfg.passes));
  for (int k = 1; k <= cfg.passes; ++k) {
    StepRecord pass_row;
    double pass_increment = 0.0;
    bool pass_resampled = false;
    for (long s = 1; s <= T; ++s) {
      const long t = (static_cast<long>(k) - 1) * T + s;
      const bool at_epoch = with_epochs && epochs.matches(t);
      StepRecord rec;
      try {
        engine::step(cloud, ops, schedule, space, y_tilde[static_cast<std::size_t>(s - 1)],
                     at_epoch, ec, rng, rec, ws);
      } catch (const DegeneracyError&) {
        throw DegeneracyError(t, "pass k=" + std::to_string(k) + ", s=" + std::to_string(s) +
                                     ", global");
      }
      if (at_epoch) epochs.advance();
      pass_increment += rec.log_increment;
      pass_resampled = pass_resampled || rec.resampled;
      if (rec.kernel_applied) ++record.kernel_applications;
      pass_row = std::move(rec);
    }
    engine::summarize(cloud, ops, space, pass_row);
    pass_row.t = k;  // rows are per pass
    pass_row.log_increment = pass_increment;
    pass_row.resampled = pass_resampled;
    record.steps.push_back(std::move(pass_row));
  }
  return record;
}

}  // namespace

RunRecord run_if_fast(const SsmModel& base, const ObsSequence& y_tilde,
                      const ParameterSpace& space, const Mu0Sampler& mu0, const IfConfig& cfg,
                      Rng& rng) {
  if (cfg.schedule.flavor == Flavor::slow_vanishing || cfg.schedule.flavor == Flavor::mixed)
    throw std::invalid_argument("run_if_fast: use run_if_slow for epoch-based schedules");
  return run_if_core(base, y_tilde, space, mu0, cfg, rng, false);
}

RunRecord run_if_slow(const SsmModel& base, const ObsSequence& y_tilde,
                      const ParameterSpace& space, const Mu0Sampler& mu0, const IfConfig& cfg,
                      Rng& rng) {
  if (cfg.schedule.flavor != Flavor::slow_vanishing && cfg.schedule.flavor != Flavor::mixed)
    throw std::invalid_argument("run_if_slow: schedule flavor must be slow-vanishing or mixed");
  return run_if_core(base, y_tilde, space, mu0, cfg, rng, true);
}

double pomp_h(PompKind kind, double alpha, long T, long k, long s) {
  if (!(alpha > 1.0 / 50.0 && alpha < 1.0))
    throw std::invalid_argument("pomp_h: alpha must lie in (1/50, 1)");
  if (T < 1 || k < 1 || s < 1 || s > T) throw std::invalid_argument("pomp_h: bad (T, k, s)");
  const double Td = static_cast<double>(T);
  const double n = static_cast<double>((k - 1) * T + s);
  if (kind == PompKind::geometric) return std::pow(alpha, (n - 1.0) / (50.0 * Td));
  return alpha * (50.0 * Td - 1.0) / (50.0 * alpha * Td - 1.0 + (1.0 - alpha) * n);
}

DynamicsSchedule pomp_schedule(PompKind kind, double alpha, long T) {
  DynamicsSchedule s;
  s.flavor = kind == PompKind::geometric ? Flavor::pomp_geometric : Flavor::pomp_hyperbolic;
  s.alpha = alpha;
  s.period = T;
  s.validate(0);
  return s;
}

RunRecord run_noisy_opt(const PayoffFn& payoff, const ObsSequence& ys,
                        const ParameterSpace& space, const Mu0Sampler& mu0,
                        const DynamicsSchedule& schedule, int n_particles, double c_ess,
                        ResamplingScheme resampling, Rng& rng) {
  schedule.validate(space.continuous_dim());
  SsmModel m;
  m.period = 1;
  m.state_dim = 0;
  m.obs_dim = ys.empty() ? 0 : static_cast<int>(ys.front().size());
  m.obs_logdensity = [payoff](long, std::span<const double> th, std::span<const double>,
                              std::span<const double> y) { return payoff(y, th); };
  RawStateOps ops(m);
  EngineConfig ec;
  ec.n_particles = n_particles;
  ec.c_ess = c_ess;
  ec.variant = SoVariant::theta_before_state;  // no kernel before the first weighting
  ec.resampling = resampling;
  ec.policy = DynamicsPolicy::on_trigger_epoch;
  return engine::run(ops, schedule, space, mu0, ys, ec, rng);
}

}  // namespace sossm

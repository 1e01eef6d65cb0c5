#pragma once

#include <utility>

#include "sossm/engine.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// Particle ops for the plain bootstrap filter: states are sampled through the
/// model's transition kernel and weighted by the observation density.
struct RawStateOps {
  explicit RawStateOps(const SsmModel& m) : model(&m), buf(m.state_dim) {}

  int state_stride() const { return model->state_dim; }
  int summary_dim() const { return model->state_dim; }

  void init_state(std::span<const double> theta, Rng& rng, std::span<double> out) const {
    if (model->state_dim > 0) model->sample_initial(theta, rng, out);
  }
  void advance(long t, std::span<const double> theta, std::span<double> state, Rng& rng) const {
    if (model->state_dim == 0) return;
    model->sample_transition(t, theta, state, rng, buf);
    std::copy(buf.begin(), buf.end(), state.begin());
  }
  double observe(long t, std::span<const double> theta, std::span<double> state,
                 std::span<const double> y) const {
    return model->obs_logdensity(t, theta, state, y);
  }
  void state_summary(std::span<const double> state, std::span<double> out) const {
    std::copy(state.begin(), state.end(), out.begin());
  }

  const SsmModel* model;
  mutable std::vector<double> buf;
};

struct PfOptions {
  int n_particles = 1000;
  double c_ess = 0.7;
  SoVariant variant = SoVariant::theta_after_state;
  ResamplingScheme resampling = ResamplingScheme::ssp;
};

/// One iteration of the bootstrap PF loop body on SO-SSMs: ESS-gated
/// resampling, K_t move, state mutation in the variant's ordering, reweighting.
/// Advances cloud.t by one; record (when given) receives the step summary.
void so_pf_step(ParticleCloud& cloud, const SsmModel& model, const DynamicsSchedule& schedule,
                const ParameterSpace& space, std::span<const double> y_t, const PfOptions& opts,
                Rng& rng, StepRecord* record = nullptr);

/// Bootstrap PF over the whole sequence, dynamics applied at every step.
RunRecord run_bootstrap_so_pf(const SsmModel& model, const DynamicsSchedule& schedule,
                              const ParameterSpace& space, const Mu0Sampler& mu0,
                              const ObsSequence& ys, const PfOptions& opts, Rng& rng);

/// Adaptive variant: the (Gaussian) kernel fires only when a resampling does.
RunRecord run_adaptive_fast(const SsmModel& model, const DynamicsSchedule& schedule,
                            const ParameterSpace& space, const Mu0Sampler& mu0,
                            const ObsSequence& ys, const PfOptions& opts, Rng& rng);

/// Adaptive variant with epochs: resample + move when t is an epoch or the ESS
/// drops; supports the slow-vanishing and mixed kernel families.
RunRecord run_adaptive_slow(const SsmModel& model, const DynamicsSchedule& schedule,
                            const ParameterSpace& space, const Mu0Sampler& mu0,
                            const ObsSequence& ys, const PfOptions& opts, Rng& rng);

/// Weighted parameter mean and its projection into the space.
std::pair<std::vector<double>, std::vector<double>> estimate_theta(const ParticleCloud& cloud,
                                                                   const ParameterSpace& space);

}  // namespace sossm

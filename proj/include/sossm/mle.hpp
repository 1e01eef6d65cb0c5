#pragma once

#include <functional>

#include "sossm/engine.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// The infinitely repeated observation stream: obs_at((k-1)T + s) = y_tilde_s.
class ClonedDataset {
 public:
  explicit ClonedDataset(ObsSequence base);
  long length() const { return static_cast<long>(base_.size()); }
  const std::vector<double>& obs_at(long t) const;
  const ObsSequence& base() const { return base_; }

 private:
  ObsSequence base_;
};

/// The T-periodic SSM over the cloned stream: densities repeat with period T
/// and the transition into every time t = kT + 1 reinitializes the state from
/// chi_theta, forgetting the incoming state.
SsmModel clone_model(const SsmModel& base, long T);

struct IfConfig {
  int n_particles = 1000;
  double c_ess = 0.7;
  DynamicsSchedule schedule;  // fast/pomp flavor for run_if_fast; slow or mixed for run_if_slow
  long t0 = 0;    // slow: first epoch at t0 + 1; must be a positive multiple of T
  long delta = 1; // slow: epoch advance is delta * T * floor(log(t_p)^2)
  int passes = 1; // K
  ResamplingScheme resampling = ResamplingScheme::ssp;
};

/// Iterated filtering with the resampling-gated Gaussian dynamics. Records one
/// row per pass; log_increment accumulates the pass's normalizing increments.
RunRecord run_if_fast(const SsmModel& base, const ObsSequence& y_tilde,
                      const ParameterSpace& space, const Mu0Sampler& mu0, const IfConfig& cfg,
                      Rng& rng);

/// Iterated filtering with slowly vanishing dynamics: heavier-tailed kernels at
/// the epoch times t_p = 1 (mod T), Gaussian (or fast discrete) kernels on ESS
/// triggers elsewhere.
RunRecord run_if_slow(const SsmModel& base, const ObsSequence& y_tilde,
                      const ParameterSpace& space, const Mu0Sampler& mu0, const IfConfig& cfg,
                      Rng& rng);

enum class PompKind { geometric, hyperbolic };

/// The pomp-style cooling value h~_{k,s}; alpha in (1/50, 1).
double pomp_h(PompKind kind, double alpha, long T, long k, long s);

/// A schedule whose h_t follows the pomp-style sequence (Gaussian kernels).
DynamicsSchedule pomp_schedule(PompKind kind, double alpha, long T);

using PayoffFn = std::function<double(std::span<const double> y, std::span<const double> theta)>;

/// Global noisy optimization: a theta-only particle system with weight
/// updates exp(h(Y_t, theta)) and the epoch-or-ESS trigger rule.
RunRecord run_noisy_opt(const PayoffFn& payoff, const ObsSequence& ys,
                        const ParameterSpace& space, const Mu0Sampler& mu0,
                        const DynamicsSchedule& schedule, int n_particles, double c_ess,
                        ResamplingScheme resampling, Rng& rng);

}  // namespace sossm

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sossm/rng.hpp"

namespace sossm {

/// One observation per time step; row t-1 holds y_t.
using ObsSequence = std::vector<std::vector<double>>;

/// A state-space model as a sampler / log-density triple: initial law chi_theta,
/// transition kernel into time t (t >= 2), and observation log-density at t.
/// All callables are pure given the Rng handle.
struct SsmModel {
  int period = 1;  // tau of the periodic structure
  int state_dim = 0;
  int obs_dim = 1;

  std::function<void(std::span<const double> theta, Rng& rng, std::span<double> x1)>
      sample_initial;
  std::function<void(long t, std::span<const double> theta, std::span<const double> x_prev,
                     Rng& rng, std::span<double> x_t)>
      sample_transition;
  std::function<double(long t, std::span<const double> theta, std::span<const double> x,
                       std::span<const double> y)>
      obs_logdensity;

  /// Optional exact log-likelihood oracle (Kalman-backed models).
  std::function<double(std::span<const double> theta, const ObsSequence& ys)> exact_loglik;

  /// Reduce a global time index to the position within the period, in {1..period}.
  long phase(long t) const { return t - period * ((t - 1) / period); }
};

}  // namespace sossm

#pragma once

#include "sossm/ssm_model.hpp"

namespace sossm {

/// Stochastic volatility model, theta = (alpha, beta, sigma):
///   Y_t ~ N(0, beta^2 exp(X_t)),
///   X_{t+1} ~ t_nu(alpha X_t, sigma^2)  or  N(alpha X_t, sigma^2).
/// The initial law defaults to the stationary Gaussian N(0, sigma^2/(1-alpha^2))
/// (variance capped for |alpha| near 1).
struct SvOptions {
  bool student_transition = true;
  double nu = 5.0;
  /// Optional overrides for the initial law N(m(theta), s0(theta)^2).
  std::function<double(std::span<const double>)> init_mean;
  std::function<double(std::span<const double>)> init_sd;
};

SsmModel make_sv_model(const SvOptions& opts = {});

ObsSequence sv_simulate(const SsmModel& model, std::span<const double> theta, long T, Rng& rng);

}  // namespace sossm

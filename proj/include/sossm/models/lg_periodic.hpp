#pragma once

#include <vector>

#include "sossm/kalman.hpp"
#include "sossm/models/spline.hpp"
#include "sossm/param_space.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// The 24-periodic linear-Gaussian model: a p-dimensional AR(1) state read out
/// through a natural-spline hour-of-day basis,
///   Y_t ~ N(sum_j (beta_j + X_{j,t}) b_j(hour(t)), sigma_1^2),
///   X_{t+1} ~ N(diag(rho) X_t, diag(sigma_2^2 .. sigma_{p+1}^2)),  X_1 ~ N(0, 4 I_p).
/// theta = (beta_1..beta_p, rho_1..rho_p, sigma_1..sigma_{p+1}), dimension 3p+1.
class LgPeriodicModel {
 public:
  LgPeriodicModel(int p, std::vector<double> knots);

  int p() const { return p_; }
  int theta_dim() const { return 3 * p_ + 1; }

  /// Hour-of-day readout row, precomputed per residue class mod 24.
  const std::vector<double>& basis_row(long t) const {
    return rows_[static_cast<std::size_t>(t - 24 * ((t - 1) / 24) - 1)];
  }

  SsmModel ssm() const;
  LgSpec lg_spec() const;

  /// Theta = [-10,10]^p x [-1,1]^p x [0,4]^{p+1}.
  ParameterSpace default_space() const;
  /// beta ~ U[-2,2]^p, rho ~ U[-1,1]^p, sigma = (0.5, 1, ..., 1).
  std::vector<double> draw_theta_star(Rng& rng) const;

  ObsSequence simulate(std::span<const double> theta, long T, Rng& rng) const;

 private:
  int p_;
  SplineBasis basis_;
  std::vector<std::vector<double>> rows_;  // 24 rows, hour 1..24
};

LgPeriodicModel make_lg_periodic(int p);
LgPeriodicModel make_lg_periodic(int p, std::vector<double> knots);

}  // namespace sossm

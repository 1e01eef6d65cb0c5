#include "sossm/particle_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sossm {

void ParticleCloud::normalize(const std::string& where) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double lw : logw) mx = std::max(mx, lw);
  if (!std::isfinite(mx)) throw DegeneracyError(t, where);
  double sum = 0.0;
  for (int n = 0; n < n_particles; ++n) {
    weights[n] = std::exp(logw[n] - mx);
    sum += weights[n];
  }
  const double inv = 1.0 / sum;
  for (auto& w : weights) w *= inv;
  logw_lse = mx + std::log(sum);
}

}  // namespace sossm

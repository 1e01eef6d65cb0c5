#include "sossm/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sossm {

ResamplingScheme resampling_scheme_from_string(const std::string& name) {
  if (name == "ssp") return ResamplingScheme::ssp;
  if (name == "systematic") return ResamplingScheme::systematic;
  if (name == "multinomial") return ResamplingScheme::multinomial;
  if (name == "stratified") return ResamplingScheme::stratified;
  throw std::invalid_argument("unknown resampling scheme: " + name);
}

std::string to_string(ResamplingScheme scheme) {
  switch (scheme) {
    case ResamplingScheme::ssp: return "ssp";
    case ResamplingScheme::systematic: return "systematic";
    case ResamplingScheme::multinomial: return "multinomial";
    case ResamplingScheme::stratified: return "stratified";
  }
  return "?";
}

double ess(std::span<const double> weights) {
  double sum = 0.0, sumsq = 0.0;
  for (double w : weights) {
    sum += w;
    sumsq += w * w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("ess: weights are not normalized");
  return 1.0 / sumsq;
}

namespace {

// Offspring counts from an increasing grid of points against the weight CDF.
std::vector<long> counts_from_points(std::span<const double> w, std::span<const double> points) {
  const std::size_t n = w.size();
  std::vector<long> counts(n, 0);
  double cum = 0.0;
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += w[k];
    long c = 0;
    while (i < points.size() && points[i] < cum) {
      ++c;
      ++i;
    }
    counts[k] = c;
  }
  // Guard against cum < 1 by round-off: assign stragglers to the last index.
  counts[n - 1] += static_cast<long>(points.size() - i);
  return counts;
}

std::vector<long> systematic_counts(std::span<const double> w, Rng& rng) {
  const std::size_t n = w.size();
  const double u = rng.uniform01();
  std::vector<double> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = (static_cast<double>(i) + u) / static_cast<double>(n);
  return counts_from_points(w, points);
}

std::vector<long> stratified_counts(std::span<const double> w, Rng& rng) {
  const std::size_t n = w.size();
  std::vector<double> points(n);
  for (std::size_t i = 0; i < n; ++i)
    points[i] = (static_cast<double>(i) + rng.uniform01()) / static_cast<double>(n);
  return counts_from_points(w, points);
}

std::vector<long> multinomial_counts(std::span<const double> w, Rng& rng) {
  // N sorted uniforms via exponential spacings, then one CDF sweep.
  const std::size_t n = w.size();
  std::vector<double> points(n);
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g += -std::log(1.0 - rng.uniform01());
    points[i] = g;
  }
  g += -std::log(1.0 - rng.uniform01());
  for (auto& p : points) p /= g;
  return counts_from_points(w, points);
}

// SSP resampling: walks the fractional parts of N*W, transferring mass between
// two open indices with the branching probabilities that keep every count
// unbiased while staying within one unit of N*W_n.
std::vector<long> ssp_counts(std::span<const double> w, Rng& rng) {
  const std::size_t n = w.size();
  std::vector<long> children(n);
  std::vector<double> frac(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = static_cast<double>(n) * w[k];
    children[k] = static_cast<long>(std::floor(xi));
    frac[k] = xi - std::floor(xi);
  }
  if (n == 1) {
    children[0] = 1;
    return children;
  }
  std::size_t i = 0, j = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double delta_i = std::min(frac[j], 1.0 - frac[i]);
    const double delta_j = std::min(frac[i], 1.0 - frac[j]);
    const double total = delta_i + delta_j;
    // Unbiasedness: frac[i] grows by delta_i with probability delta_j / total.
    const double prob_swap = total > 0.0 ? delta_i / total : 0.0;
    if (rng.uniform01() < prob_swap) {
      std::swap(i, j);
      delta_i = delta_j;
    }
    if (frac[j] < 1.0 - frac[i]) {
      frac[i] += delta_i;
      j = k + 2;
    } else {
      frac[j] -= delta_i;
      children[i] += 1;
      i = k + 2;
    }
  }
  long total = std::accumulate(children.begin(), children.end(), 0L);
  if (total == static_cast<long>(n) - 1) {
    // Round-off can leave one residual fraction very close to 1.
    const std::size_t open = (j == n) ? i : j;
    if (frac[open] > 0.99) {
      children[open] += 1;
      total += 1;
    }
  }
  if (total != static_cast<long>(n))
    throw std::runtime_error("ssp resampling produced the wrong number of offspring");
  return children;
}

}  // namespace

std::vector<long> offspring_counts(std::span<const double> weights, ResamplingScheme scheme,
                                   Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("resample: empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("resample: negative or NaN weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("resample: weights are not normalized");
  switch (scheme) {
    case ResamplingScheme::ssp: return ssp_counts(weights, rng);
    case ResamplingScheme::systematic: return systematic_counts(weights, rng);
    case ResamplingScheme::multinomial: return multinomial_counts(weights, rng);
    case ResamplingScheme::stratified: return stratified_counts(weights, rng);
  }
  throw std::logic_error("unreachable");
}

std::vector<std::uint32_t> resample(std::span<const double> weights, ResamplingScheme scheme,
                                    Rng& rng) {
  const auto counts = offspring_counts(weights, scheme, rng);
  std::vector<std::uint32_t> ancestors;
  ancestors.reserve(weights.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (long c = 0; c < counts[k]; ++c) ancestors.push_back(static_cast<std::uint32_t>(k));
  return ancestors;
}

}  // namespace sossm

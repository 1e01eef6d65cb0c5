#include "sossm/models/urn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sossm {

double urn_transition(const UrnSpec& spec, long w1, long w2) {
  const auto [lo, hi] = spec.support();
  if (w1 < lo || w1 > hi) return 0.0;
  const double j = static_cast<double>(spec.j);
  const double k = static_cast<double>(spec.k);
  const double r = static_cast<double>(spec.r);
  const double w = static_cast<double>(w1);
  const double jk = j * k;
  if (w2 == w1 - 1) return (j - r + w) * w / jk;
  if (w2 == w1) return ((r - w) * w + (j - r + w) * (k - w)) / jk;
  if (w2 == w1 + 1) return (r - w) * (k - w) / jk;
  return 0.0;
}

std::vector<long> urn_simulate(const UrnSpec& spec, long T, Rng& rng) {
  if (!spec.valid()) throw std::invalid_argument("urn_simulate: invalid spec");
  if (spec.r > spec.j)
    throw std::invalid_argument("urn_simulate: start W_1 = 0 needs r <= j");
  std::vector<long> w;
  w.reserve(static_cast<std::size_t>(T) + 1);
  w.push_back(0);
  for (long t = 0; t < T; ++t) {
    const long cur = w.back();
    const double p_down = urn_transition(spec, cur, cur - 1);
    const double p_stay = urn_transition(spec, cur, cur);
    const double u = rng.uniform01();
    if (u < p_down)
      w.push_back(cur - 1);
    else if (u < p_down + p_stay)
      w.push_back(cur);
    else
      w.push_back(cur + 1);
  }
  return w;
}

UrnInference urn_as_cloned_ssm(const std::vector<long>& w) {
  if (w.size() < 2) throw std::invalid_argument("urn_as_cloned_ssm: need at least two values");
  UrnInference out;
  out.ys.reserve(w.size() - 1);
  for (std::size_t t = 0; t + 1 < w.size(); ++t)
    out.ys.push_back({static_cast<double>(w[t]), static_cast<double>(w[t + 1])});
  SsmModel m;
  m.period = static_cast<int>(out.ys.size());
  m.state_dim = 0;
  m.obs_dim = 2;
  // The marginal factor of (w_t, w_{t+1}) cancels across theta and never needs
  // evaluating; only the conditional transition probability enters the weight.
  m.obs_logdensity = [](long, std::span<const double> th, std::span<const double>,
                        std::span<const double> y) {
    const UrnSpec spec{std::lround(th[0]), std::lround(th[1]), std::lround(th[2])};
    const double p = urn_transition(spec, std::lround(y[0]), std::lround(y[1]));
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  };
  out.model = std::move(m);
  return out;
}

namespace {

std::vector<std::vector<long>> urn_grid(const std::vector<long>& w, long bound) {
  long v = 0;
  for (long x : w) v = std::max(v, x);
  std::vector<std::vector<long>> elements;
  for (long j = 1; j <= bound; ++j)
    for (long k = std::max(1L, v); k <= bound; ++k)
      for (long r = std::max(1L, v); r <= bound && r < j + k; ++r)
        elements.push_back({j, k, r});
  if (elements.empty()) throw std::invalid_argument("urn_space: empty grid; raise the bound");
  return elements;
}

}  // namespace

ParameterSpace urn_space(const std::vector<long>& w, long bound) {
  return ParameterSpace::discrete_grid(urn_grid(w, bound), 1, bound);
}

std::pair<UrnSpec, double> urn_grid_mle(const std::vector<long>& w, long bound) {
  const auto grid = urn_grid(w, bound);
  UrnSpec best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (const auto& e : grid) {
    const UrnSpec spec{e[0], e[1], e[2]};
    double ll = 0.0;
    for (std::size_t t = 0; t + 1 < w.size(); ++t) {
      const double p = urn_transition(spec, w[t], w[t + 1]);
      if (p <= 0.0) {
        ll = -std::numeric_limits<double>::infinity();
        break;
      }
      ll += std::log(p);
    }
    if (ll > best_ll) {
      best_ll = ll;
      best = spec;
    }
  }
  if (!std::isfinite(best_ll))
    throw std::runtime_error("urn_grid_mle: no grid point has positive likelihood");
  return {best, best_ll};
}

}  // namespace sossm

#pragma once

#include <utility>
#include <vector>

#include "sossm/param_space.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// Bernoulli-Laplace urn: two urns holding j and k balls, r < j + k of them
/// red, all red balls starting in urn 1; one ball from each urn is swapped per
/// step. W_t = red count in urn 2, a birth-death chain on S = {max(0, r-j) ..
/// min(k, r)}.
struct UrnSpec {
  long j = 0;
  long k = 0;
  long r = 0;

  bool valid() const { return j >= 1 && k >= 1 && r >= 0 && r < j + k; }
  std::pair<long, long> support() const { return {std::max(0L, r - j), std::min(k, r)}; }
};

/// P(W_{t+1} = w2 | W_t = w1); zero off the tridiagonal or when w1 is outside
/// the support.
double urn_transition(const UrnSpec& spec, long w1, long w2);

/// Simulate w_{1:T+1} from W_1 = 0 (requires r <= j so the start is feasible).
std::vector<long> urn_simulate(const UrnSpec& spec, long T, Rng& rng);

/// The degenerate SSM whose likelihood is prod_t p_theta(w_{t+1} | w_t):
/// observations are the consecutive pairs (w_t, w_{t+1}); the state is empty;
/// theta = (j, k, r) as three discrete coordinates.
struct UrnInference {
  ObsSequence ys;  // T rows of (w_t, w_{t+1})
  SsmModel model;
};
UrnInference urn_as_cloned_ssm(const std::vector<long>& w);

/// The data-driven parameter grid: with v = max_t w_t,
/// {(j,k,r) in {1..bound}^3 : r < j + k, r >= v, k >= v}.
ParameterSpace urn_space(const std::vector<long>& w, long bound);

/// Exhaustive argmax of sum_t log p_theta(w_{t+1}|w_t) over the grid above,
/// with its attained value. Ties resolve to the lexicographically smallest.
std::pair<UrnSpec, double> urn_grid_mle(const std::vector<long>& w, long bound);

}  // namespace sossm

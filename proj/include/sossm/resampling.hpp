#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sossm/rng.hpp"

namespace sossm {

enum class ResamplingScheme { ssp, systematic, multinomial, stratified };

ResamplingScheme resampling_scheme_from_string(const std::string& name);
std::string to_string(ResamplingScheme scheme);

/// Effective sample size 1 / sum W^2 of a normalized weight vector.
/// Rejects input whose sum is not 1 (within 1e-9).
double ess(std::span<const double> weights);

/// Offspring counts O_n with E[O_n] = N * W_n for every scheme; SSP and
/// systematic additionally satisfy |O_n - N*W_n| < 1 on every draw.
std::vector<long> offspring_counts(std::span<const double> weights, ResamplingScheme scheme,
                                   Rng& rng);

/// Ancestor indices in {0..N-1}, nondecreasing (index n repeated O_n times).
std::vector<std::uint32_t> resample(std::span<const double> weights, ResamplingScheme scheme,
                                    Rng& rng);

}  // namespace sossm

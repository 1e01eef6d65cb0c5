#pragma once

#include <span>
#include <vector>

#include "sossm/rng.hpp"

namespace sossm {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// The parameter set Theta = Theta_1 x Theta_2: an axis-aligned box of
/// continuous coordinates times an explicit finite set of integer vectors.
/// Parameter vectors are stored as doubles with layout
/// [continuous_0..continuous_{d1-1}, discrete_0..discrete_{d2-1}]; discrete
/// coordinates are held at exactly integral values.
class ParameterSpace {
 public:
  ParameterSpace() = default;

  static ParameterSpace continuous_box(std::vector<Interval> box);
  static ParameterSpace discrete_grid(std::vector<std::vector<long>> elements, long a, long b);
  static ParameterSpace product(std::vector<Interval> box, std::vector<std::vector<long>> elements,
                                long a, long b);

  int continuous_dim() const { return static_cast<int>(box_.size()); }
  int discrete_dim() const { return d2_; }
  int dim() const { return continuous_dim() + d2_; }

  const std::vector<Interval>& box() const { return box_; }
  /// Lexicographically sorted discrete elements.
  const std::vector<std::vector<long>>& discrete_set() const { return discrete_; }
  long discrete_lower() const { return a_; }
  long discrete_upper() const { return b_; }

  bool contains(std::span<const double> theta) const;
  bool discrete_contains(std::span<const long> psi) const;

  /// Clamp the continuous block into the box and map the discrete block to the
  /// nearest element of the set (Euclidean distance, lexicographic tie-break).
  std::vector<double> project(std::span<const double> v) const;

  /// Uniform draw: uniform on the box, uniform over the discrete set.
  void sample_uniform(Rng& rng, std::span<double> out) const;

 private:
  void validate() const;

  std::vector<Interval> box_;
  int d2_ = 0;
  long a_ = 0;
  long b_ = 0;
  std::vector<std::vector<long>> discrete_;
};

}  // namespace sossm

#pragma once

#include <vector>

namespace sossm {

/// Basis of the natural cubic splines on knots 0 = xi_1 < ... < xi_{p+1} = 24,
/// with the constant function removed and every basis function pinned to 0 at
/// s = 0, then scaled to unit sup-norm. Dimension is p = (number of knots) - 1.
class SplineBasis {
 public:
  explicit SplineBasis(std::vector<double> knots);

  int dim() const { return static_cast<int>(knots_.size()) - 1; }
  const std::vector<double>& knots() const { return knots_; }

  /// b(s) for s in [0, 24]; s outside the domain is rejected.
  std::vector<double> eval(double s) const;

 private:
  std::vector<double> raw_eval(double s) const;

  std::vector<double> knots_;
  std::vector<double> scale_;
};

/// Default knot grids: {0,12,24} for p=2, {0,8,16,24} for p=3, and so on
/// (equispaced p+1 knots over [0,24]).
std::vector<double> default_spline_knots(int p);

/// Convenience evaluator matching the basis above.
std::vector<double> natural_cubic_basis(const std::vector<double>& knots, double s);

}  // namespace sossm

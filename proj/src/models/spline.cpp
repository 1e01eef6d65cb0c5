#include "sossm/models/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sossm {

namespace {

inline double cube_plus(double x) { return x > 0.0 ? x * x * x : 0.0; }

}  // namespace

SplineBasis::SplineBasis(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw std::invalid_argument("SplineBasis: need at least two knots");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1]))
      throw std::invalid_argument("SplineBasis: knots must be strictly increasing");
  if (knots_.front() != 0.0 || knots_.back() != 24.0)
    throw std::invalid_argument("SplineBasis: knots must start at 0 and end at 24");
  // Unit sup-norm on a fine grid.
  scale_.assign(static_cast<std::size_t>(dim()), 0.0);
  const int grid = 2400;
  for (int g = 0; g <= grid; ++g) {
    const auto v = raw_eval(24.0 * g / grid);
    for (std::size_t j = 0; j < v.size(); ++j) scale_[j] = std::max(scale_[j], std::abs(v[j]));
  }
  for (auto& s : scale_)
    if (s == 0.0) s = 1.0;
}

std::vector<double> SplineBasis::raw_eval(double s) const {
  // Truncated-power natural spline basis with the constant dropped: the
  // identity map, then d_k - d_{K-1} for interior k. Every function vanishes
  // at s = 0 and has zero second derivative at both boundary knots.
  const std::size_t K = knots_.size();
  const double xi_last = knots_[K - 1];
  auto d = [&](std::size_t k) {
    return (cube_plus(s - knots_[k]) - cube_plus(s - xi_last)) / (xi_last - knots_[k]);
  };
  std::vector<double> out;
  out.reserve(K - 1);
  out.push_back(s);
  if (K >= 3) {
    const double d_last = d(K - 2);
    for (std::size_t k = 0; k + 2 < K; ++k) out.push_back(d(k) - d_last);
  }
  return out;
}

std::vector<double> SplineBasis::eval(double s) const {
  if (s < 0.0 || s > 24.0) throw std::invalid_argument("SplineBasis: s outside [0, 24]");
  auto out = raw_eval(s);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] /= scale_[j];
  return out;
}

std::vector<double> default_spline_knots(int p) {
  if (p < 1) throw std::invalid_argument("default_spline_knots: p must be >= 1");
  std::vector<double> knots(static_cast<std::size_t>(p) + 1);
  for (int i = 0; i <= p; ++i) knots[static_cast<std::size_t>(i)] = 24.0 * i / p;
  return knots;
}

std::vector<double> natural_cubic_basis(const std::vector<double>& knots, double s) {
  return SplineBasis(knots).eval(s);
}

}  // namespace sossm

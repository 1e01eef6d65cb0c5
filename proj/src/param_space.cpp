#include "sossm/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sossm {

ParameterSpace ParameterSpace::continuous_box(std::vector<Interval> box) {
  ParameterSpace s;
  s.box_ = std::move(box);
  s.validate();
  return s;
}

ParameterSpace ParameterSpace::discrete_grid(std::vector<std::vector<long>> elements, long a,
                                             long b) {
  return product({}, std::move(elements), a, b);
}

ParameterSpace ParameterSpace::product(std::vector<Interval> box,
                                       std::vector<std::vector<long>> elements, long a, long b) {
  ParameterSpace s;
  s.box_ = std::move(box);
  s.discrete_ = std::move(elements);
  s.a_ = a;
  s.b_ = b;
  s.d2_ = s.discrete_.empty() ? 0 : static_cast<int>(s.discrete_.front().size());
  std::sort(s.discrete_.begin(), s.discrete_.end());
  s.discrete_.erase(std::unique(s.discrete_.begin(), s.discrete_.end()), s.discrete_.end());
  s.validate();
  return s;
}

void ParameterSpace::validate() const {
  if (box_.empty() && discrete_.empty())
    throw std::invalid_argument("ParameterSpace: empty in both components");
  for (std::size_t i = 0; i < box_.size(); ++i) {
    if (!(box_[i].lo < box_[i].hi))
      throw std::invalid_argument("ParameterSpace: box interval " + std::to_string(i) +
                                  " has lower >= upper");
  }
  if (d2_ > 0) {
    if (a_ > b_) throw std::invalid_argument("ParameterSpace: discrete bounds a > b");
    for (const auto& e : discrete_) {
      if (static_cast<int>(e.size()) != d2_)
        throw std::invalid_argument("ParameterSpace: inconsistent discrete dimension");
      for (long v : e)
        if (v < a_ || v > b_)
          throw std::invalid_argument("ParameterSpace: discrete element outside {a..b}");
    }
  }
}

bool ParameterSpace::contains(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim()) return false;
  for (std::size_t i = 0; i < box_.size(); ++i) {
    if (theta[i] < box_[i].lo || theta[i] > box_[i].hi) return false;
  }
  if (d2_ > 0) {
    std::vector<long> psi(d2_);
    for (int j = 0; j < d2_; ++j) {
      const double x = theta[box_.size() + j];
      const long r = std::lround(x);
      if (x != static_cast<double>(r)) return false;
      psi[j] = r;
    }
    return discrete_contains(psi);
  }
  return true;
}

bool ParameterSpace::discrete_contains(std::span<const long> psi) const {
  if (static_cast<int>(psi.size()) != d2_) return false;
  std::vector<long> key(psi.begin(), psi.end());
  return std::binary_search(discrete_.begin(), discrete_.end(), key);
}

std::vector<double> ParameterSpace::project(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim())
    throw std::invalid_argument("ParameterSpace::project: dimension mismatch");
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < box_.size(); ++i)
    out[i] = std::min(std::max(out[i], box_[i].lo), box_[i].hi);
  if (d2_ > 0) {
    // Set is sorted, so scanning with strict improvement breaks ties
    // lexicographically.
    const double* w = v.data() + box_.size();
    double best = std::numeric_limits<double>::infinity();
    const std::vector<long>* arg = nullptr;
    for (const auto& e : discrete_) {
      double d = 0.0;
      for (int j = 0; j < d2_; ++j) {
        const double diff = w[j] - static_cast<double>(e[j]);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = &e;
      }
    }
    for (int j = 0; j < d2_; ++j) out[box_.size() + j] = static_cast<double>((*arg)[j]);
  }
  return out;
}

void ParameterSpace::sample_uniform(Rng& rng, std::span<double> out) const {
  if (static_cast<int>(out.size()) != dim())
    throw std::invalid_argument("ParameterSpace::sample_uniform: dimension mismatch");
  for (std::size_t i = 0; i < box_.size(); ++i) out[i] = rng.uniform(box_[i].lo, box_[i].hi);
  if (d2_ > 0) {
    const auto& e = discrete_[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<long>(discrete_.size()) - 1))];
    for (int j = 0; j < d2_; ++j) out[box_.size() + j] = static_cast<double>(e[j]);
  }
}

}  // namespace sossm

#include "sossm/rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace sossm {

namespace {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) { seed_state(); }

Rng::Rng(std::uint64_t key, int) : key_(key) { seed_state(); }

void Rng::seed_state() {
  std::uint64_t z = key_;
  for (auto& si : s_) {
    z = splitmix64(z);
    si = z;
  }
}

Rng Rng::substream(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t k = key_;
  k = splitmix64(k ^ (0xd1342543de82ef95ULL * (a + 0x632be59bd9b4e019ULL)));
  k = splitmix64(k ^ (0xaef17502108ef2d9ULL * (b + 0x9e3779b97f4a7c15ULL)));
  return Rng(k, 0);
}

std::uint64_t Rng::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

long Rng::uniform_int(long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(next_u64() % span);
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

double Rng::standard_normal() {
  double u = uniform01();
  if (u <= 0.0) u = 0x1.0p-53;
  return normal_quantile(u);
}

double Rng::normal(double mean, double sd) {
  if (sd == 0.0) return mean;
  return mean + sd * standard_normal();
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost the shape, then apply the standard power correction.
    const double g = gamma(shape + 1.0);
    double u = uniform01();
    if (u <= 0.0) u = 0x1.0p-53;
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

void Rng::dirichlet(std::span<const double> alpha, std::span<double> out) {
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(alpha[i]);
    sum += out[i];
  }
  for (std::size_t i = 0; i < alpha.size(); ++i) out[i] /= sum;
}

long Rng::binomial(long n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  long count = 0;
  for (long i = 0; i < n; ++i) count += bernoulli(p) ? 1 : 0;
  return count;
}

double Rng::student_t(double nu) {
  const double z = standard_normal();
  const double w = chi_squared(nu);
  return z / std::sqrt(w / nu);
}

double Rng::truncated_normal(double mean, double sd, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("truncated_normal: lo > hi");
  if (sd == 0.0) return std::min(std::max(mean, lo), hi);
  const double pa = normal_cdf((lo - mean) / sd);
  const double pb = normal_cdf((hi - mean) / sd);
  const double delta = pb - pa;
  if (delta <= 0.0) return std::min(std::max(mean, lo), hi);
  double p = pa + uniform01() * delta;
  p = std::min(std::max(p, 0x1.0p-53), 1.0 - 0x1.0p-53);
  const double x = mean + sd * normal_quantile(p);
  return std::min(std::max(x, lo), hi);
}

double Rng::truncated_student(double mean, double scale, double nu, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("truncated_student: lo > hi");
  if (scale == 0.0) return std::min(std::max(mean, lo), hi);
  const double pa = student_cdf((lo - mean) / scale, nu);
  const double pb = student_cdf((hi - mean) / scale, nu);
  const double delta = pb - pa;
  if (delta <= 0.0) return std::min(std::max(mean, lo), hi);
  double p = pa + uniform01() * delta;
  p = std::min(std::max(p, 0x1.0p-53), 1.0 - 0x1.0p-53);
  const double x = mean + scale * student_quantile(p, nu);
  return std::min(std::max(x, lo), hi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> dist(0.0, 1.0);
  return boost::math::quantile(dist, p);
}

double student_cdf(double x, double nu) {
  const boost::math::students_t_distribution<double> dist(nu);
  return boost::math::cdf(dist, x);
}

double student_quantile(double p, double nu) {
  const boost::math::students_t_distribution<double> dist(nu);
  return boost::math::quantile(dist, p);
}

}  // namespace sossm

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sossm {

/// Counter-based random stream. Every generator is identified by a 64-bit key;
/// substream(a, b) derives a child key by hashing, so a particle filter can hand
/// out one independent stream per (time step, particle) pair and produce the
/// same draws regardless of evaluation order or parallel scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Derive an independent stream keyed by (a, b) under this stream's key.
  Rng substream(std::uint64_t a, std::uint64_t b = 0) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform01();
  double uniform(double lo, double hi);
  /// Uniform integer on {lo, ..., hi}.
  long uniform_int(long lo, long hi);
  bool bernoulli(double p);

  /// Standard normal via inverse-CDF (one uniform per draw).
  double standard_normal();
  double normal(double mean, double sd);

  /// Gamma(shape, 1), Marsaglia-Tsang; shape > 0.
  double gamma(double shape);
  double chi_squared(double dof);
  double beta(double a, double b);
  /// Dirichlet(alpha); writes into out (same length as alpha).
  void dirichlet(std::span<const double> alpha, std::span<double> out);
  /// Binomial(n, p) by Bernoulli summation; intended for small n.
  long binomial(long n, double p);
  /// Student-t with nu degrees of freedom (location 0, scale 1).
  double student_t(double nu);

  /// N(mean, sd^2) conditioned on [lo, hi]; requires lo <= hi. Exact inverse-CDF.
  double truncated_normal(double mean, double sd, double lo, double hi);
  /// Location-scale Student-t(nu) conditioned on [lo, hi]. Exact inverse-CDF.
  double truncated_student(double mean, double scale, double nu, double lo, double hi);

  std::uint64_t key() const { return key_; }

 private:
  Rng(std::uint64_t key, int);  // internal: key is already mixed
  void seed_state();

  std::uint64_t key_;
  std::array<std::uint64_t, 4> s_;
};

/// Phi(x) for the standard normal.
double normal_cdf(double x);
/// Phi^{-1}(p); p in (0, 1).
double normal_quantile(double p);
/// CDF of the standard Student-t with nu dof.
double student_cdf(double x, double nu);
/// Quantile of the standard Student-t with nu dof.
double student_quantile(double p, double nu);

}  // namespace sossm

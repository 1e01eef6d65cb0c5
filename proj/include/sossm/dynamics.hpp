#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "sossm/param_space.hpp"
#include "sossm/rng.hpp"

namespace sossm {

enum class Flavor {
  none,            // identity kernel
  fast_vanishing,  // TN with h_t = t^{-alpha}, alpha > 1
  slow_vanishing,  // TN off-epoch, TS(nu) at epochs, h_t = t^{-alpha}
  mixed,           // continuous + discrete kernels with epoch boosts
  pomp_geometric,  // TN with the geometric pomp-style h sequence
  pomp_hyperbolic  // TN with the hyperbolic pomp-style h sequence
};

/// How the epoch sequence (t_p) advances from one epoch to the next.
enum class EpochRule {
  log_sq_ceil,      // t_p + Delta * ceil(log(t_p)^2)
  log_pow_ceil,     // t_p + Delta * ceil(log(t_p)^{1 - beta/2})
  if_log_sq_floor,  // t_p + Delta * T * floor(log(t_p)^2); keeps t_p = 1 (mod T)
};

/// The artificial-dynamics kernel family (K_t): which kernels fire at which
/// times, with what scales, and where the sparse "exploration" epochs sit.
struct DynamicsSchedule {
  Flavor flavor = Flavor::none;

  double alpha = 0.5;   // decay exponent of h_t for fast/slow (fast default 1.1)
  double h1 = 0.0;      // value of h at t = 1 for fast/slow flavors
  double alpha1 = 0.5;  // discrete decay, off-epoch
  double alpha2 = 0.5;  // discrete decay, at epochs (tempered by beta_t)
  double alpha3 = 0.5;  // continuous decay for the mixed flavor
  double beta = 0.01;   // tempering exponent, in (0, 1/2)
  double c = 1.0;       // discrete kernel scale, in (0, 1]

  Eigen::MatrixXd sigma;  // d1 x d1 SPD scale matrix; empty means identity
  double nu = 100.0;      // Student-t degrees of freedom at epochs

  long delta = 1;  // epoch spacing multiplier
  long t1 = 0;     // first epoch time; 0 disables epochs
  std::optional<EpochRule> epoch_rule;  // defaults per flavor when unset

  long period = 1;  // T; used by pomp h sequences and the IF epoch rule

  std::vector<double> h_override;  // explicit h_t values (1-indexed); wins when indexed
  std::vector<long> reset_times;   // re-base the time index of h_t after each T_i

  long rejection_cap = 1000000;  // attempts before truncation/restriction gives up

  EpochRule effective_epoch_rule() const;
  bool has_epochs() const { return t1 > 0; }
  /// Validates exponents, Sigma (symmetric, min eigenvalue > 0) and epoch setup.
  void validate(int continuous_dim) const;
};

/// h_t for the schedule; see the flavor table. t >= 1 required.
double h_at(const DynamicsSchedule& schedule, long t);

/// beta_t = (log t)^{-beta}; lies in (0,1) for t >= 3.
double beta_t(const DynamicsSchedule& schedule, long t);

/// Discrete jump probability p_t; at_epoch selects c*t^{-alpha2*beta_t} over c*t^{-alpha1}.
double discrete_jump_prob(const DynamicsSchedule& schedule, long t, bool at_epoch);

/// The epoch after t_p under the schedule's rule. Requires t_p >= 2 and a
/// strictly larger result.
long next_epoch(long t_p, const DynamicsSchedule& schedule);

/// True iff t is in the epoch sequence generated from t1.
bool is_epoch(const DynamicsSchedule& schedule, long t);

/// Incremental walker over (t_p); engines advance it alongside their own clock.
class EpochSequence {
 public:
  explicit EpochSequence(const DynamicsSchedule& schedule)
      : schedule_(&schedule), next_(schedule.has_epochs() ? schedule.t1 : -1) {}
  bool matches(long t) const { return next_ > 0 && t == next_; }
  void advance() { next_ = next_epoch(next_, *schedule_); }
  /// Skip to the first epoch >= t.
  void fast_forward(long t) {
    while (next_ > 0 && next_ < t) advance();
  }
  long upcoming() const { return next_; }

 private:
  const DynamicsSchedule* schedule_;
  long next_;
};

/// Sample from N(center, h^2 Sigma) conditioned on the box of `space`.
/// Exact coordinatewise inverse-CDF when Sigma is diagonal (or empty =
/// identity); Cholesky proposal + rejection otherwise, failing after
/// `rejection_cap` attempts. h = 0 returns the center unchanged.
std::vector<double> sample_truncated_normal(std::span<const double> center, double h,
                                            const Eigen::MatrixXd& sigma,
                                            const ParameterSpace& space, Rng& rng,
                                            long rejection_cap = 1000000);

/// Same, for the location-scale Student-t(nu) family.
std::vector<double> sample_truncated_student(std::span<const double> center, double h,
                                             const Eigen::MatrixXd& sigma, double nu,
                                             const ParameterSpace& space, Rng& rng,
                                             long rejection_cap = 1000000);

/// One step of the integer kernel: per coordinate, psi_i +/- Binomial(b-a, p)
/// with a fair sign, restricted to the space's discrete set. Sampled by
/// rejection while the acceptance rate is healthy, with an exact
/// enumeration-renormalization fallback (same law) once it is not; errors when
/// no set element is reachable.
std::vector<long> sample_discrete_kernel(std::span<const long> psi, double p, long a, long b,
                                         const ParameterSpace& space, Rng& rng,
                                         long rejection_cap = 1000000);

/// Apply K_t to theta, with epoch membership supplied by the caller.
/// Writes the moved parameter into `out` (may alias theta's storage only if
/// identical spans are avoided by the caller; engines use distinct buffers).
void apply_kernel(const DynamicsSchedule& schedule, long t, bool at_epoch,
                  std::span<const double> theta, const ParameterSpace& space, Rng& rng,
                  std::span<double> out);

/// K_t(theta, .) with epoch membership computed from the schedule itself.
std::vector<double> kernel_at(const DynamicsSchedule& schedule, long t,
                              std::span<const double> theta, const ParameterSpace& space,
                              Rng& rng);

}  // namespace sossm

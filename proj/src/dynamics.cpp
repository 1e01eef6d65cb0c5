#include "sossm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sossm {

namespace {

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

void check_center_in_box(std::span<const double> center, const ParameterSpace& space,
                         const char* who) {
  const auto& box = space.box();
  if (center.size() != box.size())
    throw std::invalid_argument(std::string(who) + ": center dimension mismatch");
  for (std::size_t i = 0; i < box.size(); ++i)
    if (center[i] < box[i].lo || center[i] > box[i].hi)
      throw std::invalid_argument(std::string(who) + ": center outside the box");
}

void check_sigma(const Eigen::MatrixXd& sigma, std::size_t d, const char* who) {
  if (sigma.size() == 0) return;  // identity
  if (sigma.rows() != static_cast<Eigen::Index>(d) || sigma.cols() != sigma.rows())
    throw std::invalid_argument(std::string(who) + ": Sigma dimension mismatch");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw std::invalid_argument(std::string(who) + ": Sigma is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument(std::string(who) + ": Sigma is not positive definite");
}

enum class TailKind { gaussian, student };

std::vector<double> sample_truncated(std::span<const double> center, double h,
                                     const Eigen::MatrixXd& sigma, double nu,
                                     const ParameterSpace& space, Rng& rng, long rejection_cap,
                                     TailKind tail) {
  const char* who = tail == TailKind::gaussian ? "sample_truncated_normal"
                                               : "sample_truncated_student";
  check_center_in_box(center, space, who);
  check_sigma(sigma, center.size(), who);
  std::vector<double> out(center.begin(), center.end());
  if (h == 0.0 || center.empty()) return out;  // Dirac at the kernel's center

  const auto& box = space.box();
  const std::size_t d = center.size();
  if (sigma.size() == 0 || is_diagonal(sigma)) {
    for (std::size_t i = 0; i < d; ++i) {
      const double sd = h * (sigma.size() == 0 ? 1.0 : std::sqrt(sigma(i, i)));
      out[i] = tail == TailKind::gaussian
                   ? rng.truncated_normal(center[i], sd, box[i].lo, box[i].hi)
                   : rng.truncated_student(center[i], sd, nu, box[i].lo, box[i].hi);
    }
    return out;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(std::string(who) + ": Sigma Cholesky failed");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::VectorXd z(d);
  for (long attempt = 0; attempt < rejection_cap; ++attempt) {
    for (std::size_t i = 0; i < d; ++i) z[static_cast<Eigen::Index>(i)] = rng.standard_normal();
    double mix = 1.0;
    if (tail == TailKind::student) mix = std::sqrt(nu / rng.chi_squared(nu));
    const Eigen::VectorXd step = (h * mix) * (L * z);
    bool inside = true;
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = center[i] + step[static_cast<Eigen::Index>(i)];
      if (out[i] < box[i].lo || out[i] > box[i].hi) {
        inside = false;
        break;
      }
    }
    if (inside) return out;
  }
  throw std::runtime_error(std::string(who) + ": rejection cap exhausted");
}

}  // namespace

EpochRule DynamicsSchedule::effective_epoch_rule() const {
  if (epoch_rule) return *epoch_rule;
  return flavor == Flavor::mixed ? EpochRule::log_pow_ceil : EpochRule::log_sq_ceil;
}

void DynamicsSchedule::validate(int continuous_dim) const {
  switch (flavor) {
    case Flavor::none:
      break;
    case Flavor::fast_vanishing:
      if (h_override.empty() && !(alpha > 1.0))
        throw std::invalid_argument("schedule: fast-vanishing requires alpha > 1");
      break;
    case Flavor::slow_vanishing:
      if (!(alpha > 0.0)) throw std::invalid_argument("schedule: alpha must be > 0");
      break;
    case Flavor::mixed:
      if (!(alpha1 > 0.0 && alpha2 > 0.0 && alpha3 > 0.0))
        throw std::invalid_argument("schedule: alpha1, alpha2, alpha3 must be > 0");
      if (!(beta > 0.0 && beta < 0.5))
        throw std::invalid_argument("schedule: beta must lie in (0, 1/2)");
      if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("schedule: c must lie in (0, 1]");
      break;
    case Flavor::pomp_geometric:
    case Flavor::pomp_hyperbolic:
      if (!(alpha > 1.0 / 50.0 && alpha < 1.0))
        throw std::invalid_argument("schedule: pomp alpha must lie in (1/50, 1)");
      if (period < 1) throw std::invalid_argument("schedule: pomp flavors need period >= 1");
      break;
  }
  if (!(nu > 0.0)) throw std::invalid_argument("schedule: nu must be > 0");
  if (delta < 1) throw std::invalid_argument("schedule: delta must be >= 1");
  if (t1 != 0) {
    const long min_first = effective_epoch_rule() == EpochRule::if_log_sq_floor ? 3 : 2;
    if (t1 < min_first)
      throw std::invalid_argument("schedule: first epoch must be >= " + std::to_string(min_first));
    if (effective_epoch_rule() == EpochRule::if_log_sq_floor && period < 1)
      throw std::invalid_argument("schedule: IF epoch rule needs period >= 1");
  }
  check_sigma(sigma, static_cast<std::size_t>(continuous_dim), "schedule");
  for (std::size_t i = 1; i < reset_times.size(); ++i)
    if (reset_times[i] <= reset_times[i - 1])
      throw std::invalid_argument("schedule: reset times must be strictly increasing");
}

namespace {

long rebased_time(const DynamicsSchedule& schedule, long t) {
  long t_eff = t;
  for (long reset : schedule.reset_times)
    if (reset < t) t_eff = t - reset;
  return t_eff;
}

}  // namespace

double h_at(const DynamicsSchedule& schedule, long t) {
  if (t < 1) throw std::invalid_argument("h_at: t must be >= 1");
  const long te = rebased_time(schedule, t);
  if (static_cast<std::size_t>(te) <= schedule.h_override.size())
    return schedule.h_override[static_cast<std::size_t>(te - 1)];
  switch (schedule.flavor) {
    case Flavor::none:
      return 0.0;
    case Flavor::fast_vanishing:
    case Flavor::slow_vanishing:
      return te == 1 ? schedule.h1 : std::pow(static_cast<double>(te), -schedule.alpha);
    case Flavor::mixed:
      return std::pow(static_cast<double>(te), -schedule.alpha3);
    case Flavor::pomp_geometric: {
      const double T = static_cast<double>(schedule.period);
      return std::pow(schedule.alpha, static_cast<double>(te - 1) / (50.0 * T));
    }
    case Flavor::pomp_hyperbolic: {
      const double T = static_cast<double>(schedule.period);
      const double a = schedule.alpha;
      return a * (50.0 * T - 1.0) / (50.0 * a * T - 1.0 + (1.0 - a) * static_cast<double>(te));
    }
  }
  return 0.0;
}

double beta_t(const DynamicsSchedule& schedule, long t) {
  if (t < 2) throw std::invalid_argument("beta_t: t must be >= 2");
  return std::pow(std::log(static_cast<double>(t)), -schedule.beta);
}

double discrete_jump_prob(const DynamicsSchedule& schedule, long t, bool at_epoch) {
  if (t < 1) throw std::invalid_argument("discrete_jump_prob: t must be >= 1");
  const long te = rebased_time(schedule, t);
  double p;
  if (at_epoch)
    p = schedule.c * std::pow(static_cast<double>(te), -schedule.alpha2 * beta_t(schedule, te));
  else
    p = schedule.c * std::pow(static_cast<double>(te), -schedule.alpha1);
  return std::min(std::max(p, 0.0), 1.0);
}

long next_epoch(long t_p, const DynamicsSchedule& schedule) {
  if (t_p < 2) throw std::invalid_argument("next_epoch: t_p must be >= 2");
  const double lg = std::log(static_cast<double>(t_p));
  long out = t_p;
  switch (schedule.effective_epoch_rule()) {
    case EpochRule::log_sq_ceil:
      out = t_p + schedule.delta * static_cast<long>(std::ceil(lg * lg));
      break;
    case EpochRule::log_pow_ceil:
      out = t_p + schedule.delta * static_cast<long>(std::ceil(std::pow(lg, 1.0 - schedule.beta / 2.0)));
      break;
    case EpochRule::if_log_sq_floor:
      out = t_p + schedule.delta * schedule.period * static_cast<long>(std::floor(lg * lg));
      break;
  }
  if (out <= t_p) throw std::runtime_error("next_epoch: sequence stalled at t_p=" + std::to_string(t_p));
  return out;
}

bool is_epoch(const DynamicsSchedule& schedule, long t) {
  if (!schedule.has_epochs() || t < schedule.t1) return false;
  long tp = schedule.t1;
  while (tp < t) tp = next_epoch(tp, schedule);
  return tp == t;
}

std::vector<double> sample_truncated_normal(std::span<const double> center, double h,
                                            const Eigen::MatrixXd& sigma,
                                            const ParameterSpace& space, Rng& rng,
                                            long rejection_cap) {
  return sample_truncated(center, h, sigma, 0.0, space, rng, rejection_cap, TailKind::gaussian);
}

std::vector<double> sample_truncated_student(std::span<const double> center, double h,
                                             const Eigen::MatrixXd& sigma, double nu,
                                             const ParameterSpace& space, Rng& rng,
                                             long rejection_cap) {
  if (!(nu > 0.0)) throw std::invalid_argument("sample_truncated_student: nu must be > 0");
  return sample_truncated(center, h, sigma, nu, space, rng, rejection_cap, TailKind::student);
}

std::vector<long> sample_discrete_kernel(std::span<const long> psi, double p, long a, long b,
                                         const ParameterSpace& space, Rng& rng,
                                         long rejection_cap) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_discrete_kernel: p outside [0,1]");
  if (!space.discrete_contains(psi))
    throw std::invalid_argument("sample_discrete_kernel: psi outside the discrete set");
  const long n = b - a;
  std::vector<long> proposal(psi.size());
  const long attempts = std::min<long>(rejection_cap, 64);
  for (long attempt = 0; attempt < attempts; ++attempt) {
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const long jump = rng.binomial(n, p);
      const long sign = rng.bernoulli(0.5) ? 1 : -1;
      proposal[i] = psi[i] + sign * jump;
    }
    if (space.discrete_contains(proposal)) return proposal;
  }

  // The proposal rarely lands in the set (early times push the Binomial far
  // out). Sample the restricted kernel exactly: weight every set element by
  // the proposal probability of the move it requires and renormalize.
  std::vector<double> logpmf(static_cast<std::size_t>(n) + 1);
  for (long m = 0; m <= n; ++m) {
    if (p == 0.0)
      logpmf[static_cast<std::size_t>(m)] = m == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    else if (p == 1.0)
      logpmf[static_cast<std::size_t>(m)] = m == n ? 0.0 : -std::numeric_limits<double>::infinity();
    else
      logpmf[static_cast<std::size_t>(m)] =
          std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(m) + 1.0) -
          std::lgamma(static_cast<double>(n - m) + 1.0) + static_cast<double>(m) * std::log(p) +
          static_cast<double>(n - m) * std::log1p(-p);
  }
  const auto& elements = space.discrete_set();
  std::vector<double> logw(elements.size(), -std::numeric_limits<double>::infinity());
  const double log_half = std::log(0.5);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < elements.size(); ++e) {
    double lw = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const long delta = elements[e][i] - psi[i];
      const long mag = std::abs(delta);
      if (mag > n) {
        lw = -std::numeric_limits<double>::infinity();
        break;
      }
      lw += logpmf[static_cast<std::size_t>(mag)] + (delta != 0 ? log_half : 0.0);
    }
    logw[e] = lw;
    mx = std::max(mx, lw);
  }
  if (!std::isfinite(mx))
    throw std::runtime_error("sample_discrete_kernel: no reachable element in the set");
  double total = 0.0;
  for (auto& lw : logw) {
    lw = std::exp(lw - mx);
    total += lw;
  }
  double u = rng.uniform01() * total;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    u -= logw[e];
    if (u <= 0.0) return elements[e];
  }
  return elements.back();
}

void apply_kernel(const DynamicsSchedule& schedule, long t, bool at_epoch,
                  std::span<const double> theta, const ParameterSpace& space, Rng& rng,
                  std::span<double> out) {
  std::copy(theta.begin(), theta.end(), out.begin());
  if (schedule.flavor == Flavor::none) return;

  const int d1 = space.continuous_dim();
  const int d2 = space.discrete_dim();
  const auto cont_in = theta.subspan(0, static_cast<std::size_t>(d1));

  if (d1 > 0) {
    double h;
    bool student = false;
    switch (schedule.flavor) {
      case Flavor::mixed: {
        const long te = rebased_time(schedule, t);
        h = at_epoch ? std::pow(static_cast<double>(te), -schedule.alpha3 * beta_t(schedule, te))
                     : h_at(schedule, t);
        student = at_epoch;
        break;
      }
      case Flavor::slow_vanishing:
        h = h_at(schedule, t);
        student = at_epoch;
        break;
      default:  // fast_vanishing, pomp flavors: Gaussian only
        h = h_at(schedule, t);
        break;
    }
    const auto moved =
        student ? sample_truncated_student(cont_in, h, schedule.sigma, schedule.nu, space, rng,
                                           schedule.rejection_cap)
                : sample_truncated_normal(cont_in, h, schedule.sigma, space, rng,
                                          schedule.rejection_cap);
    std::copy(moved.begin(), moved.end(), out.begin());
  }

  if (d2 > 0 && schedule.flavor == Flavor::mixed) {
    std::vector<long> psi(d2);
    for (int j = 0; j < d2; ++j) psi[j] = std::lround(theta[static_cast<std::size_t>(d1 + j)]);
    const double p = discrete_jump_prob(schedule, t, at_epoch);
    const auto moved = sample_discrete_kernel(psi, p, space.discrete_lower(),
                                              space.discrete_upper(), space, rng,
                                              schedule.rejection_cap);
    for (int j = 0; j < d2; ++j) out[static_cast<std::size_t>(d1 + j)] = static_cast<double>(moved[j]);
  }
}

std::vector<double> kernel_at(const DynamicsSchedule& schedule, long t,
                              std::span<const double> theta, const ParameterSpace& space,
                              Rng& rng) {
  std::vector<double> out(theta.size());
  apply_kernel(schedule, t, is_epoch(schedule, t), theta, space, rng, out);
  return out;
}

}  // namespace sossm

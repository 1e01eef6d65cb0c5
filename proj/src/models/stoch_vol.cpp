#include "sossm/models/stoch_vol.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sossm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_theta(std::span<const double> th) {
  if (!(th[1] > 0.0) || !(th[2] > 0.0))
    throw std::invalid_argument("sv: beta and sigma must be positive");
}

double default_init_sd(std::span<const double> th) {
  const double alpha = th[0];
  const double a2 = std::min(alpha * alpha, 0.9999);
  return th[2] / std::sqrt(1.0 - a2);
}

}  // namespace

SsmModel make_sv_model(const SvOptions& opts) {
  SsmModel m;
  m.period = 1;
  m.state_dim = 1;
  m.obs_dim = 1;
  const SvOptions o = opts;
  m.sample_initial = [o](std::span<const double> th, Rng& rng, std::span<double> x) {
    check_theta(th);
    const double mean = o.init_mean ? o.init_mean(th) : 0.0;
    const double sd = o.init_sd ? o.init_sd(th) : default_init_sd(th);
    x[0] = rng.normal(mean, sd);
  };
  m.sample_transition = [o](long, std::span<const double> th, std::span<const double> xp,
                            Rng& rng, std::span<double> x) {
    check_theta(th);
    const double mean = th[0] * xp[0];
    if (o.student_transition)
      x[0] = mean + th[2] * rng.student_t(o.nu);
    else
      x[0] = rng.normal(mean, th[2]);
  };
  m.obs_logdensity = [](long, std::span<const double> th, std::span<const double> x,
                        std::span<const double> y) {
    check_theta(th);
    // log var = 2 log beta + x directly, so extreme states underflow to -inf
    // instead of producing log(0) + y^2/0.
    const double log_var = 2.0 * std::log(th[1]) + x[0];
    const double scaled = (y[0] / th[1]) * (y[0] / th[1]) * std::exp(-x[0]);
    return -0.5 * (kLog2Pi + log_var + scaled);
  };
  return m;
}

ObsSequence sv_simulate(const SsmModel& model, std::span<const double> theta, long T, Rng& rng) {
  ObsSequence ys;
  ys.reserve(static_cast<std::size_t>(T));
  double x = 0.0, xn = 0.0;
  std::span<double> xs(&x, 1), xns(&xn, 1);
  model.sample_initial(theta, rng, xs);
  for (long t = 1; t <= T; ++t) {
    if (t > 1) {
      model.sample_transition(t, theta, xs, rng, xns);
      x = xn;
    }
    const double sd = theta[1] * std::exp(0.5 * x);
    ys.push_back({rng.normal(0.0, sd)});
  }
  return ys;
}

}  // namespace sossm

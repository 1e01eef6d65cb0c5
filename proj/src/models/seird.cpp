#include "sossm/models/seird.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sossm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// theta layout
constexpr int kEta = 0, kGamma = 1, kMu = 2, kSigmaQ = 3, kSigmaB = 4, kKappa = 5,
              kLambda1 = 6, kLambda2 = 7;
// state layout
constexpr int kS = 0, kE = 1, kI = 2, kR = 3, kD = 4, kQ = 5, kBeta = 6;

bool invalid_state(std::span<const double> x) { return x[kS] < 0.0; }

void mark_invalid(std::span<double> x) {
  for (int i = 0; i < 7; ++i) x[i] = -1.0;
}

double beta_logpdf(double y, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return -kInf;
  if (!(y > 0.0) || !(y < 1.0)) return -kInf;
  return (a - 1.0) * std::log(y) + (b - 1.0) * std::log1p(-y) + std::lgamma(a + b) -
         std::lgamma(a) - std::lgamma(b);
}

// Dirichlet draw tolerating exactly-zero concentration components (those
// coordinates are almost-surely zero); negative components are the caller's
// responsibility.
bool dirichlet_allow_zero(std::span<const double> alpha, Rng& rng, std::span<double> out) {
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = alpha[i] > 0.0 ? rng.gamma(alpha[i]) : 0.0;
    sum += out[i];
  }
  if (!(sum > 0.0)) return false;
  for (std::size_t i = 0; i < alpha.size(); ++i) out[i] /= sum;
  return true;
}

// Shared by the initial draw and the transition: advance (compartments, q,
// beta) one step under theta.
void propagate(std::span<const double> theta, const std::array<double, 5>& comp, double q,
               double beta, Rng& rng, std::span<double> out) {
  const auto flow = seird_map(comp, beta, q, theta[kEta], theta[kGamma], theta[kMu]);
  std::array<double, 5> alpha;
  const double kappa = theta[kKappa];
  for (int i = 0; i < 5; ++i) {
    if (flow[static_cast<std::size_t>(i)] < 0.0) {
      mark_invalid(out);
      return;
    }
    alpha[static_cast<std::size_t>(i)] = flow[static_cast<std::size_t>(i)] / kappa;
  }
  if (!dirichlet_allow_zero(alpha, rng, out.subspan(0, 5))) {
    mark_invalid(out);
    return;
  }
  out[kQ] = std::exp(rng.normal(std::log(q), theta[kSigmaQ]));
  out[kBeta] = std::exp(rng.normal(std::log(beta), theta[kSigmaB]));
}

}  // namespace

std::array<double, 5> seird_map(const std::array<double, 5>& w, double beta, double q, double eta,
                                double gamma, double mu) {
  const double s = w[0], e = w[1], i = w[2], r = w[3], d = w[4];
  const double infection = beta * s * (e + q * i);
  const double symptomatic = eta * e;
  const double recover_e = gamma * e;
  const double recover_i = gamma * i;
  const double death = mu * i;
  return {s - infection,
          e + infection - symptomatic - recover_e,
          i + symptomatic - recover_i - death,
          r + recover_e + recover_i,
          d + death};
}

SsmModel make_seird_model() {
  SsmModel m;
  m.period = 1;
  m.state_dim = 7;
  m.obs_dim = 2;
  m.sample_initial = [](std::span<const double> th, Rng& rng, std::span<double> x) {
    const double i0 = rng.uniform(0.0, 1e-4);
    const double e0 = rng.uniform(0.0, 1e-4);
    const double q0 = rng.uniform(0.5, 1.0);
    const double b0 = rng.uniform(0.0, 0.5);
    propagate(th, {1.0 - i0 - e0, e0, i0, 0.0, 0.0}, q0, b0, rng, x);
  };
  m.sample_transition = [](long, std::span<const double> th, std::span<const double> xp,
                           Rng& rng, std::span<double> x) {
    if (invalid_state(xp)) {
      mark_invalid(x);
      return;
    }
    propagate(th, {xp[kS], xp[kE], xp[kI], xp[kR], xp[kD]}, xp[kQ], xp[kBeta], rng, x);
  };
  m.obs_logdensity = [](long, std::span<const double> th, std::span<const double> x,
                        std::span<const double> y) {
    if (invalid_state(x)) return -kInf;
    const double me = th[kEta] * x[kE];
    const double mi = th[kMu] * x[kI];
    return beta_logpdf(y[0], me / th[kLambda1], (1.0 - me) / th[kLambda1]) +
           beta_logpdf(y[1], mi / th[kLambda2], (1.0 - mi) / th[kLambda2]);
  };
  return m;
}

ParameterSpace seird_space() {
  std::vector<Interval> box = {
      {0.0, 1.0},    // eta
      {0.0, 0.5},    // gamma
      {0.0, 0.5},    // mu
      {0.0, 0.5},    // sigma_q
      {0.0, 0.5},    // sigma_beta
      {1e-7, 1e-4},  // kappa
      {1e-7, 1e-4},  // lambda1
      {1e-7, 1e-4},  // lambda2
  };
  return ParameterSpace::continuous_box(std::move(box));
}

double effective_reproduction(std::span<const double> theta, std::span<const double> state) {
  const double eta = theta[kEta], gamma = theta[kGamma], mu = theta[kMu];
  if (!(gamma + mu > 0.0) || !(gamma + eta > 0.0))
    throw std::invalid_argument("effective_reproduction: zero denominator");
  return state[kBeta] * state[kS] * (1.0 + state[kQ] * eta / (gamma + mu)) / (gamma + eta);
}

ObsSequence seird_simulate(std::span<const double> theta, long T, Rng& rng) {
  const SsmModel model = make_seird_model();
  ObsSequence ys;
  ys.reserve(static_cast<std::size_t>(T));
  std::vector<double> x(7), xn(7);
  model.sample_initial(theta, rng, x);
  for (long t = 1; t <= T; ++t) {
    if (t > 1) {
      model.sample_transition(t, theta, x, rng, xn);
      x.swap(xn);
    }
    if (invalid_state(x)) throw std::runtime_error("seird_simulate: state left the simplex");
    const double me = theta[kEta] * x[kE];
    const double mi = theta[kMu] * x[kI];
    const double a1 = me / theta[kLambda1], b1 = (1.0 - me) / theta[kLambda1];
    const double a2 = mi / theta[kLambda2], b2 = (1.0 - mi) / theta[kLambda2];
    const double y1 = a1 > 0.0 ? rng.beta(a1, b1) : 0.0;
    const double y2 = a2 > 0.0 ? rng.beta(a2, b2) : 0.0;
    ys.push_back({y1, y2});
  }
  return ys;
}

}  // namespace sossm

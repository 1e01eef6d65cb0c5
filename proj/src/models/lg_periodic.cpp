#include "sossm/models/lg_periodic.hpp"

#include <cmath>
#include <stdexcept>

namespace sossm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double normal_logpdf(double x, double mean, double sd) {
  if (sd < 0.0) throw std::invalid_argument("lg-periodic: negative sigma");
  if (sd == 0.0) return -std::numeric_limits<double>::infinity();
  const double z = (x - mean) / sd;
  return -0.5 * (kLog2Pi + z * z) - std::log(sd);
}

}  // namespace

LgPeriodicModel::LgPeriodicModel(int p, std::vector<double> knots)
    : p_(p), basis_(std::move(knots)) {
  if (basis_.dim() != p)
    throw std::invalid_argument("lg-periodic: knot count does not match p");
  rows_.reserve(24);
  for (int hour = 1; hour <= 24; ++hour) rows_.push_back(basis_.eval(hour));
}

SsmModel LgPeriodicModel::ssm() const {
  SsmModel m;
  m.period = 24;
  m.state_dim = p_;
  m.obs_dim = 1;
  const int p = p_;
  const auto rows = rows_;  // by value: the SsmModel may outlive this object
  m.sample_initial = [p](std::span<const double>, Rng& rng, std::span<double> x) {
    for (int j = 0; j < p; ++j) x[j] = rng.normal(0.0, 2.0);
  };
  m.sample_transition = [p](long, std::span<const double> th, std::span<const double> xp,
                            Rng& rng, std::span<double> x) {
    for (int j = 0; j < p; ++j) {
      const double sd = th[static_cast<std::size_t>(2 * p + 1 + j)];
      if (sd < 0.0) throw std::invalid_argument("lg-periodic: negative sigma");
      x[j] = rng.normal(th[static_cast<std::size_t>(p + j)] * xp[j], sd);
    }
  };
  m.obs_logdensity = [p, rows](long t, std::span<const double> th, std::span<const double> x,
                               std::span<const double> y) {
    const auto& b = rows[static_cast<std::size_t>(t - 24 * ((t - 1) / 24) - 1)];
    double mean = 0.0;
    for (int j = 0; j < p; ++j) mean += (th[static_cast<std::size_t>(j)] + x[j]) * b[static_cast<std::size_t>(j)];
    return normal_logpdf(y[0], mean, th[static_cast<std::size_t>(2 * p)]);
  };
  const LgSpec spec = lg_spec();
  m.exact_loglik = [spec](std::span<const double> th, const ObsSequence& ys) {
    return kf_loglik(spec, th, ys);
  };
  return m;
}

LgSpec LgPeriodicModel::lg_spec() const {
  LgSpec spec;
  spec.state_dim = p_;
  spec.obs_dim = 1;
  spec.period = 24;
  const int p = p_;
  const auto rows = rows_;  // by value: the spec outlives the model
  auto row_at = [rows](long t) -> const std::vector<double>& {
    return rows[static_cast<std::size_t>(t - 24 * ((t - 1) / 24) - 1)];
  };
  spec.m = [p, row_at](long t, std::span<const double> th) {
    const auto& b = row_at(t);
    double v = 0.0;
    for (int j = 0; j < p; ++j) v += th[static_cast<std::size_t>(j)] * b[j];
    return Eigen::VectorXd::Constant(1, v);
  };
  spec.A = [p, row_at](long t, std::span<const double>) {
    const auto& b = row_at(t);
    Eigen::MatrixXd a(1, p);
    for (int j = 0; j < p; ++j) a(0, j) = b[j];
    return a;
  };
  spec.B = [p](long, std::span<const double> th) {
    const double s1 = th[static_cast<std::size_t>(2 * p)];
    return Eigen::MatrixXd::Constant(1, 1, s1 * s1);
  };
  spec.C = [p](long, std::span<const double> th) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) c(j, j) = th[static_cast<std::size_t>(p + j)];
    return c;
  };
  spec.D = [p](long, std::span<const double> th) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
      const double s = th[static_cast<std::size_t>(2 * p + 1 + j)];
      d(j, j) = s * s;
    }
    return d;
  };
  spec.init_mean = [p](std::span<const double>) { return Eigen::VectorXd::Zero(p); };
  spec.init_cov = [p](std::span<const double>) {
    return (4.0 * Eigen::MatrixXd::Identity(p, p)).eval();
  };
  return spec;
}

ParameterSpace LgPeriodicModel::default_space() const {
  std::vector<Interval> box;
  for (int j = 0; j < p_; ++j) box.push_back({-10.0, 10.0});
  for (int j = 0; j < p_; ++j) box.push_back({-1.0, 1.0});
  for (int j = 0; j <= p_; ++j) box.push_back({0.0, 4.0});
  return ParameterSpace::continuous_box(std::move(box));
}

std::vector<double> LgPeriodicModel::draw_theta_star(Rng& rng) const {
  std::vector<double> th(static_cast<std::size_t>(theta_dim()));
  for (int j = 0; j < p_; ++j) th[static_cast<std::size_t>(j)] = rng.uniform(-2.0, 2.0);
  for (int j = 0; j < p_; ++j) th[static_cast<std::size_t>(p_ + j)] = rng.uniform(-1.0, 1.0);
  th[static_cast<std::size_t>(2 * p_)] = 0.5;
  for (int j = 1; j <= p_; ++j) th[static_cast<std::size_t>(2 * p_ + j)] = 1.0;
  return th;
}

ObsSequence LgPeriodicModel::simulate(std::span<const double> theta, long T, Rng& rng) const {
  ObsSequence ys;
  ys.reserve(static_cast<std::size_t>(T));
  std::vector<double> x(static_cast<std::size_t>(p_)), xn(static_cast<std::size_t>(p_));
  for (int j = 0; j < p_; ++j) x[static_cast<std::size_t>(j)] = rng.normal(0.0, 2.0);
  for (long t = 1; t <= T; ++t) {
    if (t > 1) {
      for (int j = 0; j < p_; ++j) {
        const double sd = theta[static_cast<std::size_t>(2 * p_ + 1 + j)];
        xn[static_cast<std::size_t>(j)] =
            rng.normal(theta[static_cast<std::size_t>(p_ + j)] * x[static_cast<std::size_t>(j)],
                       sd);
      }
      x.swap(xn);
    }
    const auto& b = basis_row(t);
    double mean = 0.0;
    for (int j = 0; j < p_; ++j)
      mean += (theta[static_cast<std::size_t>(j)] + x[static_cast<std::size_t>(j)]) * b[static_cast<std::size_t>(j)];
    ys.push_back({rng.normal(mean, theta[static_cast<std::size_t>(2 * p_)])});
  }
  return ys;
}

LgPeriodicModel make_lg_periodic(int p) { return LgPeriodicModel(p, default_spline_knots(p)); }

LgPeriodicModel make_lg_periodic(int p, std::vector<double> knots) {
  return LgPeriodicModel(p, std::move(knots));
}

}  // namespace sossm

#include <doctest.h>

#include <cmath>
#include <map>

#include "sossm/kalman.hpp"
#include "sossm/models/lg_periodic.hpp"
#include "sossm/models/seird.hpp"
#include "sossm/models/spline.hpp"
#include "sossm/models/stoch_vol.hpp"
#include "sossm/models/urn.hpp"

using namespace sossm;

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

TEST_CASE("spline basis vanishes at zero and has the right dimension") {
  const SplineBasis basis({0.0, 12.0, 24.0});
  CHECK(basis.dim() == 2);
  for (double v : basis.eval(0.0)) CHECK(v == 0.0);
  CHECK(natural_cubic_basis({0.0, 8.0, 16.0, 24.0}, 0.0).size() == 3);
  CHECK_THROWS(basis.eval(-0.5));
  CHECK_THROWS(basis.eval(24.5));
  CHECK_THROWS(SplineBasis({0.0, 12.0}).eval(25.0));
  CHECK_THROWS(SplineBasis({0.0, 12.0, 12.0, 24.0}));
}

TEST_CASE("spline basis is C^1 across knots (finite differences)") {
  const SplineBasis basis({0.0, 6.0, 12.0, 18.0, 24.0});
  const double h = 1e-5;
  for (double knot : {6.0, 12.0, 18.0}) {
    const auto left = basis.eval(knot - h);
    const auto right = basis.eval(knot + h);
    const auto left2 = basis.eval(knot - 2 * h);
    const auto right2 = basis.eval(knot + 2 * h);
    for (int j = 0; j < basis.dim(); ++j) {
      CHECK(std::abs(right[j] - left[j]) <= 1e-4);  // continuity
      const double dl = (left[j] - left2[j]) / h;
      const double dr = (right2[j] - right[j]) / h;
      CHECK(std::abs(dr - dl) <= 1e-4);  // first derivative
    }
  }
}

TEST_CASE("spline second derivative vanishes at the boundary knots") {
  const SplineBasis basis({0.0, 12.0, 24.0});
  const double h = 1e-3;
  for (int j = 0; j < basis.dim(); ++j) {
    // One-sided second-order stencils; exact for piecewise cubics.
    const double at24 = (2.0 * basis.eval(24.0)[j] - 5.0 * basis.eval(24.0 - h)[j] +
                         4.0 * basis.eval(24.0 - 2 * h)[j] - basis.eval(24.0 - 3 * h)[j]) /
                        (h * h);
    const double at0 = (2.0 * basis.eval(0.0)[j] - 5.0 * basis.eval(h)[j] +
                        4.0 * basis.eval(2 * h)[j] - basis.eval(3 * h)[j]) /
                       (h * h);
    CHECK(std::abs(at24) <= 1e-4);
    CHECK(std::abs(at0) <= 1e-4);
  }
}

TEST_CASE("lg-periodic: 24-periodicity of the readout") {
  const LgPeriodicModel lg = make_lg_periodic(2);
  CHECK(lg.basis_row(25) == lg.basis_row(1));
  CHECK(lg.basis_row(24) == lg.basis_row(48));
  const SsmModel m = lg.ssm();
  const std::vector<double> theta{1.0, -0.5, 0.3, 0.2, 0.5, 1.0, 1.0};
  const std::vector<double> x{0.4, -0.1};
  const std::vector<double> y{0.7};
  CHECK(m.obs_logdensity(1, theta, x, y) == m.obs_logdensity(25, theta, x, y));
  CHECK(m.obs_logdensity(7, theta, x, y) == m.obs_logdensity(7 + 24, theta, x, y));
}

TEST_CASE("lg-periodic: degenerate dynamics collapse the state") {
  const LgPeriodicModel lg = make_lg_periodic(1);
  const SsmModel m = lg.ssm();
  // rho = 0 and sigma_2 = 0: the state hits 0 after one transition.
  const std::vector<double> theta{1.5, 0.0, 0.5, 0.0};
  Rng rng(8);
  std::vector<double> x{3.0}, xn{0.0};
  m.sample_transition(2, theta, x, rng, xn);
  CHECK(xn[0] == 0.0);
}

TEST_CASE("lg-periodic: simulated likelihood peaks near theta_star") {
  const LgPeriodicModel lg = make_lg_periodic(1);
  const LgSpec spec = lg.lg_spec();
  Rng rng(2026);
  int wins = 0;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    const auto theta_star = lg.draw_theta_star(rng);
    const auto ys = lg.simulate(theta_star, 10000, rng);
    std::vector<double> perturbed = theta_star;
    // A random direction of norm 0.5.
    std::vector<double> dir(perturbed.size());
    double norm = 0.0;
    for (auto& d : dir) {
      d = rng.standard_normal();
      norm += d * d;
    }
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < dir.size(); ++j) perturbed[j] += 0.5 * dir[j] / norm;
    perturbed = lg.default_space().project(perturbed);
    if (kf_loglik(spec, theta_star, ys) >= kf_loglik(spec, perturbed, ys)) ++wins;
  }
  CHECK(wins >= 18);
}

TEST_CASE("lg model satisfies the positive-definiteness conditions on its box") {
  const LgPeriodicModel lg = make_lg_periodic(2);
  const LgSpec spec = lg.lg_spec();
  const auto space = lg.default_space();
  Rng rng(99);
  std::vector<double> theta(static_cast<std::size_t>(space.dim()));
  for (int trial = 0; trial < 50; ++trial) {
    space.sample_uniform(rng, theta);
    // Interior draws: keep sigma away from the zero boundary.
    for (int j = 2 * lg.p(); j < 3 * lg.p() + 1; ++j)
      theta[static_cast<std::size_t>(j)] = std::max(theta[static_cast<std::size_t>(j)], 0.05);
    for (long t = 1; t <= 24; ++t) {
      CHECK(spec.B(t, theta)(0, 0) > 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.D(t, theta), Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("sv model densities") {
  const SsmModel sv = make_sv_model();
  const std::vector<double> theta{0.9, 1.0, 0.3};
  const std::vector<double> x{0.0};
  // At x = 0 the observation is N(0, beta^2); at (y=1, beta=1) the log-density
  // is -log(2 pi)/2 - 1/2.
  const std::vector<double> y{1.0};
  CHECK(sv.obs_logdensity(1, theta, x, y) == doctest::Approx(-0.5 * kLog2Pi - 0.5));
  const std::vector<double> bad{0.9, -1.0, 0.3};
  CHECK_THROWS(sv.obs_logdensity(1, bad, x, y));
}

TEST_CASE("sv model with alpha = 0 and tiny sigma is near-iid") {
  SvOptions opts;
  opts.student_transition = false;
  const SsmModel sv = make_sv_model(opts);
  const std::vector<double> theta{0.0, 1.0, 1e-8};
  Rng rng(5);
  std::vector<double> x{0.7}, xn{0.0};
  for (int i = 0; i < 100; ++i) {
    sv.sample_transition(2, theta, x, rng, xn);
    x = xn;
  }
  CHECK(std::abs(x[0]) < 1e-6);
}

TEST_CASE("seird_map: identity at zero rates and exact conservation") {
  const std::array<double, 5> w{0.6, 0.1, 0.1, 0.15, 0.05};
  CHECK(seird_map(w, 0.0, 0.0, 0.0, 0.0, 0.0) == w);

  const std::array<double, 5> pure_s{1.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(seird_map(pure_s, 0.9, 0.5, 0.2, 0.1, 0.05) == pure_s);

  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 5> v;
    double sum = 0.0;
    for (auto& c : v) {
      c = rng.uniform01();
      sum += c;
    }
    for (auto& c : v) c /= sum;
    const auto out = seird_map(v, rng.uniform01(), rng.uniform01(), rng.uniform01(),
                               rng.uniform01(), rng.uniform01());
    const double out_sum = out[0] + out[1] + out[2] + out[3] + out[4];
    REQUIRE(std::abs(out_sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("seird transitions stay on the simplex") {
  const SsmModel model = make_seird_model();
  const std::vector<double> theta{0.3, 0.1, 0.05, 0.05, 0.05, 1e-5, 1e-5, 1e-5};
  Rng rng(7);
  std::vector<double> x(7), xn(7);
  int checked = 0;
  for (int rep = 0; rep < 500; ++rep) {
    model.sample_initial(theta, rng, x);
    for (int t = 2; t <= 20 && x[0] >= 0.0; ++t) {
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) {
        REQUIRE(x[static_cast<std::size_t>(i)] >= 0.0);
        sum += x[static_cast<std::size_t>(i)];
      }
      REQUIRE(std::abs(sum - 1.0) <= 1e-10);
      ++checked;
      model.sample_transition(t, theta, x, rng, xn);
      x.swap(xn);
    }
  }
  CHECK(checked > 5000);
}

TEST_CASE("seird beta observation mean is eta * E regardless of lambda") {
  // Beta(a/l, (1-a)/l) has mean a for any l > 0.
  Rng rng(8);
  for (double lambda : {1e-5, 1e-4}) {
    const double target = 0.3 * 0.002;  // eta * E
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += rng.beta(target / lambda, (1.0 - target) / lambda);
    CHECK(sum / n == doctest::Approx(target).epsilon(0.02));
  }
}

TEST_CASE("seird boundary: eta E = 0 sends positive observations to -inf") {
  const SsmModel model = make_seird_model();
  const std::vector<double> theta{0.0, 0.1, 0.05, 0.05, 0.05, 1e-5, 1e-5, 1e-5};
  const std::vector<double> x{0.9, 0.05, 0.03, 0.01, 0.01, 0.8, 0.2};
  const std::vector<double> y{0.001, 0.0005};
  CHECK(model.obs_logdensity(1, theta, x, y) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("effective reproduction number formula") {
  // (beta=0.3, S=1, q=1, eta=gamma=mu=0.1) -> 0.3 * (1 + 0.1/0.2) / 0.2 = 2.25.
  const std::vector<double> theta{0.1, 0.1, 0.1, 0.0, 0.0, 1e-5, 1e-5, 1e-5};
  const std::vector<double> state{1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.3};
  CHECK(effective_reproduction(theta, state) == doctest::Approx(2.25));

  const std::vector<double> no_q{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3};
  CHECK(effective_reproduction(theta, no_q) == doctest::Approx(0.3 / 0.2));

  const std::vector<double> no_s{0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.3};
  CHECK(effective_reproduction(theta, no_s) == doctest::Approx(0.0));

  const std::vector<double> degenerate{0.0, 0.0, 0.0, 0.0, 0.0, 1e-5, 1e-5, 1e-5};
  CHECK_THROWS(effective_reproduction(degenerate, state));
}

TEST_CASE("urn transition: enumerated row and support") {
  const UrnSpec spec{2, 2, 2};
  CHECK(urn_transition(spec, 1, 0) == doctest::Approx(0.25));
  CHECK(urn_transition(spec, 1, 1) == doctest::Approx(0.5));
  CHECK(urn_transition(spec, 1, 2) == doctest::Approx(0.25));
  CHECK(urn_transition(spec, 1, 3) == 0.0);
  CHECK(urn_transition(spec, -1, 0) == 0.0);

  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const long j = rng.uniform_int(1, 20);
    const long k = rng.uniform_int(1, 20);
    const long r = rng.uniform_int(1, j + k - 1);
    const UrnSpec s{j, k, r};
    REQUIRE(s.valid());
    const auto [lo, hi] = s.support();
    REQUIRE(lo <= hi);
    for (long w = lo; w <= hi; ++w) {
      const double row =
          urn_transition(s, w, w - 1) + urn_transition(s, w, w) + urn_transition(s, w, w + 1);
      REQUIRE(row == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("urn simulation: degenerate cases and empirical law") {
  Rng rng(10);
  const UrnSpec spec{3, 3, 3};
  CHECK(urn_simulate(spec, 0, rng) == std::vector<long>{0});

  const UrnSpec empty{3, 3, 0};
  const auto zeros = urn_simulate(empty, 50, rng);
  for (long v : zeros) CHECK(v == 0);

  // Transition frequencies from a long path against the exact rows.
  const auto path = urn_simulate(spec, 100000, rng);
  std::map<std::pair<long, long>, long> counts;
  std::map<long, long> visits;
  for (std::size_t t = 0; t + 1 < path.size(); ++t) {
    counts[{path[t], path[t + 1]}]++;
    visits[path[t]]++;
  }
  for (const auto& [key, c] : counts) {
    const double p = urn_transition(spec, key.first, key.second);
    const double n = static_cast<double>(visits[key.first]);
    const double freq = static_cast<double>(c) / n;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
    REQUIRE(std::abs(freq - p) <= 4.0 * sigma + 1e-9);
  }

  // Long-run mean approaches the hypergeometric stationary mean r k / (j + k).
  double mean = 0.0;
  for (std::size_t t = path.size() / 2; t < path.size(); ++t) mean += static_cast<double>(path[t]);
  mean /= static_cast<double>(path.size() - path.size() / 2);
  CHECK(mean == doctest::Approx(3.0 * 3.0 / 6.0).epsilon(0.05));
}

TEST_CASE("urn inference model scores candidates by transition probability") {
  Rng rng(11);
  const UrnSpec star{5, 5, 5};
  const auto w = urn_simulate(star, 200, rng);
  const auto inf = urn_as_cloned_ssm(w);
  REQUIRE(inf.ys.size() == 200);

  const std::vector<double> theta{5.0, 5.0, 5.0};
  double total = 0.0;
  for (long t = 1; t <= static_cast<long>(inf.ys.size()); ++t)
    total += inf.model.obs_logdensity(t, theta, {}, inf.ys[static_cast<std::size_t>(t - 1)]);
  CHECK(std::isfinite(total));

  // A candidate that cannot produce the data gets -inf, not a failure.
  const std::vector<double> impossible{1.0, 1.0, 1.0};
  double worst = 0.0;
  for (long t = 1; t <= static_cast<long>(inf.ys.size()); ++t)
    worst += inf.model.obs_logdensity(t, impossible, {}, inf.ys[static_cast<std::size_t>(t - 1)]);
  CHECK(worst == -std::numeric_limits<double>::infinity());
}

TEST_CASE("urn grid restricts to the data-feasible corner") {
  const std::vector<long> w{0, 1, 2, 2, 3};
  const auto space = urn_space(w, 10);
  CHECK(space.discrete_dim() == 3);
  for (const auto& e : space.discrete_set()) {
    CHECK(e[1] >= 3);          // k >= max w
    CHECK(e[2] >= 3);          // r >= max w
    CHECK(e[2] < e[0] + e[1]); // r < j + k
  }
}

TEST_CASE("grid MLE recovers an easy urn instance") {
  Rng rng(12);
  const UrnSpec star{4, 4, 4};
  const auto w = urn_simulate(star, 4000, rng);
  const auto [mle, ll] = urn_grid_mle(w, 10);
  CHECK(std::isfinite(ll));
  // With this much data the MLE sits at (or next to) the truth.
  CHECK(std::abs(mle.j - star.j) <= 1);
  CHECK(std::abs(mle.k - star.k) <= 1);
  CHECK(std::abs(mle.r - star.r) <= 1);
}

TEST_CASE("model log-densities never return NaN on their support") {
  Rng rng(13);
  const LgPeriodicModel lg = make_lg_periodic(1);
  const SsmModel lgm = lg.ssm();
  const SsmModel seird = make_seird_model();
  const SsmModel sv = make_sv_model();
  const auto seird_box = seird_space();
  std::vector<double> th_lg(4), th_seird(8);
  for (int i = 0; i < 3000; ++i) {
    lg.default_space().sample_uniform(rng, th_lg);
    const std::vector<double> x{rng.normal(0.0, 3.0)};
    const std::vector<double> y{rng.normal(0.0, 3.0)};
    REQUIRE_FALSE(std::isnan(lgm.obs_logdensity(1 + (i % 24), th_lg, x, y)));

    seird_box.sample_uniform(rng, th_seird);
    std::vector<double> xs(7);
    double sum = 0.0;
    for (int c = 0; c < 5; ++c) {
      xs[static_cast<std::size_t>(c)] = rng.uniform01();
      sum += xs[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < 5; ++c) xs[static_cast<std::size_t>(c)] /= sum;
    xs[5] = rng.uniform(0.0, 2.0);
    xs[6] = rng.uniform(0.0, 2.0);
    const std::vector<double> ys{rng.uniform01(), rng.uniform01()};
    REQUIRE_FALSE(std::isnan(seird.obs_logdensity(1, th_seird, xs, ys)));

    const std::vector<double> th_sv{rng.uniform(-0.95, 0.95), rng.uniform(0.05, 5.0),
                                    rng.uniform(0.05, 5.0)};
    const std::vector<double> x_sv{rng.uniform(-900.0, 900.0)};  // deep into both tails
    REQUIRE_FALSE(std::isnan(sv.obs_logdensity(1, th_sv, x_sv, y)));

    const std::vector<double> th_urn{static_cast<double>(rng.uniform_int(1, 20)),
                                     static_cast<double>(rng.uniform_int(1, 20)),
                                     static_cast<double>(rng.uniform_int(1, 30))};
    const std::vector<double> y_urn{static_cast<double>(rng.uniform_int(-2, 22)),
                                    static_cast<double>(rng.uniform_int(-2, 22))};
    UrnInference dummy = urn_as_cloned_ssm({0, 0});
    REQUIRE_FALSE(std::isnan(dummy.model.obs_logdensity(1, th_urn, {}, y_urn)));
  }
}

#include <doctest.h>

#include <cmath>

#include "sossm/models/lg_periodic.hpp"
#include "sossm/particle_filter.hpp"

using namespace sossm;

namespace {

// Flat observation density: weights never change, so the ESS never drops.
SsmModel constant_density_model() {
  SsmModel m;
  m.state_dim = 1;
  m.obs_dim = 1;
  m.sample_initial = [](std::span<const double>, Rng& rng, std::span<double> x) {
    x[0] = rng.standard_normal();
  };
  m.sample_transition = [](long, std::span<const double>, std::span<const double> xp, Rng& rng,
                           std::span<double> x) { x[0] = xp[0] + 0.1 * rng.standard_normal(); };
  m.obs_logdensity = [](long, std::span<const double>, std::span<const double>,
                        std::span<const double>) { return std::log(0.5); };
  return m;
}

// Observation is N(theta, 1) with no state: weights accumulate and the ESS
// decays, so resampling fires regularly.
SsmModel location_model() {
  SsmModel m;
  m.state_dim = 0;
  m.obs_dim = 1;
  m.obs_logdensity = [](long, std::span<const double> th, std::span<const double>,
                        std::span<const double> y) {
    const double r = y[0] - th[0];
    return -0.5 * r * r;
  };
  return m;
}

ObsSequence constant_obs(long T, double v = 0.0) { return ObsSequence(static_cast<std::size_t>(T), {v}); }

ObsSequence noisy_obs(long T, double center, std::uint64_t seed) {
  Rng rng(seed);
  ObsSequence ys;
  for (long t = 0; t < T; ++t) ys.push_back({center + rng.standard_normal()});
  return ys;
}

}  // namespace

TEST_CASE("flat density keeps weights uniform and never resamples") {
  const SsmModel model = constant_density_model();
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule none;
  PfOptions opts;
  opts.n_particles = 64;
  Rng rng(10);
  const auto record =
      run_bootstrap_so_pf(model, none, space, nullptr, constant_obs(50), opts, rng);
  REQUIRE(record.steps.size() == 50);
  for (const auto& s : record.steps) {
    CHECK(s.ess == doctest::Approx(64.0));
    CHECK_FALSE(s.resampled);
  }
  CHECK(record.kernel_applications == 0);
}

TEST_CASE("single-particle cloud carries unit weight") {
  const SsmModel model = constant_density_model();
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule slow;
  slow.flavor = Flavor::slow_vanishing;
  PfOptions opts;
  opts.n_particles = 1;
  Rng rng(11);
  const auto record = run_bootstrap_so_pf(model, slow, space, nullptr, constant_obs(30), opts, rng);
  for (const auto& s : record.steps) CHECK(s.ess == doctest::Approx(1.0));
}

TEST_CASE("flavor none with one particle keeps theta constant") {
  const SsmModel model = constant_density_model();
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule none;
  PfOptions opts;
  opts.n_particles = 1;
  Rng rng(12);
  const auto record = run_bootstrap_so_pf(model, none, space, nullptr, constant_obs(20), opts, rng);
  for (const auto& s : record.steps) CHECK(s.theta_hat[0] == record.steps[0].theta_hat[0]);
}

TEST_CASE("total weight degeneracy raises a named failure") {
  SsmModel dead = constant_density_model();
  dead.obs_logdensity = [](long t, std::span<const double>, std::span<const double>,
                           std::span<const double>) {
    return t >= 4 ? -std::numeric_limits<double>::infinity() : 0.0;
  };
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule none;
  PfOptions opts;
  opts.n_particles = 16;
  Rng rng(13);
  try {
    run_bootstrap_so_pf(dead, none, space, nullptr, constant_obs(10), opts, rng);
    FAIL("expected DegeneracyError");
  } catch (const DegeneracyError& e) {
    CHECK(e.time_index() == 4);
    CHECK(std::string(e.what()).find("t=4") != std::string::npos);
  }
}

TEST_CASE("identical seeds give bit-identical run records") {
  const SsmModel model = location_model();
  const auto space = ParameterSpace::continuous_box({{-2.0, 2.0}});
  DynamicsSchedule slow;
  slow.flavor = Flavor::slow_vanishing;
  slow.t1 = 20;
  PfOptions opts;
  opts.n_particles = 128;
  const auto ys = noisy_obs(100, 0.4, 99);
  Rng rng1(1234), rng2(1234);
  const auto a = run_adaptive_slow(model, slow, space, nullptr, ys, opts, rng1);
  const auto b = run_adaptive_slow(model, slow, space, nullptr, ys, opts, rng2);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].theta_hat[0] == b.steps[i].theta_hat[0]);
    CHECK(a.steps[i].ess == b.steps[i].ess);
    CHECK(a.steps[i].log_increment == b.steps[i].log_increment);
    CHECK(a.steps[i].resampled == b.steps[i].resampled);
  }
}

TEST_CASE("at c_ess = 1 the always-on and trigger-gated dynamics coincide") {
  const SsmModel model = location_model();
  const auto space = ParameterSpace::continuous_box({{-2.0, 2.0}});
  DynamicsSchedule fast;
  fast.flavor = Flavor::fast_vanishing;
  fast.alpha = 1.1;
  PfOptions opts;
  opts.n_particles = 64;
  opts.c_ess = 1.0;
  const auto ys = noisy_obs(60, -0.3, 5);
  Rng rng1(7), rng2(7);
  const auto every = run_bootstrap_so_pf(model, fast, space, nullptr, ys, opts, rng1);
  const auto gated = run_adaptive_fast(model, fast, space, nullptr, ys, opts, rng2);
  REQUIRE(every.steps.size() == gated.steps.size());
  for (std::size_t i = 0; i < every.steps.size(); ++i) {
    CHECK(every.steps[i].resampled == gated.steps[i].resampled);
    CHECK(every.steps[i].kernel_applied == gated.steps[i].kernel_applied);
    CHECK(every.steps[i].theta_hat[0] == gated.steps[i].theta_hat[0]);
  }
}

TEST_CASE("adaptive-fast dynamics stay frozen when resampling never fires") {
  const SsmModel model = constant_density_model();
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule fast;
  fast.flavor = Flavor::fast_vanishing;
  fast.alpha = 1.1;
  PfOptions opts;
  opts.n_particles = 32;
  opts.c_ess = 0.01;  // the flat density keeps ESS = N, so this never triggers
  Rng rng(21);
  const auto record = run_adaptive_fast(model, fast, space, nullptr, constant_obs(40), opts, rng);
  // Only the unconditional t = 1 move (a Dirac, since h_1 = 0) is counted.
  CHECK(record.kernel_applications <= 1);
  for (std::size_t i = 1; i < record.steps.size(); ++i) CHECK_FALSE(record.steps[i].kernel_applied);
  for (const auto& s : record.steps) CHECK(s.theta_hat[0] == record.steps[0].theta_hat[0]);
}

TEST_CASE("adaptive-fast applies fewer kernels than the always-on filter") {
  const SsmModel model = location_model();
  const auto space = ParameterSpace::continuous_box({{-2.0, 2.0}});
  DynamicsSchedule fast;
  fast.flavor = Flavor::fast_vanishing;
  fast.alpha = 1.1;
  PfOptions opts;
  opts.n_particles = 128;
  const auto ys = noisy_obs(200, 0.2, 42);
  Rng rng1(8), rng2(8);
  const auto every = run_bootstrap_so_pf(model, fast, space, nullptr, ys, opts, rng1);
  const auto gated = run_adaptive_fast(model, fast, space, nullptr, ys, opts, rng2);
  CHECK(gated.kernel_applications < every.kernel_applications);
}

TEST_CASE("epoch times force resample and kernel even at full ESS") {
  const SsmModel model = constant_density_model();
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule slow;
  slow.flavor = Flavor::slow_vanishing;
  slow.t1 = 5;
  PfOptions opts;
  opts.n_particles = 32;
  Rng rng(31);
  const auto record = run_adaptive_slow(model, slow, space, nullptr, constant_obs(12), opts, rng);
  CHECK(record.steps[4].resampled);        // t = 5 is an epoch
  CHECK(record.steps[4].kernel_applied);
  CHECK_FALSE(record.steps[3].resampled);  // the flat density never triggers on ESS
}

TEST_CASE("without epochs the slow runner reduces to ESS gating") {
  const SsmModel model = constant_density_model();
  const auto space = ParameterSpace::continuous_box({{-1.0, 1.0}});
  DynamicsSchedule slow;
  slow.flavor = Flavor::slow_vanishing;
  slow.t1 = 0;  // empty epoch sequence
  PfOptions opts;
  opts.n_particles = 32;
  Rng rng(32);
  const auto record = run_adaptive_slow(model, slow, space, nullptr, constant_obs(15), opts, rng);
  for (const auto& s : record.steps) CHECK_FALSE(s.resampled);
}

TEST_CASE("estimate_theta: weighted mean and projection") {
  ParticleCloud cloud;
  cloud.n_particles = 2;
  cloud.theta_dim = 1;
  cloud.theta = {-1.0, 1.0};
  cloud.weights = {0.5, 0.5};
  const auto box = ParameterSpace::continuous_box({{-2.0, 2.0}});
  const auto [hat, proj] = estimate_theta(cloud, box);
  CHECK(hat[0] == doctest::Approx(0.0));
  CHECK(proj[0] == doctest::Approx(0.0));

  ParticleCloud point;
  point.n_particles = 3;
  point.theta_dim = 1;
  point.theta = {0.7, 0.7, 0.7};
  point.weights = {0.2, 0.5, 0.3};
  const auto [hat2, proj2] = estimate_theta(point, box);
  CHECK(hat2[0] == doctest::Approx(0.7));

  ParticleCloud discrete_cloud;
  discrete_cloud.n_particles = 2;
  discrete_cloud.theta_dim = 1;
  discrete_cloud.theta = {1.0, 3.0};
  discrete_cloud.weights = {0.55, 0.45};  // mean 1.9
  const auto grid = ParameterSpace::discrete_grid({{1}, {3}}, 1, 3);
  const auto [hat3, proj3] = estimate_theta(discrete_cloud, grid);
  CHECK(hat3[0] == doctest::Approx(1.9));
  CHECK(proj3[0] == 1.0);
}

TEST_CASE("weights stay normalized through the step loop") {
  const SsmModel model = location_model();
  const auto space = ParameterSpace::continuous_box({{-2.0, 2.0}});
  DynamicsSchedule slow;
  slow.flavor = Flavor::slow_vanishing;
  PfOptions opts;
  opts.n_particles = 50;
  const auto ys = noisy_obs(40, 0.0, 77);

  Rng rng(55);
  RawStateOps ops(model);
  EngineConfig cfg;
  cfg.n_particles = opts.n_particles;
  cfg.policy = DynamicsPolicy::every_step;
  StepRecord rec;
  ParticleCloud cloud = engine::initialize(ops, slow, space, nullptr, ys[0], cfg, rng, rec);
  for (std::size_t i = 1; i < ys.size(); ++i) {
    so_pf_step(cloud, model, slow, space, ys[i], opts, rng, &rec);
    double sum = 0.0;
    for (double w : cloud.weights) sum += w;
    REQUIRE(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("mixed space: the discrete coordinate locks onto the truth") {
  // y_t ~ N(vartheta + psi, 1) with vartheta in [-0.4, 0.4] and psi in
  // {0, 1, 2}; the narrow continuous box makes psi identifiable.
  SsmModel model;
  model.state_dim = 0;
  model.obs_dim = 1;
  model.obs_logdensity = [](long, std::span<const double> th, std::span<const double>,
                            std::span<const double> y) {
    const double r = y[0] - (th[0] + th[1]);
    return -0.5 * r * r;
  };
  const auto space = ParameterSpace::product({{-0.4, 0.4}}, {{0}, {1}, {2}}, 0, 2);
  DynamicsSchedule mixed;
  mixed.flavor = Flavor::mixed;
  mixed.t1 = 100;
  PfOptions opts;
  opts.n_particles = 500;
  opts.variant = SoVariant::theta_before_state;

  int locked = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    Rng data_rng(4000 + s);
    ObsSequence ys;
    for (int t = 0; t < 2000; ++t) ys.push_back({0.3 + 1.0 + data_rng.standard_normal()});
    Rng rng(4100 + s);
    const auto record = run_adaptive_slow(model, mixed, space, nullptr, ys, opts, rng);
    if (record.steps.back().theta_proj[1] == 1.0) ++locked;
  }
  CHECK(locked >= 16);
}

TEST_CASE("both SO-SSM orderings estimate the LG model comparably") {
  const LgPeriodicModel lg = make_lg_periodic(1);
  const SsmModel model = lg.ssm();
  const auto space = lg.default_space();
  DynamicsSchedule slow;
  slow.flavor = Flavor::slow_vanishing;
  slow.t1 = 100;
  PfOptions opts;
  opts.n_particles = 200;

  double err_after = 0.0, err_before = 0.0;
  const int seeds = 4;
  for (int s = 0; s < seeds; ++s) {
    Rng sim_rng(1000 + s);
    const auto theta_star = lg.draw_theta_star(sim_rng);
    const auto ys = lg.simulate(theta_star, 2000, sim_rng);
    for (auto variant : {SoVariant::theta_after_state, SoVariant::theta_before_state}) {
      opts.variant = variant;
      Rng rng(500 + s);
      const auto record = run_adaptive_slow(model, slow, space, nullptr, ys, opts, rng);
      double err = 0.0;
      const auto& hat = record.steps.back().theta_hat;
      for (std::size_t j = 0; j < hat.size(); ++j) {
        const double d = hat[j] - theta_star[j];
        err += d * d;
      }
      (variant == SoVariant::theta_after_state ? err_after : err_before) += std::sqrt(err);
    }
  }
  CHECK(err_after < 2.0 * err_before);
  CHECK(err_before < 2.0 * err_after);
}

#include "sossm/harness/job.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sossm/kalman.hpp"
#include "sossm/mle.hpp"
#include "sossm/models/lg_periodic.hpp"
#include "sossm/models/seird.hpp"
#include "sossm/models/stoch_vol.hpp"
#include "sossm/models/urn.hpp"
#include "sossm/particle_filter.hpp"

namespace sossm {

namespace {

using nlohmann::json;

struct BuiltModel {
  SsmModel ssm;
  std::optional<LgSpec> lg;
  ParameterSpace space;
};

ParameterSpace space_from_json(const json& sj) {
  std::vector<Interval> box;
  if (sj.contains("box"))
    for (const auto& iv : sj.at("box")) box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  std::vector<std::vector<long>> elements;
  long a = 0, b = 0;
  if (sj.contains("discrete")) {
    const auto& dj = sj.at("discrete");
    a = dj.at("a").get<long>();
    b = dj.at("b").get<long>();
    for (const auto& e : dj.at("elements")) elements.push_back(e.get<std::vector<long>>());
  }
  if (elements.empty()) return ParameterSpace::continuous_box(std::move(box));
  return ParameterSpace::product(std::move(box), std::move(elements), a, b);
}

BuiltModel build_model(const JobConfig& cfg) {
  BuiltModel out;
  const json& mj = cfg.model;
  if (cfg.model_name == "lg-periodic") {
    const int p = mj.value("p", 0);
    if (p < 1) throw std::runtime_error("config: field 'model.p' must be >= 1 for lg-periodic");
    LgPeriodicModel model = mj.contains("knots")
                                ? make_lg_periodic(p, mj.at("knots").get<std::vector<double>>())
                                : make_lg_periodic(p);
    out.ssm = model.ssm();
    out.lg = model.lg_spec();
    out.space = model.default_space();
  } else if (cfg.model_name == "sv") {
    SvOptions opts;
    opts.student_transition = mj.value("transition", std::string("student")) == "student";
    opts.nu = mj.value("nu", 5.0);
    out.ssm = make_sv_model(opts);
    out.space = ParameterSpace::continuous_box({{-0.95, 0.95}, {0.05, 5.0}, {0.05, 5.0}});
  } else if (cfg.model_name == "seird") {
    out.ssm = make_seird_model();
    out.space = seird_space();
  } else if (cfg.model_name == "urn") {
    throw std::runtime_error("config: model 'urn' supports simulate and iffit jobs only");
  } else {
    throw std::runtime_error("config: unknown model '" + cfg.model_name + "'");
  }
  if (cfg.space) out.space = space_from_json(*cfg.space);
  return out;
}

std::vector<double> require_theta_star(const JobConfig& cfg, std::size_t dim) {
  if (!cfg.model.contains("theta_star"))
    throw std::runtime_error("config: field 'model.theta_star' is missing");
  auto th = cfg.model.at("theta_star").get<std::vector<double>>();
  if (th.size() != dim)
    throw std::runtime_error("config: field 'model.theta_star' must have " + std::to_string(dim) +
                             " entries");
  return th;
}

Mu0Sampler make_mu0(const JobConfig& cfg, const ParameterSpace& space) {
  if (!cfg.mu0_dirac) return nullptr;  // uniform on the space
  auto theta = *cfg.mu0_dirac;
  if (static_cast<int>(theta.size()) != space.dim())
    throw std::runtime_error("config: field 'pf.mu0_dirac' has the wrong dimension");
  if (!space.contains(theta))
    throw std::runtime_error("config: field 'pf.mu0_dirac' lies outside the space");
  return [theta](Rng&, std::span<double> out) { std::copy(theta.begin(), theta.end(), out.begin()); };
}

void write_sidecar(const JobConfig& cfg, long rows, long kernel_applications, double wall_ms) {
  std::ofstream out(cfg.output_path + ".meta");
  if (!out) throw std::runtime_error("cannot open sidecar for " + cfg.output_path);
  out << "version=" << kToolkitVersion << '\n';
  for (const auto& [k, v] : config_echo(cfg)) out << k << '=' << v << '\n';
  out << "rows=" << rows << '\n';
  out << "kernel_applications=" << kernel_applications << '\n';
  out << "wall_time_ms=" << format_double(wall_ms) << '\n';
}

void write_record_csv(const JobConfig& cfg, const RunRecord& record, int theta_dim) {
  std::vector<std::string> header = {"t"};
  for (int j = 1; j <= theta_dim; ++j) header.push_back("theta_hat_" + std::to_string(j));
  for (int j = 1; j <= theta_dim; ++j) header.push_back("theta_proj_" + std::to_string(j));
  header.push_back("ess");
  header.push_back("resampled");
  header.push_back("log_increment");
  std::vector<std::vector<double>> rows;
  rows.reserve(record.steps.size());
  for (const auto& s : record.steps) {
    std::vector<double> row;
    row.reserve(header.size());
    row.push_back(static_cast<double>(s.t));
    for (double v : s.theta_hat) row.push_back(v);
    for (double v : s.theta_proj) row.push_back(v);
    row.push_back(s.ess);
    row.push_back(s.resampled ? 1.0 : 0.0);
    row.push_back(s.log_increment);
    rows.push_back(std::move(row));
  }
  write_csv(cfg.output_path, header, rows);
}

void run_simulate(const JobConfig& cfg, Rng& rng) {
  if (cfg.model_name == "urn") {
    const UrnSpec spec{cfg.model.value("j", 0L), cfg.model.value("k", 0L),
                       cfg.model.value("r", 0L)};
    if (!spec.valid()) throw std::runtime_error("config: model.j/k/r do not form a valid urn");
    const auto w = urn_simulate(spec, cfg.sim_length, rng);
    std::vector<std::vector<double>> rows;
    rows.reserve(w.size());
    for (long v : w) rows.push_back({static_cast<double>(v)});
    write_csv(cfg.output_path, {"w"}, rows);
    write_sidecar(cfg, static_cast<long>(rows.size()), 0, 0.0);
    return;
  }
  ObsSequence ys;
  if (cfg.model_name == "lg-periodic") {
    const int p = cfg.model.value("p", 0);
    LgPeriodicModel model = cfg.model.contains("knots")
                                ? make_lg_periodic(p, cfg.model.at("knots").get<std::vector<double>>())
                                : make_lg_periodic(p);
    ys = model.simulate(require_theta_star(cfg, static_cast<std::size_t>(model.theta_dim())),
                        cfg.sim_length, rng);
  } else if (cfg.model_name == "sv") {
    SvOptions opts;
    opts.student_transition = cfg.model.value("transition", std::string("student")) == "student";
    opts.nu = cfg.model.value("nu", 5.0);
    const SsmModel model = make_sv_model(opts);
    ys = sv_simulate(model, require_theta_star(cfg, 3), cfg.sim_length, rng);
  } else if (cfg.model_name == "seird") {
    ys = seird_simulate(require_theta_star(cfg, 8), cfg.sim_length, rng);
  } else {
    throw std::runtime_error("config: unknown model '" + cfg.model_name + "'");
  }
  std::vector<std::string> header;
  for (std::size_t c = 1; c <= ys.front().size(); ++c) header.push_back("y" + std::to_string(c));
  write_csv(cfg.output_path, header, ys);
  write_sidecar(cfg, static_cast<long>(ys.size()), 0, 0.0);
}

RunRecord run_online(const JobConfig& cfg, const ObsSequence& ys, const BuiltModel& built,
                     Rng& rng) {
  const Mu0Sampler mu0 = make_mu0(cfg, built.space);
  PfOptions opts;
  opts.n_particles = cfg.n_particles;
  opts.c_ess = cfg.c_ess;
  opts.variant = cfg.variant;
  opts.resampling = cfg.resampling;
  if (cfg.rao_blackwell) {
    if (!built.lg)
      throw std::runtime_error("config: pf.rao_blackwell requires a linear-Gaussian model");
    EngineConfig ec;
    ec.n_particles = cfg.n_particles;
    ec.c_ess = cfg.c_ess;
    ec.variant = cfg.variant;
    ec.resampling = cfg.resampling;
    ec.policy = cfg.adaptive == "none"   ? DynamicsPolicy::every_step
                : cfg.adaptive == "fast" ? DynamicsPolicy::on_trigger
                                         : DynamicsPolicy::on_trigger_epoch;
    return run_rb_pf(*built.lg, cfg.schedule, built.space, mu0, ys, ec, rng);
  }
  if (cfg.adaptive == "none")
    return run_bootstrap_so_pf(built.ssm, cfg.schedule, built.space, mu0, ys, opts, rng);
  if (cfg.adaptive == "fast")
    return run_adaptive_fast(built.ssm, cfg.schedule, built.space, mu0, ys, opts, rng);
  return run_adaptive_slow(built.ssm, cfg.schedule, built.space, mu0, ys, opts, rng);
}

RunRecord run_iffit(const JobConfig& cfg, const ObsSequence& input, Rng& rng, int* theta_dim_out) {
  IfConfig ic;
  ic.n_particles = cfg.n_particles;
  ic.c_ess = cfg.c_ess;
  ic.schedule = cfg.schedule;
  ic.passes = cfg.passes;
  ic.delta = cfg.if_delta;
  ic.resampling = cfg.resampling;

  ObsSequence y_tilde;
  SsmModel base;
  ParameterSpace space;
  if (cfg.model_name == "urn") {
    if (input.empty() || input.front().size() != 1)
      throw std::runtime_error("iffit: urn input must be a single column of counts");
    std::vector<long> w;
    w.reserve(input.size());
    for (const auto& row : input) {
      const long v = std::lround(row[0]);
      if (row[0] != static_cast<double>(v))
        throw std::runtime_error("iffit: urn input must contain integers");
      w.push_back(v);
    }
    if (w.size() < 2) throw std::runtime_error("iffit: cannot derive T from fewer than 2 rows");
    auto inference = urn_as_cloned_ssm(w);
    y_tilde = std::move(inference.ys);
    base = std::move(inference.model);
    space = urn_space(w, cfg.model.value("bound", 200L));
  } else {
    BuiltModel built = build_model(cfg);
    y_tilde = input;
    base = std::move(built.ssm);
    space = std::move(built.space);
  }
  const long T = static_cast<long>(y_tilde.size());
  ic.t0 = cfg.t0 > 0 ? cfg.t0 : 10 * T;
  const Mu0Sampler mu0 = make_mu0(cfg, space);
  *theta_dim_out = space.dim();
  if (ic.schedule.flavor == Flavor::slow_vanishing || ic.schedule.flavor == Flavor::mixed)
    return run_if_slow(base, y_tilde, space, mu0, ic, rng);
  return run_if_fast(base, y_tilde, space, mu0, ic, rng);
}

PayoffFn make_payoff(const std::string& name) {
  if (name == "neg-quadratic") {
    return [](std::span<const double> y, std::span<const double> theta) {
      const std::size_t d = std::min(y.size(), theta.size());
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = theta[i] - y[i];
        s -= diff * diff;
      }
      return s;
    };
  }
  throw std::runtime_error("config: unknown payoff '" + name + "'");
}

}  // namespace

void run_job(const JobConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  if (cfg.kind == JobKind::simulate) {
    run_simulate(cfg, rng);
    return;
  }

  const ObsSequence input = load_observations(cfg.input_path, cfg.transforms);
  RunRecord record;
  int theta_dim = 0;
  switch (cfg.kind) {
    case JobKind::online: {
      const BuiltModel built = build_model(cfg);
      theta_dim = built.space.dim();
      record = run_online(cfg, input, built, rng);
      break;
    }
    case JobKind::iffit:
      record = run_iffit(cfg, input, rng, &theta_dim);
      break;
    case JobKind::optimize: {
      if (!cfg.space) throw std::runtime_error("config: optimize jobs need an explicit 'space'");
      const ParameterSpace space = space_from_json(*cfg.space);
      theta_dim = space.dim();
      record = run_noisy_opt(make_payoff(cfg.payoff), input, space, make_mu0(cfg, space),
                             cfg.schedule, cfg.n_particles, cfg.c_ess, cfg.resampling, rng);
      break;
    }
    case JobKind::simulate:
      break;  // handled above
  }
  write_record_csv(cfg, record, theta_dim);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_sidecar(cfg, static_cast<long>(record.steps.size()), record.kernel_applications, wall_ms);
}

}  // namespace sossm

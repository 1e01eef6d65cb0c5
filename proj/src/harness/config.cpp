#include "sossm/harness/config.hpp"

#include <fstream>
#include <stdexcept>

namespace sossm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::runtime_error("config: field '" + field + "' " + why);
}

template <class T>
T require(const json& j, const std::string& field) {
  if (!j.contains(field)) fail(field, "is missing");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    fail(field, "has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    fail(field, "has the wrong type");
  }
}

Flavor flavor_from_string(const std::string& name) {
  if (name == "none") return Flavor::none;
  if (name == "fast-vanishing") return Flavor::fast_vanishing;
  if (name == "slow-vanishing") return Flavor::slow_vanishing;
  if (name == "mixed") return Flavor::mixed;
  if (name == "pomp-geometric") return Flavor::pomp_geometric;
  if (name == "pomp-hyperbolic") return Flavor::pomp_hyperbolic;
  fail("schedule.flavor", "must be one of none, fast-vanishing, slow-vanishing, mixed, "
                          "pomp-geometric, pomp-hyperbolic (got '" + name + "')");
}

DynamicsSchedule parse_schedule(const json& j) {
  DynamicsSchedule s;
  s.flavor = flavor_from_string(get_or<std::string>(j, "flavor", "none"));
  const double alpha_default =
      s.flavor == Flavor::fast_vanishing ? 1.1 : 0.5;
  s.alpha = get_or<double>(j, "alpha", alpha_default);
  s.h1 = get_or<double>(j, "h1", 0.0);
  s.alpha1 = get_or<double>(j, "alpha1", 0.5);
  s.alpha2 = get_or<double>(j, "alpha2", 0.5);
  s.alpha3 = get_or<double>(j, "alpha3", 0.5);
  s.beta = get_or<double>(j, "beta", 0.01);
  s.c = get_or<double>(j, "c", 1.0);
  s.nu = get_or<double>(j, "nu", 100.0);
  s.delta = get_or<long>(j, "delta", 1);
  s.t1 = get_or<long>(j, "t1", 0);
  s.period = get_or<long>(j, "period", 1);
  if (j.contains("sigma")) {
    const auto rows = require<std::vector<std::vector<double>>>(j, "sigma");
    const auto d = rows.size();
    Eigen::MatrixXd sigma(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      if (rows[r].size() != d) fail("schedule.sigma", "must be square");
      for (std::size_t c = 0; c < d; ++c)
        sigma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    s.sigma = std::move(sigma);
  }
  if (j.contains("h_override")) s.h_override = require<std::vector<double>>(j, "h_override");
  if (j.contains("reset_times")) s.reset_times = require<std::vector<long>>(j, "reset_times");
  return s;
}

std::vector<Transform> parse_transforms(const json& arr) {
  std::vector<Transform> out;
  for (const auto& tj : arr) {
    Transform t;
    const auto op = require<std::string>(tj, "op");
    if (op == "divide") {
      t.op = Transform::Op::divide;
      t.value = require<double>(tj, "value");
    } else if (op == "day-start-diff") {
      t.op = Transform::Op::day_start_diff;
      t.period = get_or<long>(tj, "period", 24);
    } else {
      fail("transforms.op", "must be 'divide' or 'day-start-diff' (got '" + op + "')");
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace

JobKind job_kind_from_string(const std::string& name) {
  if (name == "simulate") return JobKind::simulate;
  if (name == "online") return JobKind::online;
  if (name == "iffit") return JobKind::iffit;
  if (name == "optimize") return JobKind::optimize;
  fail("job", "must be one of simulate, online, iffit, optimize (got '" + name + "')");
}

std::string to_string(JobKind kind) {
  switch (kind) {
    case JobKind::simulate: return "simulate";
    case JobKind::online: return "online";
    case JobKind::iffit: return "iffit";
    case JobKind::optimize: return "optimize";
  }
  return "?";
}

std::string to_string(SoVariant variant) {
  return variant == SoVariant::theta_after_state ? "theta-after-x" : "theta-before-x";
}

std::string to_string(Flavor flavor) {
  switch (flavor) {
    case Flavor::none: return "none";
    case Flavor::fast_vanishing: return "fast-vanishing";
    case Flavor::slow_vanishing: return "slow-vanishing";
    case Flavor::mixed: return "mixed";
    case Flavor::pomp_geometric: return "pomp-geometric";
    case Flavor::pomp_hyperbolic: return "pomp-hyperbolic";
  }
  return "?";
}

JobConfig parse_config(const json& j) {
  JobConfig cfg;
  cfg.kind = job_kind_from_string(require<std::string>(j, "job"));
  if (!j.contains("seed")) fail("seed", "is missing (no wall-clock default)");
  cfg.seed = require<std::uint64_t>(j, "seed");
  cfg.output_path = require<std::string>(j, "output");
  cfg.input_path = get_or<std::string>(j, "input", "");

  // Optimize jobs run on a payoff function alone; everything else needs a model.
  if (j.contains("model")) {
    cfg.model_name = require<std::string>(j.at("model"), "name");
    cfg.model = j.at("model");
  } else if (cfg.kind != JobKind::optimize) {
    fail("model", "is missing");
  }

  if (j.contains("space")) cfg.space = j.at("space");
  cfg.schedule = j.contains("schedule") ? parse_schedule(j.at("schedule")) : DynamicsSchedule{};

  const json pj = j.contains("pf") ? j.at("pf") : json::object();
  cfg.n_particles = get_or<int>(pj, "particles", 1000);
  if (cfg.n_particles < 1) fail("pf.particles", "must be >= 1");
  cfg.c_ess = get_or<double>(pj, "c_ess", 0.7);
  if (!(cfg.c_ess > 0.0 && cfg.c_ess <= 1.0)) fail("pf.c_ess", "must lie in (0, 1]");
  const auto variant = get_or<std::string>(pj, "variant", "theta-after-x");
  if (variant == "theta-after-x")
    cfg.variant = SoVariant::theta_after_state;
  else if (variant == "theta-before-x")
    cfg.variant = SoVariant::theta_before_state;
  else
    fail("pf.variant", "must be 'theta-after-x' or 'theta-before-x'");
  cfg.resampling = resampling_scheme_from_string(get_or<std::string>(pj, "resampling", "ssp"));
  cfg.adaptive = get_or<std::string>(pj, "adaptive", "slow");
  if (cfg.adaptive != "none" && cfg.adaptive != "fast" && cfg.adaptive != "slow")
    fail("pf.adaptive", "must be 'none', 'fast' or 'slow'");
  cfg.rao_blackwell = get_or<bool>(pj, "rao_blackwell", false);
  if (pj.contains("mu0_dirac")) cfg.mu0_dirac = require<std::vector<double>>(pj, "mu0_dirac");

  if (j.contains("iffit")) {
    const json& ij = j.at("iffit");
    cfg.passes = get_or<int>(ij, "passes", 1);
    cfg.t0 = get_or<long>(ij, "t0", 0);
    cfg.if_delta = get_or<long>(ij, "delta", 1);
  }
  if (cfg.kind == JobKind::iffit && cfg.passes < 1) fail("iffit.passes", "must be >= 1");

  if (j.contains("optimize")) cfg.payoff = get_or<std::string>(j.at("optimize"), "payoff",
                                                               "neg-quadratic");

  if (j.contains("transforms")) cfg.transforms = parse_transforms(j.at("transforms"));

  if (cfg.kind == JobKind::simulate) {
    cfg.sim_length = get_or<long>(j, "sim_length", get_or<long>(cfg.model, "sim_length", 0));
    if (cfg.sim_length < 1) fail("sim_length", "must be >= 1 for simulate jobs");
  }
  if (cfg.kind != JobKind::simulate && cfg.input_path.empty()) fail("input", "is missing");
  return cfg;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: invalid JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

std::vector<std::pair<std::string, std::string>> config_echo(const JobConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  put("job", to_string(cfg.kind));
  put("seed", std::to_string(cfg.seed));
  put("model.name", cfg.model_name);
  put("input", cfg.input_path);
  put("output", cfg.output_path);
  put("pf.particles", std::to_string(cfg.n_particles));
  put("pf.c_ess", format_double(cfg.c_ess));
  put("pf.variant", to_string(cfg.variant));
  put("pf.resampling", to_string(cfg.resampling));
  put("pf.adaptive", cfg.adaptive);
  put("pf.rao_blackwell", cfg.rao_blackwell ? "true" : "false");
  const auto& s = cfg.schedule;
  put("schedule.flavor", to_string(s.flavor));
  put("schedule.alpha", format_double(s.alpha));
  put("schedule.h1", format_double(s.h1));
  put("schedule.alpha1", format_double(s.alpha1));
  put("schedule.alpha2", format_double(s.alpha2));
  put("schedule.alpha3", format_double(s.alpha3));
  put("schedule.beta", format_double(s.beta));
  put("schedule.c", format_double(s.c));
  put("schedule.nu", format_double(s.nu));
  put("schedule.delta", std::to_string(s.delta));
  put("schedule.t1", std::to_string(s.t1));
  put("schedule.period", std::to_string(s.period));
  put("schedule.sigma", s.sigma.size() == 0 ? "identity" : "explicit");
  if (!s.h_override.empty())
    put("schedule.h_override_len", std::to_string(s.h_override.size()));
  if (!s.reset_times.empty()) {
    std::string v;
    for (long r : s.reset_times) v += (v.empty() ? "" : ";") + std::to_string(r);
    put("schedule.reset_times", v);
  }
  if (cfg.kind == JobKind::iffit) {
    put("iffit.passes", std::to_string(cfg.passes));
    put("iffit.t0", std::to_string(cfg.t0));
    put("iffit.delta", std::to_string(cfg.if_delta));
  }
  if (cfg.kind == JobKind::optimize) put("optimize.payoff", cfg.payoff);
  if (cfg.kind == JobKind::simulate) put("sim_length", std::to_string(cfg.sim_length));
  return kv;
}

}  // namespace sossm

#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sossm/dynamics.hpp"
#include "sossm/engine.hpp"
#include "sossm/harness/csv_io.hpp"

namespace sossm {

enum class JobKind { simulate, online, iffit, optimize };

JobKind job_kind_from_string(const std::string& name);
std::string to_string(JobKind kind);
std::string to_string(SoVariant variant);
std::string to_string(Flavor flavor);

/// A fully validated job description: one run of the toolkit.
struct JobConfig {
  JobKind kind = JobKind::online;
  std::uint64_t seed = 0;
  std::string input_path;
  std::string output_path;

  std::string model_name;
  nlohmann::json model;  // model-specific parameters, kept verbatim

  std::optional<nlohmann::json> space;  // box/discrete override

  DynamicsSchedule schedule;

  int n_particles = 1000;
  double c_ess = 0.7;
  SoVariant variant = SoVariant::theta_after_state;
  ResamplingScheme resampling = ResamplingScheme::ssp;
  std::string adaptive = "slow";  // none | fast | slow
  bool rao_blackwell = false;
  std::optional<std::vector<double>> mu0_dirac;  // fixed-theta runs

  int passes = 1;   // iffit
  long t0 = 0;      // iffit slow epochs; 0 = derive 10*T from the data
  long if_delta = 1;

  std::string payoff = "neg-quadratic";  // optimize

  std::vector<Transform> transforms;

  long sim_length = 0;  // simulate
};

JobConfig parse_config(const nlohmann::json& j);
JobConfig load_config(const std::string& path);

/// Effective configuration, defaults included, as flat key/value pairs for the
/// metadata sidecar.
std::vector<std::pair<std::string, std::string>> config_echo(const JobConfig& cfg);

}  // namespace sossm

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "sossm/harness/job.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string out;
  std::string input;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int particles = 0;
  double c_ess = 0.0;
  int passes = 0;
};

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "JSON job configuration")->required();
  cmd->add_option("--seed", ov.seed, "master seed (overrides the config)")
      ->each([&ov](const std::string&) { ov.seed_set = true; });
  cmd->add_option("--out", ov.out, "output CSV path (overrides the config)");
  cmd->add_option("--input", ov.input, "input CSV path (overrides the config)");
  cmd->add_option("--particles", ov.particles, "particle count (overrides the config)");
  cmd->add_option("--c-ess", ov.c_ess, "ESS trigger fraction (overrides the config)");
  cmd->add_option("--passes", ov.passes, "iterated-filtering pass budget (overrides the config)");
}

int run(const std::string& kind, const Overrides& ov) {
  sossm::JobConfig cfg = sossm::load_config(ov.config_path);
  const auto expected = sossm::job_kind_from_string(kind);
  if (cfg.kind != expected)
    throw std::runtime_error("config: job kind '" + sossm::to_string(cfg.kind) +
                             "' does not match subcommand '" + kind + "'");
  if (ov.seed_set) cfg.seed = ov.seed;
  if (!ov.out.empty()) cfg.output_path = ov.out;
  if (!ov.input.empty()) cfg.input_path = ov.input;
  if (ov.particles > 0) cfg.n_particles = ov.particles;
  if (ov.c_ess > 0.0) cfg.c_ess = ov.c_ess;
  if (ov.passes > 0) cfg.passes = ov.passes;
  sossm::run_job(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential Monte Carlo toolkit for joint parameter and state inference"};
  app.require_subcommand(1);

  Overrides ov;
  std::string kind;
  for (const char* name : {"simulate", "online", "iffit", "optimize"}) {
    auto* cmd = app.add_subcommand(name, std::string("run a '") + name + "' job");
    add_common(cmd, ov);
    cmd->callback([&kind, name] { kind = name; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run(kind, ov);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "sossm/harness/config.hpp"
#include "sossm/harness/csv_io.hpp"
#include "sossm/harness/job.hpp"

using namespace sossm;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sossm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("minimal online config gets its defaults injected") {
  const json j = {
      {"job", "online"}, {"seed", 7},         {"input", "x.csv"},
      {"output", "y.csv"}, {"model", {{"name", "lg-periodic"}, {"p", 1}}},
  };
  const JobConfig cfg = parse_config(j);
  CHECK(cfg.c_ess == 0.7);
  CHECK(cfg.schedule.nu == 100.0);
  CHECK(cfg.schedule.sigma.size() == 0);  // identity
  CHECK(cfg.schedule.alpha == 0.5);
  CHECK(cfg.n_particles == 1000);
  CHECK(cfg.resampling == ResamplingScheme::ssp);

  // Every injected default shows up in the echo.
  const auto echo = config_echo(cfg);
  auto has = [&echo](const std::string& k, const std::string& v) {
    for (const auto& [key, val] : echo)
      if (key == k && val == v) return true;
    return false;
  };
  CHECK(has("pf.c_ess", "0.69999999999999996"));
  CHECK(has("schedule.nu", "100"));
  CHECK(has("schedule.sigma", "identity"));
  CHECK(has("pf.resampling", "ssp"));
}

TEST_CASE("config errors name the offending field") {
  const json no_seed = {{"job", "online"},
                        {"input", "x.csv"},
                        {"output", "y.csv"},
                        {"model", {{"name", "sv"}}}};
  CHECK_THROWS_WITH_AS(parse_config(no_seed), doctest::Contains("seed"), std::runtime_error);

  const json bad_kind = {{"job", "trainmodel"}, {"seed", 1}, {"output", "y"},
                         {"model", {{"name", "sv"}}}};
  CHECK_THROWS_WITH_AS(parse_config(bad_kind), doctest::Contains("job"), std::runtime_error);

  json bad_flavor = {{"job", "online"},   {"seed", 1},
                     {"input", "x.csv"},  {"output", "y.csv"},
                     {"model", {{"name", "sv"}}}, {"schedule", {{"flavor", "warp"}}}};
  CHECK_THROWS_WITH_AS(parse_config(bad_flavor), doctest::Contains("schedule.flavor"),
                       std::runtime_error);
}

TEST_CASE("degenerate box bounds are rejected with the coordinate index") {
  CHECK_THROWS_WITH_AS(ParameterSpace::continuous_box({{0.0, 1.0}, {2.0, 2.0}}),
                       doctest::Contains("interval 1"), std::invalid_argument);
}

TEST_CASE("csv loading: transforms, errors") {
  TempDir dir;
  const auto path = dir.file("data.csv");
  write_file(path, "a,b\n1,10\n2,20\n3,30\n4,40\n5,50\n");

  const auto plain = load_observations(path);
  REQUIRE(plain.size() == 5);
  CHECK(plain[2][1] == 30.0);

  Transform divide;
  divide.op = Transform::Op::divide;
  divide.value = 10.0;
  const auto scaled = load_observations(path, {divide});
  CHECK(scaled[2][1] == 3.0);

  // Day-start differencing on a toy series: with period 24 every anchor is
  // row 0, so output t is row_t - row_0.
  Transform diff;
  diff.op = Transform::Op::day_start_diff;
  diff.period = 24;
  const auto diffed = load_observations(path, {diff});
  REQUIRE(diffed.size() == 4);
  CHECK(diffed[0][0] == 1.0);
  CHECK(diffed[3][1] == 40.0);

  const auto empty = dir.file("empty.csv");
  write_file(empty, "");
  CHECK_THROWS(load_observations(empty));

  const auto bad = dir.file("bad.csv");
  write_file(bad, "a,b\n1,2\n3,oops\n");
  CHECK_THROWS_WITH_AS(load_observations(bad), doctest::Contains("row 2, column 2"),
                       std::runtime_error);
}

TEST_CASE("day-start differencing anchors move with the period") {
  TempDir dir;
  const auto path = dir.file("periodic.csv");
  std::string content = "w\n";
  for (int i = 0; i < 48; ++i) content += std::to_string(i * i) + "\n";
  write_file(path, content);
  Transform diff;
  diff.op = Transform::Op::day_start_diff;
  diff.period = 24;
  const auto out = load_observations(path, {diff});
  REQUIRE(out.size() == 47);
  for (int t = 1; t <= 24; ++t) CHECK(out[static_cast<std::size_t>(t - 1)][0] == t * t - 0.0);
  for (int t = 25; t <= 47; ++t)
    CHECK(out[static_cast<std::size_t>(t - 1)][0] == t * t - 24.0 * 24.0);
}

TEST_CASE("csv round-trip preserves doubles exactly") {
  TempDir dir;
  const auto path = dir.file("roundtrip.csv");
  const std::vector<std::vector<double>> rows = {
      {0.1, 1.0 / 3.0}, {1e-300, -0.0}, {123456789.123456789, 2.2250738585072014e-308}};
  write_csv(path, {"u", "v"}, rows);
  const auto back = load_observations(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(back[i][j] == rows[i][j]);
}

TEST_CASE("simulate jobs are byte-identical under a fixed seed") {
  TempDir dir;
  const json j = {{"job", "simulate"},
                  {"seed", 99},
                  {"sim_length", 50},
                  {"output", dir.file("a.csv")},
                  {"model", {{"name", "urn"}, {"j", 5}, {"k", 5}, {"r", 5}}}};
  JobConfig cfg = parse_config(j);
  run_job(cfg);
  cfg.output_path = dir.file("b.csv");
  run_job(cfg);
  const auto a = read_file(dir.file("a.csv"));
  CHECK(a == read_file(dir.file("b.csv")));
  CHECK(a.substr(0, 2) == "w\n");
}

TEST_CASE("online job writes one row per observation plus a sidecar") {
  TempDir dir;
  const json sim = {{"job", "simulate"},
                    {"seed", 5},
                    {"sim_length", 60},
                    {"output", dir.file("data.csv")},
                    {"model", {{"name", "lg-periodic"}, {"p", 1},
                               {"theta_star", {1.0, 0.5, 0.5, 1.0}}}}};
  run_job(parse_config(sim));

  const json online = {{"job", "online"},
                       {"seed", 6},
                       {"input", dir.file("data.csv")},
                       {"output", dir.file("run.csv")},
                       {"model", {{"name", "lg-periodic"}, {"p", 1}}},
                       {"schedule", {{"flavor", "slow-vanishing"}, {"t1", 10}}},
                       {"pf", {{"particles", 100}}}};
  run_job(parse_config(online));

  const auto rows = load_observations(dir.file("run.csv"));
  CHECK(rows.size() == 60);
  REQUIRE(rows.front().size() == 1 + 4 + 4 + 3);  // t, hats, projections, ess/flag/increment

  const std::string meta = read_file(dir.file("run.csv.meta"));
  CHECK(meta.find("version=") != std::string::npos);
  CHECK(meta.find("seed=6") != std::string::npos);
  CHECK(meta.find("pf.c_ess=") != std::string::npos);
  CHECK(meta.find("rows=60") != std::string::npos);
  CHECK(meta.find("kernel_applications=") != std::string::npos);
}

TEST_CASE("iffit on fewer than two urn rows cannot derive T") {
  TempDir dir;
  write_file(dir.file("w.csv"), "w\n0\n");
  const json j = {{"job", "iffit"},
                  {"seed", 3},
                  {"input", dir.file("w.csv")},
                  {"output", dir.file("fit.csv")},
                  {"model", {{"name", "urn"}, {"bound", 10}}},
                  {"schedule", {{"flavor", "mixed"}}},
                  {"iffit", {{"passes", 2}}}};
  CHECK_THROWS_WITH_AS(run_job(parse_config(j)), doctest::Contains("T"), std::runtime_error);
}

TEST_CASE("config echo records explicit reset times") {
  json j = {{"job", "online"},   {"seed", 1},
            {"input", "x.csv"},  {"output", "y.csv"},
            {"model", {{"name", "sv"}}},
            {"schedule", {{"flavor", "slow-vanishing"}, {"reset_times", {100, 200}}}}};
  const JobConfig cfg = parse_config(j);
  bool found = false;
  for (const auto& [k, v] : config_echo(cfg))
    if (k == "schedule.reset_times" && v == "100;200") found = true;
  CHECK(found);
}

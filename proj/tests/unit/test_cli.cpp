#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svpg/errors.hpp"
#include "svpg/metrics_io.hpp"
#include "svpg_tools/commands.hpp"
#include "svpg_tools/run_config.hpp"

using namespace svpg;
using namespace svpg::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("svpg_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tiny_config(const fs::path& out, const std::string& regime = "svpg", const std::string& env = "cartpole") {
  return "# tiny run\nenv = " + env + "\nregime = " + regime +
         "\nn = 2\nm = 200\niterations = 3\nseed = 5\nhidden = 8\ncritic_hidden = 8\n"
         "eval_budget = 100\nfinal_eval_budget = 200\ncheckpoint_every = 2\noutput_dir = " +
         out.string() + "\n";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SVPG_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing: values, comments and defaults") {
  const auto c = parse_run_config(
      "env = mountaincar  # trailing comment\n\nregime = joint\nestimator = reinforce\nalpha = 2.5\n"
      "hidden = 16, 8\nnormalize_advantages = false\nes_mode = forward\n");
  CHECK(c.train.env == EnvId::mountaincar);
  CHECK(c.train.regime == Regime::joint);
  CHECK(c.train.estimator.kind == EstimatorKind::reinforce);
  CHECK(c.train.svpg.alpha == 2.5);
  CHECK(c.train.hidden == std::vector<std::size_t>{16, 8});
  CHECK_FALSE(c.train.estimator.normalize_advantages);
  CHECK(c.train.estimator.es_mode == EsMode::forward);
  CHECK(c.train.n == TrainConfig{}.n);
}

TEST_CASE("config rendering round-trips") {
  const auto c = parse_run_config("env = swingup\nalpha = 0.3\nanneal_initial_alpha = 10\nanneal_final_alpha = 1\n"
                                  "anneal_iterations = 50\nkernel = identity\nhidden = 4,4\n");
  const auto again = parse_run_config(render_run_config(c));
  CHECK(render_run_config(again) == render_run_config(c));
  CHECK(again.train.svpg.anneal.has_value());
  CHECK(again.train.svpg.kernel == KernelMode::identity);
}

TEST_CASE("config errors name the line and the key") {
  CHECK_THROWS_WITH_AS(parse_run_config("n = 4\nbogus = 1\n"), doctest::Contains("line 2: unknown key 'bogus'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("n = 4\nn = 5\n"), doctest::Contains("line 2: n: duplicate"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("m = lots\n"), doctest::Contains("line 1: m:"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("env = pong\n"), doctest::Contains("env"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("alpha = 0\n"), doctest::Contains("alpha: temperature must be positive"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("alpha = -3\n"), doctest::Contains("temperature must be positive"),
                       ConfigError);
  CHECK_THROWS_AS(parse_run_config("just some words\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("normalize_advantages = maybe\n"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.cfg"), Error);
}

TEST_CASE("run writes the documented directory layout") {
  const auto dir = scratch("run");
  const auto text = tiny_config(dir / "out");
  auto cfg = parse_run_config(text);
  std::ostringstream log;
  const auto metrics = cmd_run(cfg, 1, log);
  const auto out = dir / "out";
  CHECK(slurp(out / "config.cfg") == text);
  CHECK(fs::exists(out / "config.resolved.cfg"));
  CHECK(fs::exists(out / "VERSION"));
  const auto table = read_csv(out / "metrics.csv");
  CHECK(table.header == metrics_columns());
  CHECK(table.rows.size() == 3);
  CHECK(table.number(2, "cumulative_transitions") == metrics.summary.total_transitions);
  CHECK(read_csv(out / "particles.csv").rows.size() == 6);
  CHECK(fs::exists(checkpoint_path(out, 2, 0)));
  CHECK(fs::exists(checkpoint_path(out, 3, 1)));
  CHECK_FALSE(fs::exists(checkpoint_path(out, 1, 0)));
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["status"] == "complete");
  CHECK(summary["env"] == "cartpole");
  CHECK(summary["final_returns"].size() == 2);
  CHECK(summary["total_transitions"].get<std::size_t>() == metrics.summary.total_transitions);

  // Rerunning the same config reproduces the metrics byte for byte.
  const auto first = slurp(out / "metrics.csv");
  cfg.output_dir = dir / "again";
  cmd_run(cfg, 2, log);
  CHECK(slurp(dir / "again" / "metrics.csv") == first);
}

TEST_CASE("compare merges runs on the transition axis") {
  const auto dir = scratch("compare");
  std::ostringstream log;
  cmd_run(parse_run_config(tiny_config(dir / "a", "svpg")), 1, log);
  cmd_run(parse_run_config(tiny_config(dir / "b", "independent")), 1, log);
  std::ostringstream out;
  cmd_compare({dir / "a", dir / "b"}, dir / "cmp", out);
  const auto merged = read_csv(dir / "cmp" / "merged.csv");
  CHECK(merged.header.front() == "cumulative_transitions");
  CHECK(merged.rows.size() >= 3);
  const auto summary = read_csv(dir / "cmp" / "summary.csv");
  CHECK(summary.rows.size() == 2);
  CHECK(out.str().find("independent") != std::string::npos);

  cmd_run(parse_run_config(tiny_config(dir / "c", "svpg", "mountaincar")), 1, log);
  CHECK_THROWS_WITH(cmd_compare({dir / "a", dir / "c"}, dir / "cmp2", out), doctest::Contains("environment mismatch"));
  CHECK_THROWS_AS(cmd_compare({dir / "a"}, dir / "cmp3", out), ConfigError);
  fs::create_directories(dir / "empty");
  CHECK_THROWS_WITH(cmd_compare({dir / "a", dir / "empty"}, dir / "cmp4", out), doctest::Contains("empty"));
}

TEST_CASE("visitation dumps one CSV per particle") {
  const auto dir = scratch("visit");
  std::ostringstream log;
  cmd_run(parse_run_config(tiny_config(dir / "run")), 1, log);
  VisitationOptions opt;
  opt.episodes = 2;
  opt.particles = {1};
  opt.output_dir = dir / "v";
  std::ostringstream out;
  const auto files = cmd_visitation(dir / "run", opt, out);
  REQUIRE(files.size() == 1);
  CHECK(files[0].filename().string().rfind("particle_1_return_", 0) == 0);
  const auto table = read_csv(files[0]);
  CHECK(table.header.front() == "episode");
  CHECK(table.header.back() == "reward");
  CHECK(table.number(table.rows.size() - 1, "episode") == 1.0);
  // Same seed, same trajectories.
  opt.output_dir = dir / "v2";
  const auto again = cmd_visitation(dir / "run", opt, out);
  CHECK(slurp(again[0]) == slurp(files[0]));
  opt.iteration = 1;
  CHECK_THROWS_WITH(cmd_visitation(dir / "run", opt, out), doctest::Contains("missing checkpoint"));
}

TEST_CASE("env-info lists every environment") {
  std::ostringstream out;
  cmd_env_info(std::nullopt, out);
  for (const char* name : {"cartpole", "swingup", "mountaincar", "doublependulum"})
    CHECK(out.str().find(name) != std::string::npos);
}

TEST_CASE("binary exit codes") {
  const auto dir = scratch("binary");
  CHECK(run_binary("--version") == 0);
  CHECK(run_binary("env-info cartpole") == 0);
  CHECK(run_binary("no-such-command") == 1);
  {
    std::ofstream(dir / "bad.cfg") << "alpha = 0\n";
  }
  CHECK(run_binary("run " + (dir / "bad.cfg").string()) == 1);
  {
    std::ofstream(dir / "good.cfg") << tiny_config(dir / "out");
  }
  CHECK(run_binary("run " + (dir / "good.cfg").string()) == 0);
  CHECK(run_binary("visitation " + (dir / "missing").string()) == 1);
  {
    std::ofstream(dir / "other.cfg") << tiny_config(dir / "other", "svpg", "mountaincar");
  }
  CHECK(run_binary("run " + (dir / "other.cfg").string()) == 0);
  // Runtime failures (here: incompatible runs) exit with 2.
  CHECK(run_binary("compare " + (dir / "out").string() + " " + (dir / "other").string() + " -o " +
                   (dir / "cmp").string()) == 2);
}

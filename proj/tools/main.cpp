#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "svpg/errors.hpp"
#include "svpg_tools/commands.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein variational policy gradient experiments"};
  app.set_version_flag("--version", SVPG_VERSION_STRING);
  app.require_subcommand(1);

  std::string config_path;
  std::size_t workers = 1;
  std::optional<std::string> output_override;
  auto* run = app.add_subcommand("run", "Train from a key = value config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--workers", workers, "Cap on concurrent particle rollouts (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  run->add_option("-o,--output", output_override, "Override output_dir from the config");

  std::vector<std::string> compare_dirs;
  std::string compare_out = "compare";
  auto* compare = app.add_subcommand("compare", "Merge completed runs by cumulative transitions");
  compare->add_option("runs", compare_dirs, "Run directories")->required()->expected(2, -1);
  compare->add_option("-o,--output", compare_out, "Output directory");

  std::string vis_dir;
  svpg::tools::VisitationOptions vis;
  auto* visitation = app.add_subcommand("visitation", "Dump visited states of checkpointed particles");
  visitation->add_option("run", vis_dir, "Run directory")->required();
  visitation->add_option("-p,--particles", vis.particles, "Particle indices (default: all)")->delimiter(',');
  visitation->add_option("-e,--episodes", vis.episodes, "Test episodes per particle");
  visitation->add_option("-i,--iteration", vis.iteration, "Checkpoint iteration (default: latest)");
  visitation->add_option("-s,--seed", vis.seed, "Rollout seed (default: the run's seed)");
  visitation->add_option("-o,--output", vis.output_dir, "Output directory (default: <run>/visitation)");

  std::optional<std::string> info_env;
  auto* env_info = app.add_subcommand("env-info", "Print environment constants");
  env_info->add_option("env", info_env, "cartpole | mountaincar | swingup | doublependulum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      auto cfg = svpg::tools::load_run_config(config_path);
      if (output_override) cfg.output_dir = *output_override;
      const auto metrics = svpg::tools::cmd_run(cfg, workers, std::cout);
      std::cout << "best_return " << metrics.summary.best_return << " (particle " << metrics.summary.best_particle
                << ")\n";
    } else if (*compare) {
      std::vector<std::filesystem::path> dirs(compare_dirs.begin(), compare_dirs.end());
      svpg::tools::cmd_compare(dirs, compare_out, std::cout);
    } else if (*visitation) {
      svpg::tools::cmd_visitation(vis_dir, vis, std::cout);
    } else if (*env_info) {
      std::optional<svpg::EnvId> id;
      if (info_env) id = svpg::parse_env_id(*info_env);
      svpg::tools::cmd_env_info(id, std::cout);
    }
  } catch (const svpg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

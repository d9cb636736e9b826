#include "svpg_tools/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "svpg/errors.hpp"
#include "svpg/format.hpp"
#include "svpg/metrics_io.hpp"
#include "svpg/rollout.hpp"
#include "svpg/serialize.hpp"

namespace fs = std::filesystem;

namespace svpg::tools {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

nlohmann::json summary_json(const RunConfig& config, const RunSummary& s) {
  nlohmann::json j;
  j["version"] = SVPG_VERSION_STRING;
  j["status"] = "complete";
  j["env"] = env_name(config.train.env);
  j["regime"] = regime_name(config.train.regime);
  j["estimator"] = estimator_name(config.train.estimator.kind);
  j["seed"] = config.train.seed;
  j["best_return"] = s.best_return;
  j["best_particle"] = s.best_particle;
  j["episodes_to_95"] = s.episodes_to_95 ? nlohmann::json(*s.episodes_to_95) : nlohmann::json(nullptr);
  j["mean_final_return"] = s.mean_final_return;
  j["final_returns"] = s.final_returns;
  j["max_eval_return"] = s.max_eval_return;
  j["total_transitions"] = s.total_transitions;
  j["total_episodes"] = s.total_episodes;
  return j;
}

class RunWriter : public TrainObserver {
 public:
  RunWriter(const RunConfig& config, std::ostream& log)
      : config_(config),
        log_(log),
        metrics_(open_out(config.output_dir / "metrics.csv")),
        particles_(open_out(config.output_dir / "particles.csv")) {
    write_metrics_header(metrics_);
    write_particles_header(particles_);
    metrics_.flush();
    particles_.flush();
  }

  void on_iteration(const IterationRecord& r, const ParticleSet& ps) override {
    write_metrics_row(metrics_, r);
    write_particle_rows(particles_, r);
    metrics_.flush();
    particles_.flush();
    const auto k = config_.checkpoint_every;
    if ((k > 0 && r.iteration % k == 0) || r.iteration == config_.train.iterations) {
      fs::create_directories(checkpoint_path(config_.output_dir, r.iteration, 0).parent_path());
      for (std::size_t p = 0; p < ps.size(); ++p) {
        save_checkpoint(checkpoint_path(config_.output_dir, r.iteration, p), ps.policies[p].checkpoint());
      }
    }
    log_ << "iter " << r.iteration << "  transitions " << r.cumulative_transitions << "  best_eval "
         << format_fixed(r.best_eval_return, 2) << "  mean_eval " << format_fixed(r.mean_eval_return, 2) << '\n';
  }

 private:
  const RunConfig& config_;
  std::ostream& log_;
  std::ofstream metrics_;
  std::ofstream particles_;
};

struct RunDir {
  fs::path path;
  std::string label;
  RunConfig config;
  CsvTable metrics;
  nlohmann::json summary;
};

RunDir load_run_dir(const fs::path& dir) {
  RunDir r;
  r.path = dir;
  r.config = load_run_config(dir / "config.cfg");
  r.metrics = read_csv(dir / "metrics.csv");
  std::ifstream in(dir / "summary.json");
  if (!in) throw Error(dir.string() + ": missing summary.json (run incomplete?)");
  r.summary = nlohmann::json::parse(in);
  return r;
}

}  // namespace

fs::path checkpoint_path(const fs::path& run_dir, std::size_t iteration, std::size_t particle) {
  return run_dir / "checkpoints" / ("iter_" + std::to_string(iteration)) /
         ("particle_" + std::to_string(particle) + ".json");
}

RunMetrics cmd_run(const RunConfig& config, std::size_t workers, std::ostream& log) {
  TrainConfig train = config.train;
  train.workers = workers;
  train.validate();
  fs::create_directories(config.output_dir);
  write_text(config.output_dir / "config.cfg", config.source_text);
  write_text(config.output_dir / "config.resolved.cfg", render_run_config(config));
  write_text(config.output_dir / "VERSION", std::string(SVPG_VERSION_STRING) + "\n");
  fs::remove(config.output_dir / "summary.json");

  RunWriter writer(config, log);
  RunMetrics metrics;
  try {
    metrics = svpg::train(train, &writer);
  } catch (const std::exception& e) {
    nlohmann::json j;
    j["version"] = SVPG_VERSION_STRING;
    j["status"] = "failed";
    j["error"] = e.what();
    write_text(config.output_dir / "summary.json", j.dump(2) + "\n");
    throw;
  }
  write_text(config.output_dir / "summary.json", summary_json(config, metrics.summary).dump(2) + "\n");
  return metrics;
}

void cmd_compare(const std::vector<fs::path>& run_dirs, const fs::path& output_dir, std::ostream& out) {
  if (run_dirs.size() < 2) throw ConfigError("compare needs at least two run directories");
  std::vector<RunDir> runs;
  std::map<std::string, int> label_counts;
  for (const auto& d : run_dirs) {
    auto r = load_run_dir(d);
    if (!runs.empty() && r.config.train.env != runs.front().config.train.env) {
      throw Error("environment mismatch: " + runs.front().path.string() + " is " +
                  std::string(env_name(runs.front().config.train.env)) + ", " + d.string() + " is " +
                  std::string(env_name(r.config.train.env)));
    }
    std::string base = fs::path(d).lexically_normal().filename().string();
    if (base.empty()) base = fs::path(d).lexically_normal().parent_path().filename().string();
    const int count = ++label_counts[base];
    r.label = count == 1 ? base : base + "_" + std::to_string(count);
    // The logged cumulative counts must be the running sum of per-iteration counts.
    std::size_t running = 0;
    for (std::size_t row = 0; row < r.metrics.rows.size(); ++row) {
      running += static_cast<std::size_t>(r.metrics.number(row, "transitions"));
      if (static_cast<std::size_t>(r.metrics.number(row, "cumulative_transitions")) != running) {
        throw Error(d.string() + ": cumulative_transitions disagrees with per-iteration transitions at row " +
                    std::to_string(row + 1));
      }
    }
    runs.push_back(std::move(r));
  }

  // Union of all cumulative-transition keys; a run contributes only at its own keys.
  std::set<std::size_t> keys;
  std::vector<std::map<std::size_t, std::size_t>> row_of(runs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& t = runs[k].metrics;
    for (std::size_t row = 0; row < t.rows.size(); ++row) {
      const auto key = static_cast<std::size_t>(t.number(row, "cumulative_transitions"));
      keys.insert(key);
      row_of[k][key] = row;
    }
  }

  fs::create_directories(output_dir);
  const std::vector<std::string> fields{"iteration", "cumulative_episodes", "best_eval_return", "mean_eval_return",
                                        "best_train_return", "mean_train_return"};
  {
    auto csv = open_out(output_dir / "merged.csv");
    csv << "cumulative_transitions";
    for (const auto& r : runs) {
      for (const auto& f : fields) csv << ',' << r.label << ':' << f;
    }
    csv << '\n';
    for (auto key : keys) {
      csv << key;
      for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto it = row_of[k].find(key);
        for (const auto& f : fields) {
          csv << ',';
          if (it != row_of[k].end()) csv << (runs[k].metrics.rows[it->second][runs[k].metrics.column(f)]);
        }
      }
      csv << '\n';
    }
  }

  auto csv = open_out(output_dir / "summary.csv");
  csv << "run,env,regime,estimator,seed,best_return,episodes_to_95,best_particle,mean_final_return\n";
  out << std::left << std::setw(24) << "run" << std::setw(13) << "regime" << std::setw(20) << "estimator"
      << std::right << std::setw(14) << "best_return" << std::setw(16) << "episodes_to_95" << std::setw(14)
      << "mean_final" << '\n';
  for (const auto& r : runs) {
    const auto& s = r.summary;
    const std::string e95 = s.at("episodes_to_95").is_null() ? "" : std::to_string(s.at("episodes_to_95").get<std::size_t>());
    const auto& t = r.config.train;
    csv << r.label << ',' << env_name(t.env) << ',' << regime_name(t.regime) << ',' << estimator_name(t.estimator.kind)
        << ',' << t.seed << ',' << format_double(s.at("best_return").get<double>()) << ',' << e95 << ','
        << s.at("best_particle").get<std::size_t>() << ',' << format_double(s.at("mean_final_return").get<double>())
        << '\n';
    out << std::left << std::setw(24) << r.label << std::setw(13) << regime_name(t.regime) << std::setw(20)
        << estimator_name(t.estimator.kind) << std::right << std::setw(14)
        << format_fixed(s.at("best_return").get<double>(), 2) << std::setw(16) << (e95.empty() ? "-" : e95)
        << std::setw(14) << format_fixed(s.at("mean_final_return").get<double>(), 2) << '\n';
  }
}

std::vector<fs::path> cmd_visitation(const fs::path& run_dir, const VisitationOptions& options, std::ostream& out) {
  if (options.episodes < 1) throw ConfigError("episodes must be >= 1");
  const auto config = load_run_config(run_dir / "config.cfg");
  std::size_t iteration = 0;
  if (options.iteration) {
    iteration = *options.iteration;
  } else {
    const auto root = run_dir / "checkpoints";
    if (!fs::is_directory(root)) throw Error("missing checkpoint directory " + root.string());
    for (const auto& entry : fs::directory_iterator(root)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("iter_", 0) == 0) iteration = std::max<std::size_t>(iteration, std::stoul(name.substr(5)));
    }
    if (iteration == 0) throw Error("no checkpoints under " + root.string());
  }
  std::vector<std::size_t> particles = options.particles;
  if (particles.empty()) {
    for (std::size_t p = 0; fs::exists(checkpoint_path(run_dir, iteration, p)); ++p) particles.push_back(p);
  }
  const fs::path out_dir = options.output_dir.value_or(run_dir / "visitation");
  fs::create_directories(out_dir);
  const std::uint64_t seed = options.seed.value_or(config.train.seed);

  std::vector<fs::path> written;
  for (auto p : particles) {
    const auto ckpt = checkpoint_path(run_dir, iteration, p);
    if (!fs::exists(ckpt)) throw Error("missing checkpoint " + ckpt.string());
    const auto policy = GaussianPolicy::from_checkpoint(load_checkpoint(ckpt), static_cast<int>(p));
    Rng rng = make_stream(agent_seed(seed, p), iteration, StreamPurpose::visitation);
    std::vector<Trajectory> episodes;
    double total = 0.0;
    for (std::size_t e = 0; e < options.episodes; ++e) {
      episodes.push_back(run_episode(config.train.env, policy, rng));
      for (double r : episodes.back().rewards) total += r;
    }
    const double mean_return = total / static_cast<double>(options.episodes);
    const auto path = out_dir / ("particle_" + std::to_string(p) + "_return_" + format_fixed(mean_return, 2) + ".csv");
    auto csv = open_out(path);
    write_trajectories_csv(csv, episodes);
    written.push_back(path);
    out << path.string() << '\n';
  }
  return written;
}

void cmd_env_info(std::optional<EnvId> env, std::ostream& out) {
  std::vector<EnvId> ids;
  if (env) {
    ids.push_back(*env);
  } else {
    ids.assign(all_envs().begin(), all_envs().end());
  }
  for (auto id : ids) {
    const auto info = env_info(id);
    out << "[" << env_name(id) << "]\n"
        << "  obs_dim = " << info.obs_dim << '\n'
        << "  action_dim = " << info.action_dim << '\n'
        << "  action_bounds = [" << format_double(info.action_low[0]) << ", " << format_double(info.action_high[0])
        << "]\n"
        << "  max_episode_length = " << info.max_episode_length << '\n';
    for (const auto& c : env_constants(id)) {
      out << "  " << c.name << " = " << format_double(c.value);
      if (!c.unit.empty()) out << "  # " << c.unit;
      out << '\n';
    }
  }
}

}  // namespace svpg::tools

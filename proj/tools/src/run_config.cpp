#include "svpg_tools/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "svpg/errors.hpp"
#include "svpg/format.hpp"

namespace svpg::tools {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t to_size(const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<std::size_t> to_sizes(const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_size(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated list of layer sizes");
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

AnnealSchedule& anneal(RunConfig& c) {
  if (!c.train.svpg.anneal) c.train.svpg.anneal = AnnealSchedule{c.train.svpg.alpha, c.train.svpg.alpha, 1};
  return *c.train.svpg.anneal;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"env", [](RunConfig& c, const std::string& v) { c.train.env = parse_env_id(v); }},
      {"regime", [](RunConfig& c, const std::string& v) { c.train.regime = parse_regime(v); }},
      {"estimator", [](RunConfig& c, const std::string& v) { c.train.estimator.kind = parse_estimator_kind(v); }},
      {"n", [](RunConfig& c, const std::string& v) { c.train.n = to_size(v); }},
      {"m", [](RunConfig& c, const std::string& v) { c.train.m = to_size(v); }},
      {"iterations", [](RunConfig& c, const std::string& v) { c.train.iterations = to_size(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.train.seed = to_u64(v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.train.svpg.alpha = to_double(v); }},
      {"anneal_initial_alpha", [](RunConfig& c, const std::string& v) { anneal(c).initial_alpha = to_double(v); }},
      {"anneal_final_alpha", [](RunConfig& c, const std::string& v) { anneal(c).final_alpha = to_double(v); }},
      {"anneal_iterations", [](RunConfig& c, const std::string& v) { anneal(c).iterations = to_size(v); }},
      {"kernel",
       [](RunConfig& c, const std::string& v) {
         if (v == "rbf") {
           c.train.svpg.kernel = KernelMode::rbf;
         } else if (v == "identity") {
           c.train.svpg.kernel = KernelMode::identity;
         } else {
           throw ConfigError("expected rbf or identity, got '" + v + "'");
         }
       }},
      {"max_grad_norm", [](RunConfig& c, const std::string& v) { c.train.svpg.max_grad_norm = to_double(v); }},
      {"es_noise_count", [](RunConfig& c, const std::string& v) { c.train.estimator.es_noise_count = to_size(v); }},
      {"es_step", [](RunConfig& c, const std::string& v) { c.train.estimator.es_step = to_double(v); }},
      {"es_mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "antithetic") {
           c.train.estimator.es_mode = EsMode::antithetic;
         } else if (v == "forward") {
           c.train.estimator.es_mode = EsMode::forward;
         } else {
           throw ConfigError("expected antithetic or forward, got '" + v + "'");
         }
       }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.train.estimator.gamma = to_double(v); }},
      {"lambda", [](RunConfig& c, const std::string& v) { c.train.estimator.lambda = to_double(v); }},
      {"normalize_advantages",
       [](RunConfig& c, const std::string& v) { c.train.estimator.normalize_advantages = to_bool(v); }},
      {"critic_epochs", [](RunConfig& c, const std::string& v) { c.train.estimator.critic_epochs = to_size(v); }},
      {"critic_minibatch", [](RunConfig& c, const std::string& v) { c.train.estimator.critic_minibatch = to_size(v); }},
      {"hidden", [](RunConfig& c, const std::string& v) { c.train.hidden = to_sizes(v); }},
      {"critic_hidden", [](RunConfig& c, const std::string& v) { c.train.critic_hidden = to_sizes(v); }},
      {"policy_step_size", [](RunConfig& c, const std::string& v) { c.train.policy_adam.step_size = to_double(v); }},
      {"critic_step_size", [](RunConfig& c, const std::string& v) { c.train.critic_adam.step_size = to_double(v); }},
      {"eval_budget", [](RunConfig& c, const std::string& v) { c.train.eval_budget = to_size(v); }},
      {"final_eval_budget", [](RunConfig& c, const std::string& v) { c.train.final_eval_budget = to_size(v); }},
      {"checkpoint_every", [](RunConfig& c, const std::string& v) { c.checkpoint_every = to_size(v); }},
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
  };
  return table;
}

// Re-run validation field by field so the message names the offending key.
void validate(const RunConfig& c) {
  const auto& t = c.train;
  auto field = [](const char* key, auto&& check) {
    try {
      check();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  };
  field("alpha", [&] { SvpgConfig s = t.svpg; s.anneal.reset(); s.validate(); });
  if (t.svpg.anneal) field("anneal", [&] { t.svpg.validate(); });
  field("estimator", [&] { t.estimator.validate(); });
  field("policy_step_size", [&] { t.policy_adam.validate(); });
  field("critic_step_size", [&] { t.critic_adam.validate(); });
  field("n", [&] { if (t.n < 1) throw ConfigError("must be >= 1"); });
  field("m", [&] { if (t.m < 1) throw ConfigError("must be >= 1"); });
  field("iterations", [&] { if (t.iterations < 1) throw ConfigError("must be >= 1"); });
  field("output_dir", [&] { if (c.output_dir.empty()) throw ConfigError("must not be empty"); });
  t.validate();
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  c.source_text = text;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (auto [prev, fresh] = seen.emplace(key, lineno); !fresh) {
      throw ConfigError(where + ": " + key + ": duplicate (first set on line " + std::to_string(prev->second) + ")");
    }
    try {
      it->second(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string render_run_config(const RunConfig& c) {
  const auto& t = c.train;
  std::ostringstream out;
  out << "env = " << env_name(t.env) << '\n'
      << "regime = " << regime_name(t.regime) << '\n'
      << "estimator = " << estimator_name(t.estimator.kind) << '\n'
      << "n = " << t.n << '\n'
      << "m = " << t.m << '\n'
      << "iterations = " << t.iterations << '\n'
      << "seed = " << t.seed << '\n'
      << "alpha = " << format_double(t.svpg.alpha) << '\n';
  if (t.svpg.anneal) {
    out << "anneal_initial_alpha = " << format_double(t.svpg.anneal->initial_alpha) << '\n'
        << "anneal_final_alpha = " << format_double(t.svpg.anneal->final_alpha) << '\n'
        << "anneal_iterations = " << t.svpg.anneal->iterations << '\n';
  }
  out << "kernel = " << (t.svpg.kernel == KernelMode::rbf ? "rbf" : "identity") << '\n'
      << "max_grad_norm = " << format_double(t.svpg.max_grad_norm) << '\n'
      << "es_noise_count = " << t.estimator.es_noise_count << '\n'
      << "es_step = " << format_double(t.estimator.es_step) << '\n'
      << "es_mode = " << (t.estimator.es_mode == EsMode::antithetic ? "antithetic" : "forward") << '\n'
      << "gamma = " << format_double(t.estimator.gamma) << '\n'
      << "lambda = " << format_double(t.estimator.lambda) << '\n'
      << "normalize_advantages = " << (t.estimator.normalize_advantages ? "true" : "false") << '\n'
      << "critic_epochs = " << t.estimator.critic_epochs << '\n'
      << "critic_minibatch = " << t.estimator.critic_minibatch << '\n'
      << "hidden = " << join(t.hidden) << '\n'
      << "critic_hidden = " << join(t.critic_hidden) << '\n'
      << "policy_step_size = " << format_double(t.policy_adam.step_size) << '\n'
      << "critic_step_size = " << format_double(t.critic_adam.step_size) << '\n'
      << "eval_budget = " << t.eval_budget << '\n'
      << "final_eval_budget = " << t.final_eval_budget << '\n'
      << "checkpoint_every = " << c.checkpoint_every << '\n'
      << "output_dir = " << c.output_dir.string() << '\n';
  return out.str();
}

}  // namespace svpg::tools

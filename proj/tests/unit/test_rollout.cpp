#include <doctest.h>

#include <cmath>
#include <sstream>

#include "svpg/errors.hpp"
#include "svpg/rollout.hpp"

using namespace svpg;

namespace {

GaussianPolicy policy_for(EnvId env, std::uint64_t seed) {
  Rng rng(seed);
  const auto info = env_info(env);
  return GaussianPolicy::create(info.obs_dim, info.action_dim, std::vector<std::size_t>{8, 8}, rng);
}

// A_t = Σ_l (γλ)^l δ_{t+l}, evaluated literally.
std::vector<double> brute_gae(const std::vector<double>& r, const std::vector<double>& v, double g, double lam,
                              bool terminal, double bootstrap) {
  const std::size_t T = r.size();
  auto value = [&](std::size_t t) { return t < T ? v[t] : (terminal ? 0.0 : bootstrap); };
  std::vector<double> a(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t l = 0; t + l < T; ++l) {
      const double delta = r[t + l] + g * value(t + l + 1) - v[t + l];
      a[t] += std::pow(g * lam, static_cast<double>(l)) * delta;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("budget 1 collects exactly one whole episode") {
  const auto p = policy_for(EnvId::cartpole, 1);
  Rng rng(2);
  const auto trajs = collect(EnvId::cartpole, p, 1, rng);
  REQUIRE(trajs.size() == 1);
  CHECK(trajs[0].terminal);
  CHECK(trajs[0].size() >= 1);
}

TEST_CASE("whole-episode arithmetic on fixed-length episodes") {
  const auto p = policy_for(EnvId::double_pendulum, 3);
  Rng rng(4);
  const auto trajs = collect(EnvId::double_pendulum, p, 750, rng);
  CHECK(trajs.size() == 2);
  CHECK(total_transitions(trajs) == 1000);
  for (const auto& t : trajs) {
    CHECK(!t.terminal);
    CHECK(t.size() == 500);
    CHECK(t.observations.cols() == 500);
    CHECK(t.actions.cols() == 500);
    CHECK(t.log_probs.size() == 500);
  }
}

TEST_CASE("collect is deterministic and respects the overshoot bound") {
  const auto p = policy_for(EnvId::cartpole, 5);
  for (std::size_t budget : {1u, 37u, 200u, 999u, 2500u}) {
    Rng a(budget), b(budget);
    const auto x = collect(EnvId::cartpole, p, budget, a);
    const auto y = collect(EnvId::cartpole, p, budget, b);
    REQUIRE(x.size() == y.size());
    for (std::size_t e = 0; e < x.size(); ++e) {
      CHECK(x[e].observations == y[e].observations);
      CHECK(x[e].actions == y[e].actions);
      CHECK(x[e].rewards == y[e].rewards);
      CHECK(x[e].log_probs == y[e].log_probs);
    }
    const auto total = total_transitions(x);
    CHECK(total >= budget);
    CHECK(total < budget + 500);
    CHECK(total - x.back().size() < budget);  // the last episode is the only overshoot
  }
  Rng rng(0);
  CHECK_THROWS_AS(collect(EnvId::cartpole, p, 0, rng), ConfigError);
}

TEST_CASE("cached log-probs match the policy") {
  const auto p = policy_for(EnvId::swingup, 6);
  Rng rng(7);
  const auto t = run_episode(EnvId::swingup, p, rng);
  CHECK(t.params_fingerprint == p.fingerprint());
  for (std::size_t i = 0; i < t.size(); i += 50) {
    const auto c = static_cast<Eigen::Index>(i);
    CHECK(p.log_prob(t.observations.col(c), t.actions.col(c)) == t.log_probs[i]);
  }
}

TEST_CASE("discounted returns") {
  const std::vector<double> r{1, 2, 3};
  CHECK(discounted_returns(r, 0.0, true, 0.0) == r);
  CHECK(discounted_returns(std::vector<double>{1, 1, 1}, 1.0, true, 0.0) == std::vector<double>{3, 2, 1});
  CHECK(discounted_returns(r, 0.5, true, 0.0) == std::vector<double>{2.75, 3.5, 3});
  // Truncated: seeded with γ·bootstrap.
  CHECK(discounted_returns(r, 0.5, false, 4.0) == std::vector<double>{3.25, 4.5, 5.0});
  CHECK_THROWS_AS(discounted_returns(r, 1.5, true, 0.0), ConfigError);
  CHECK_THROWS_AS(discounted_returns(r, -0.1, true, 0.0), ConfigError);
}

TEST_CASE("discounted returns are linear in rewards") {
  Rng rng(8);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> r(40);
  for (auto& x : r) x = n(rng);
  const auto base = discounted_returns(r, 0.97, true, 0.0);
  std::vector<double> scaled = r;
  for (auto& x : scaled) x *= 2.5;
  const auto s = discounted_returns(scaled, 0.97, true, 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) CHECK(s[t] == doctest::Approx(2.5 * base[t]).epsilon(1e-12));
}

TEST_CASE("GAE against a brute-force double sum") {
  Rng rng(9);
  std::normal_distribution<double> n(0, 1);
  for (bool terminal : {true, false}) {
    std::vector<double> r(5), v(5);
    for (auto& x : r) x = n(rng);
    for (auto& x : v) x = n(rng);
    const double boot = n(rng);
    for (double lam : {0.0, 0.7, 1.0}) {
      const auto rec = gae_advantages(r, v, 0.9, lam, terminal, boot);
      const auto want = brute_gae(r, v, 0.9, lam, terminal, boot);
      for (std::size_t t = 0; t < 5; ++t) CHECK(std::abs(rec.advantages[t] - want[t]) < 1e-12);
      CHECK(rec.returns == discounted_returns(r, 0.9, terminal, boot));
    }
    const auto td = gae_advantages(r, v, 0.9, 0.0, terminal, boot);
    for (std::size_t t = 0; t < 5; ++t) {
      const double next = t + 1 < 5 ? v[t + 1] : (terminal ? 0.0 : boot);
      CHECK(td.advantages[t] == doctest::Approx(r[t] + 0.9 * next - v[t]).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(gae_advantages(std::vector<double>{1}, std::vector<double>{0}, 0.9, 1.2, true, 0), ConfigError);
  CHECK_THROWS_AS(gae_advantages(std::vector<double>{1, 2}, std::vector<double>{0}, 0.9, 1, true, 0), DimensionError);
}

TEST_CASE("GAE(gamma, 1) on terminal episodes equals R - V") {
  Rng rng(10);
  std::normal_distribution<double> n(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> r(30), v(30);
    for (auto& x : r) x = n(rng);
    for (auto& x : v) x = n(rng);
    const auto rec = gae_advantages(r, v, 0.99, 1.0, true, 0.0);
    const auto R = discounted_returns(r, 0.99, true, 0.0);
    for (std::size_t t = 0; t < r.size(); ++t) CHECK(std::abs(rec.advantages[t] - (R[t] - v[t])) <= 1e-12);
  }
}

TEST_CASE("standardize") {
  std::vector<double> x{1, 2, 3, 4};
  standardize(x);
  double mean = 0, var = 0;
  for (double v : x) mean += v / 4;
  for (double v : x) var += (v - mean) * (v - mean) / 4;
  CHECK(std::abs(mean) < 1e-15);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
  std::vector<double> one{5};
  standardize(one);
  CHECK(one[0] == 5);
}

TEST_CASE("trajectory CSV has one row per visited state") {
  const auto p = policy_for(EnvId::cartpole, 11);
  Rng rng(12);
  const auto trajs = collect(EnvId::cartpole, p, 100, rng);
  std::ostringstream out;
  write_trajectories_csv(out, trajs);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "episode,step,obs_0,obs_1,obs_2,obs_3,action_0,reward");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == total_transitions(trajs));
}

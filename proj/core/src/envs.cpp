#include "svpg/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "svpg/errors.hpp"
#include "svpg/types.hpp"

namespace svpg {

namespace {

using State4 = std::array<double, 4>;

// Barto, Sutton & Anderson cart-pole. Angle 0 is upright.
namespace cart {
constexpr double gravity = 9.8;
constexpr double cart_mass = 1.0;
constexpr double pole_mass = 0.1;
constexpr double half_length = 0.5;
constexpr double force_scale = 10.0;
}  // namespace cart

namespace cartpole {
constexpr double dt = 0.02;
constexpr double angle_limit = 0.2;
constexpr double position_limit = 2.4;
constexpr double reset_spread = 0.05;
}  // namespace cartpole

namespace swingup {
constexpr double substep_dt = 0.01;
constexpr int substeps = 2;
constexpr double position_limit = 3.0;
// One full episode of hanging (cos = −1 per step). A milder penalty makes
// running off the track the best strategy an unskilled policy can find.
constexpr double out_of_bounds_reward = -static_cast<double>(kMaxEpisodeLength);
constexpr double reset_angle_spread = 0.1;
}  // namespace swingup

namespace mountaincar {
constexpr double min_position = -1.2;
constexpr double max_position = 0.6;
constexpr double max_speed = 0.07;
constexpr double power = 0.0015;
constexpr double gravity = 0.0025;
constexpr double goal_position = 0.45;
constexpr double goal_reward = 1.0;
constexpr double action_cost = 0.01;
constexpr double reset_center = -0.5;
constexpr double reset_spread = 0.1;
}  // namespace mountaincar

// Two-link pendulum (uniform rods), torque at the base joint. Angles measured
// from upright; theta2 is relative to link 1.
namespace dpend {
constexpr double gravity = 9.8;
constexpr double mass1 = 1.0;
constexpr double mass2 = 1.0;
constexpr double length1 = 1.0;
constexpr double length2 = 1.0;
constexpr double com1 = 0.5;
constexpr double com2 = 0.5;
constexpr double inertia1 = mass1 * length1 * length1 / 12.0;
constexpr double inertia2 = mass2 * length2 * length2 / 12.0;
constexpr double torque_scale = 10.0;
constexpr double substep_dt = 0.01;
constexpr int substeps = 5;
constexpr double max_speed = 8.0 * std::numbers::pi;
constexpr double reset_angle_spread = 0.1;
}  // namespace dpend

State4 cartpole_derivative(const State4& s, double force) {
  using namespace cart;
  const double theta = s[2];
  const double theta_dot = s[3];
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);
  const double total_mass = cart_mass + pole_mass;
  const double pole_ml = pole_mass * half_length;
  const double temp = (force + pole_ml * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (gravity * sin_t - cos_t * temp) / (half_length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;
  return {s[1], x_acc, theta_dot, theta_acc};
}

State4 dpend_derivative(const State4& s, double torque) {
  using namespace dpend;
  const double t1 = s[0], t2 = s[1], w1 = s[2], w2 = s[3];
  const double c2 = std::cos(t2);
  const double s2 = std::sin(t2);
  const double d11 = mass1 * com1 * com1 + mass2 * (length1 * length1 + com2 * com2 + 2.0 * length1 * com2 * c2) +
                     inertia1 + inertia2;
  const double d12 = mass2 * (com2 * com2 + length1 * com2 * c2) + inertia2;
  const double d22 = mass2 * com2 * com2 + inertia2;
  const double coupling = mass2 * length1 * com2 * s2;
  const double h1 = -coupling * w2 * w2 - 2.0 * coupling * w1 * w2;
  const double h2 = coupling * w1 * w1;
  const double phi1 = -(mass1 * com1 + mass2 * length1) * gravity * std::sin(t1) - mass2 * com2 * gravity * std::sin(t1 + t2);
  const double phi2 = -mass2 * com2 * gravity * std::sin(t1 + t2);
  const double rhs1 = torque - h1 - phi1;
  const double rhs2 = -h2 - phi2;
  const double det = d11 * d22 - d12 * d12;
  const double acc1 = (d22 * rhs1 - d12 * rhs2) / det;
  const double acc2 = (d11 * rhs2 - d12 * rhs1) / det;
  return {w1, w2, acc1, acc2};
}

template <typename Deriv>
State4 rk4(const State4& s, double dt, Deriv&& f) {
  auto axpy = [](const State4& a, double h, const State4& b) {
    State4 r;
    for (std::size_t i = 0; i < 4; ++i) r[i] = a[i] + h * b[i];
    return r;
  };
  const State4 k1 = f(s);
  const State4 k2 = f(axpy(s, 0.5 * dt, k1));
  const State4 k3 = f(axpy(s, 0.5 * dt, k2));
  const State4 k4 = f(axpy(s, dt, k3));
  State4 r;
  for (std::size_t i = 0; i < 4; ++i) r[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

State4 to_array(const Eigen::VectorXd& v) { return {v[0], v[1], v[2], v[3]}; }

Eigen::VectorXd observe(EnvId id, const Eigen::VectorXd& s) {
  switch (id) {
    case EnvId::cartpole:
      return s;
    case EnvId::mountaincar:
      // Velocity in units of the speed limit, so both entries are O(1).
      return Eigen::Vector2d(s[0], s[1] / mountaincar::max_speed);
    case EnvId::swingup: {
      Eigen::VectorXd o(5);
      o << s[0], s[1], std::cos(s[2]), std::sin(s[2]), s[3];
      return o;
    }
    case EnvId::double_pendulum: {
      Eigen::VectorXd o(6);
      o << std::cos(s[0]), std::sin(s[0]), std::cos(s[1]), std::sin(s[1]), s[2], s[3];
      return o;
    }
  }
  throw Error("unknown environment");
}

std::size_t internal_dim(EnvId id) { return id == EnvId::mountaincar ? 2 : 4; }

Eigen::VectorXd from_array(const State4& a) { return Eigen::Vector4d(a[0], a[1], a[2], a[3]); }

constexpr std::array<EnvId, 4> kAllEnvs = {EnvId::cartpole, EnvId::mountaincar, EnvId::swingup,
                                           EnvId::double_pendulum};

}  // namespace

EnvId parse_env_id(std::string_view id) {
  for (auto e : kAllEnvs) {
    if (env_name(e) == id) return e;
  }
  throw ConfigError("unknown environment id '" + std::string(id) + "'");
}

std::string_view env_name(EnvId id) {
  switch (id) {
    case EnvId::cartpole:
      return "cartpole";
    case EnvId::mountaincar:
      return "mountaincar";
    case EnvId::swingup:
      return "swingup";
    case EnvId::double_pendulum:
      return "doublependulum";
  }
  throw Error("unknown environment");
}

std::span<const EnvId> all_envs() { return kAllEnvs; }

EnvInfo env_info(EnvId id) {
  EnvInfo info;
  info.action_dim = 1;
  info.action_low = Eigen::VectorXd::Constant(1, -1.0);
  info.action_high = Eigen::VectorXd::Constant(1, 1.0);
  switch (id) {
    case EnvId::cartpole:
      info.obs_dim = 4;
      break;
    case EnvId::mountaincar:
      info.obs_dim = 2;
      break;
    case EnvId::swingup:
      info.obs_dim = 5;
      break;
    case EnvId::double_pendulum:
      info.obs_dim = 6;
      break;
  }
  return info;
}

std::vector<EnvConstant> env_constants(EnvId id) {
  std::vector<EnvConstant> c;
  switch (id) {
    case EnvId::cartpole:
    case EnvId::swingup:
      c = {{"gravity", cart::gravity, "m/s^2"},
           {"cart_mass", cart::cart_mass, "kg"},
           {"pole_mass", cart::pole_mass, "kg"},
           {"pole_half_length", cart::half_length, "m"},
           {"force_scale", cart::force_scale, "N"}};
      if (id == EnvId::cartpole) {
        c.push_back({"control_dt", cartpole::dt, "s (explicit Euler)"});
        c.push_back({"angle_limit", cartpole::angle_limit, "rad"});
        c.push_back({"position_limit", cartpole::position_limit, "m"});
        c.push_back({"reset_spread", cartpole::reset_spread, "uniform +/- on each state entry"});
      } else {
        c.push_back({"rk4_substep_dt", swingup::substep_dt, "s"});
        c.push_back({"rk4_substeps", swingup::substeps, "per control"});
        c.push_back({"position_limit", swingup::position_limit, "m"});
        c.push_back({"out_of_bounds_reward", swingup::out_of_bounds_reward, ""});
        c.push_back({"reset_angle_spread", swingup::reset_angle_spread, "rad around pi"});
      }
      break;
    case EnvId::mountaincar:
      c = {{"min_position", mountaincar::min_position, ""},
           {"max_position", mountaincar::max_position, ""},
           {"max_speed", mountaincar::max_speed, ""},
           {"power", mountaincar::power, ""},
           {"gravity", mountaincar::gravity, "coefficient of cos(3 x)"},
           {"goal_position", mountaincar::goal_position, ""},
           {"goal_reward", mountaincar::goal_reward, ""},
           {"action_cost", mountaincar::action_cost, "per a^2"}};
      break;
    case EnvId::double_pendulum:
      c = {{"gravity", dpend::gravity, "m/s^2"},
           {"mass1", dpend::mass1, "kg"},
           {"mass2", dpend::mass2, "kg"},
           {"length1", dpend::length1, "m"},
           {"length2", dpend::length2, "m"},
           {"torque_scale", dpend::torque_scale, "N m"},
           {"rk4_substep_dt", dpend::substep_dt, "s"},
           {"rk4_substeps", dpend::substeps, "per control"},
           {"max_speed", dpend::max_speed, "rad/s"},
           {"reset_angle_spread", dpend::reset_angle_spread, "rad around upright"}};
      break;
  }
  c.push_back({"max_episode_length", static_cast<double>(kMaxEpisodeLength), "steps"});
  return c;
}

std::size_t reset_noise_dim(EnvId id) {
  switch (id) {
    case EnvId::cartpole:
      return 4;
    case EnvId::mountaincar:
      return 1;
    case EnvId::swingup:
      return 1;
    case EnvId::double_pendulum:
      return 2;
  }
  throw Error("unknown environment");
}

EnvState env_reset_from_noise(EnvId id, std::span<const double> u) {
  require_size(u.size(), reset_noise_dim(id), "reset noise");
  Eigen::VectorXd s;
  switch (id) {
    case EnvId::cartpole:
      s = Eigen::Vector4d(u[0], u[1], u[2], u[3]) * cartpole::reset_spread;
      break;
    case EnvId::mountaincar:
      s = Eigen::Vector2d(mountaincar::reset_center + mountaincar::reset_spread * u[0], 0.0);
      break;
    case EnvId::swingup:
      s = Eigen::Vector4d(0.0, 0.0, std::numbers::pi + swingup::reset_angle_spread * u[0], 0.0);
      break;
    case EnvId::double_pendulum:
      s = Eigen::Vector4d(dpend::reset_angle_spread * u[0], dpend::reset_angle_spread * u[1], 0.0, 0.0);
      break;
  }
  return make_state(id, s);
}

EnvState env_reset(EnvId id, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::array<double, 4> u{};
  const auto k = reset_noise_dim(id);
  for (std::size_t i = 0; i < k; ++i) u[i] = dist(rng);
  return env_reset_from_noise(id, std::span<const double>(u.data(), k));
}

EnvState make_state(EnvId id, const Eigen::Ref<const Eigen::VectorXd>& internal) {
  require_size(static_cast<std::size_t>(internal.size()), internal_dim(id), "environment state");
  require_finite(internal, "environment state");
  EnvState st;
  st.internal = internal;
  st.observation = observe(id, st.internal);
  return st;
}

StepResult env_step(EnvId id, const EnvState& state, const Eigen::Ref<const Eigen::VectorXd>& action) {
  // Every environment has one action in [-1, 1] (see env_info); no per-step lookup.
  require_size(static_cast<std::size_t>(action.size()), 1, "action");
  require_size(static_cast<std::size_t>(state.internal.size()), internal_dim(id), "environment state");
  require_finite(action, "action");
  require_finite(state.internal, "environment state");
  const double a = std::clamp(action[0], -1.0, 1.0);

  StepResult r;
  switch (id) {
    case EnvId::cartpole: {
      const State4 s = to_array(state.internal);
      const State4 d = cartpole_derivative(s, cart::force_scale * a);
      State4 next;
      for (std::size_t i = 0; i < 4; ++i) next[i] = s[i] + cartpole::dt * d[i];
      const bool in_bounds = std::abs(next[0]) < cartpole::position_limit && std::abs(next[2]) < cartpole::angle_limit;
      r.next_state = make_state(id, from_array(next));
      r.reward = in_bounds ? 1.0 : 0.0;
      r.terminal = !in_bounds;
      break;
    }
    case EnvId::swingup: {
      State4 s = to_array(state.internal);
      auto f = [&](const State4& x) { return cartpole_derivative(x, cart::force_scale * a); };
      for (int k = 0; k < swingup::substeps; ++k) s = rk4(s, swingup::substep_dt, f);
      r.next_state = make_state(id, from_array(s));
      if (std::abs(s[0]) > swingup::position_limit) {
        r.reward = swingup::out_of_bounds_reward;
        r.terminal = true;
      } else {
        r.reward = std::cos(s[2]);
      }
      break;
    }
    case EnvId::mountaincar: {
      using namespace mountaincar;
      double position = state.internal[0];
      double velocity = state.internal[1];
      velocity += a * power - gravity * std::cos(3.0 * position);
      velocity = std::clamp(velocity, -max_speed, max_speed);
      position += velocity;
      position = std::clamp(position, min_position, max_position);
      if (position == min_position && velocity < 0.0) velocity = 0.0;
      r.next_state = make_state(id, Eigen::Vector2d(position, velocity));
      r.terminal = position >= goal_position;
      r.reward = -action_cost * a * a + (r.terminal ? goal_reward : 0.0);
      break;
    }
    case EnvId::double_pendulum: {
      State4 s = to_array(state.internal);
      auto f = [&](const State4& x) { return dpend_derivative(x, dpend::torque_scale * a); };
      for (int k = 0; k < dpend::substeps; ++k) s = rk4(s, dpend::substep_dt, f);
      s[2] = std::clamp(s[2], -dpend::max_speed, dpend::max_speed);
      s[3] = std::clamp(s[3], -dpend::max_speed, dpend::max_speed);
      r.next_state = make_state(id, from_array(s));
      const double tip_x = dpend::length1 * std::sin(s[0]) + dpend::length2 * std::sin(s[0] + s[1]);
      const double tip_y = dpend::length1 * std::cos(s[0]) + dpend::length2 * std::cos(s[0] + s[1]);
      const double target_y = dpend::length1 + dpend::length2;
      r.reward = -std::hypot(tip_x, tip_y - target_y);
      break;
    }
  }
  return r;
}

double mechanical_energy(EnvId id, const EnvState& state) {
  const auto& s = state.internal;
  switch (id) {
    case EnvId::cartpole:
    case EnvId::swingup: {
      using namespace cart;
      const double xd = s[1], th = s[2], thd = s[3];
      const double kinetic = 0.5 * (cart_mass + pole_mass) * xd * xd +
                             pole_mass * half_length * xd * thd * std::cos(th) +
                             (2.0 / 3.0) * pole_mass * half_length * half_length * thd * thd;
      const double potential = pole_mass * gravity * half_length * (1.0 + std::cos(th));
      return kinetic + potential;
    }
    case EnvId::double_pendulum: {
      using namespace dpend;
      const double t1 = s[0], t2 = s[1], w1 = s[2], w2 = s[3];
      const double c2 = std::cos(t2);
      const double d11 = mass1 * com1 * com1 +
                         mass2 * (length1 * length1 + com2 * com2 + 2.0 * length1 * com2 * c2) + inertia1 + inertia2;
      const double d12 = mass2 * (com2 * com2 + length1 * com2 * c2) + inertia2;
      const double d22 = mass2 * com2 * com2 + inertia2;
      const double kinetic = 0.5 * (d11 * w1 * w1 + 2.0 * d12 * w1 * w2 + d22 * w2 * w2);
      const double potential = mass1 * gravity * com1 * (1.0 + std::cos(t1)) +
                               mass2 * gravity * (length1 * (1.0 + std::cos(t1)) + com2 * (1.0 + std::cos(t1 + t2)));
      return kinetic + potential;
    }
    case EnvId::mountaincar:
      break;
  }
  throw Error("mechanical energy is defined only for the pendulum systems");
}

}  // namespace svpg

#include <doctest.h>

#include <cmath>
#include <limits>

#include "svpg/adam.hpp"
#include "svpg/errors.hpp"

using namespace svpg;

namespace {

// Scalar reference of the bias-corrected recurrence.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double g, double lr = 1e-2, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8) {
    ++t;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double mh = m / (1.0 - std::pow(b1, t));
    const double vh = v / (1.0 - std::pow(b2, t));
    return lr * mh / (std::sqrt(vh) + eps);
  }
};

}  // namespace

TEST_CASE("zero gradient leaves parameters unchanged") {
  auto state = AdamState::zeros(3);
  Eigen::VectorXd p(3);
  p << 1.0, -2.0, 3.0;
  const Eigen::VectorXd before = p;
  adam_step(state, p, Eigen::VectorXd::Zero(3), StepDirection::ascent);
  CHECK(p == before);
  CHECK(state.step_count == 1);
}

TEST_CASE("first step equals eps*g/(|g|+eps_hat)") {
  auto state = AdamState::zeros(3);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  const Eigen::Vector3d g(0.5, -3.0, 1e-3);
  adam_step(state, p, g, StepDirection::ascent);
  for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1e-2 * g[i] / (std::abs(g[i]) + 1e-8)).epsilon(1e-14));

  auto down = AdamState::zeros(3);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(3);
  adam_step(down, q, g, StepDirection::descent);
  CHECK(q == -p);
}

TEST_CASE("multi-step updates follow the scalar recurrence") {
  AdamConfig cfg;
  cfg.step_size = 3e-3;
  auto state = AdamState::zeros(1, cfg);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.25);
  ScalarAdam ref;
  double x = 0.25;
  for (double g : {0.7, 0.7, -0.2, 4.0, 0.0}) {
    adam_step(state, p, Eigen::VectorXd::Constant(1, g), StepDirection::ascent);
    x += ref.step(g, 3e-3);
    CHECK(p[0] == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK(state.step_count == 5);
}

TEST_CASE("non-finite gradients are rejected without side effects") {
  auto state = AdamState::zeros(2);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(2);
  Eigen::Vector2d g(1.0, std::numeric_limits<double>::quiet_NaN());
  try {
    adam_step(state, p, g, StepDirection::ascent, 7);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("particle 7") != std::string::npos);
  }
  CHECK(p == Eigen::VectorXd::Ones(2));
  CHECK(state.step_count == 0);
  CHECK_THROWS_AS(adam_step(state, p, Eigen::VectorXd::Zero(3), StepDirection::ascent), DimensionError);
}

TEST_CASE("config validation") {
  AdamConfig c;
  c.step_size = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AdamConfig{};
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

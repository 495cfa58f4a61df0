#include <doctest.h>

#include <cmath>

#include "daglab/obs_noise.hpp"
#include "daglab/pointmass.hpp"

using namespace daglab;

TEST_CASE("proportional expert contracts the state monotonically") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  cfg.fixed_x0 = 1.0;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  env.reset(0);
  expert.begin_episode();
  double prev = std::abs(env.state());
  while (!env.done()) {
    (void)env.step(expert.act());
    CHECK(std::abs(env.state()) < prev);
    prev = std::abs(env.state());
  }
  CHECK(env.outcome() == Outcome::TimedOut);
}

TEST_CASE("zero initial state stays at zero") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  cfg.fixed_x0 = 0.0;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  env.reset(0);
  expert.begin_episode();
  while (!env.done()) {
    const StepResult res = env.step(expert.act());
    CHECK(env.state() == 0.0);
    CHECK(res.reward == 0.0);
  }
}

TEST_CASE("expert return matches a hand-summed quadratic penalty") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  cfg.fixed_x0 = 1.0;
  cfg.max_steps = 50;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  env.reset(0);
  expert.begin_episode();
  double total = 0.0;
  while (!env.done()) total += env.step(expert.act()).reward;

  // independent arithmetic: x_{t+1} = (1 - gain*dt) x_t, reward -x_{t+1}^2
  double x = cfg.fixed_x0, want = 0.0;
  for (int t = 0; t < cfg.max_steps; ++t) {
    x = (1.0 - cfg.gain * cfg.dt) * x;
    want += -x * x;
  }
  CHECK(total == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("actions are clamped to the command limit") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  cfg.fixed_x0 = 0.0;
  cfg.u_max = 2.0;
  PointmassEnv env(cfg);
  env.reset(0);
  (void)env.step(Action{{100.0}});
  CHECK(env.state() == doctest::Approx(2.0 * cfg.dt));
}

TEST_CASE("sigma = 0 wrapper passes observations through bitwise") {
  PointmassConfig cfg;
  PointmassEnv env(cfg);
  GaussianObsWrapper wrapped(env, 0.0);
  PointmassEnv reference(cfg);
  const Observation a = wrapped.reset(99);
  const Observation b = reference.reset(99);
  CHECK(a.values == b.values);
  for (int t = 0; t < 10; ++t) {
    const StepResult ra = wrapped.step(Action{{0.3}});
    const StepResult rb = reference.step(Action{{0.3}});
    CHECK(ra.observation.values == rb.observation.values);
  }
}

TEST_CASE("wrapper noise has the configured standard deviation") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  cfg.fixed_x0 = 0.0;
  cfg.max_steps = 1000000;
  PointmassEnv env(cfg);
  GaussianObsWrapper wrapped(env, 0.1);
  wrapped.reset(12345);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const StepResult res = wrapped.step(Action{{0.0}});  // state pinned at zero
    sum += res.observation.values[0];
    sum_sq += res.observation.values[0] * res.observation.values[0];
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::abs(sd - 0.1) < 0.001);  // within 1%
}

TEST_CASE("wrapper never alters rewards or termination") {
  PointmassConfig cfg;
  cfg.max_steps = 30;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PointmassEnv base(cfg), inner(cfg);
    GaussianObsWrapper wrapped(inner, 0.5);
    base.reset(seed);
    wrapped.reset(seed);
    while (!base.done()) {
      const Action a{{0.17}};
      const StepResult rb = base.step(a);
      const StepResult rw = wrapped.step(a);
      CHECK(rb.reward == rw.reward);
      CHECK(rb.done == rw.done);
      CHECK(rb.outcome == rw.outcome);
    }
    CHECK(wrapped.done());
  }
}

TEST_CASE("stepping a finished episode raises") {
  PointmassConfig cfg;
  cfg.max_steps = 2;
  PointmassEnv env(cfg);
  CHECK_THROWS_AS((void)env.step(Action{{0.0}}), ProtocolError);  // before reset
  env.reset(1);
  (void)env.step(Action{{0.0}});
  (void)env.step(Action{{0.0}});
  CHECK(env.done());
  CHECK_THROWS_AS((void)env.step(Action{{0.0}}), ProtocolError);
}

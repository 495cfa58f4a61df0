#pragma once

#include "daglab/env.hpp"
#include "daglab/rng.hpp"

namespace daglab {

// 1-D point mass with velocity commands: x' = x + u*dt, reward -x'^2 per
// step, fixed horizon. Fast analytic test bed for the DAgger engine.
struct PointmassConfig {
  double dt = 0.1;
  double gain = 1.0;   // expert feedback gain, u = -gain * x
  double u_max = 2.0;  // command clamp
  int max_steps = 50;
  double start_lo = -1.0;
  double start_hi = 1.0;
  bool fixed_start = false;  // when set, every episode starts at fixed_x0
  double fixed_x0 = 1.0;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("env.pointmass.dt must be > 0");
    if (!(u_max > 0.0)) throw ConfigError("env.pointmass.u_max must be > 0");
    if (max_steps < 1) throw ConfigError("env.pointmass.max_steps must be >= 1");
    if (start_lo > start_hi) throw ConfigError("env.pointmass.start_lo must be <= start_hi");
  }
};

class PointmassEnv : public Environment {
 public:
  explicit PointmassEnv(PointmassConfig cfg) : cfg_(cfg), rng_(0) { cfg_.validate(); }

  const PointmassConfig& config() const { return cfg_; }
  double state() const { return x_; }

  int observation_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  int max_steps() const override { return cfg_.max_steps; }

  Observation reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    x_ = cfg_.fixed_start ? cfg_.fixed_x0 : rng_.uniform(cfg_.start_lo, cfg_.start_hi);
    steps_ = 0;
    outcome_ = Outcome::Running;
    started_ = true;
    return Observation{{x_}};
  }

  StepResult step(const Action& action) override {
    if (!started_) throw ProtocolError("pointmass: step before reset");
    if (outcome_ != Outcome::Running) throw ProtocolError("pointmass: step after done");
    if (action.values.size() != 1) throw ShapeError("pointmass: action must be 1-D");
    const double u = std::max(-cfg_.u_max, std::min(cfg_.u_max, action.values[0]));
    x_ += u * cfg_.dt;
    ++steps_;
    StepResult res;
    res.reward = -x_ * x_;
    if (steps_ >= cfg_.max_steps) outcome_ = Outcome::TimedOut;
    res.outcome = outcome_;
    res.done = outcome_ != Outcome::Running;
    res.observation = Observation{{x_}};
    return res;
  }

  bool done() const override { return outcome_ != Outcome::Running; }
  Outcome outcome() const override { return outcome_; }
  int steps_taken() const override { return steps_; }
  std::array<double, 3> pose_xyt() const override { return {x_, 0.0, 0.0}; }

 private:
  PointmassConfig cfg_;
  Rng rng_;
  double x_ = 0.0;
  int steps_ = 0;
  Outcome outcome_ = Outcome::Running;
  bool started_ = false;
};

// Proportional controller on the true state.
class PointmassExpert : public ExpertPolicy {
 public:
  explicit PointmassExpert(const PointmassEnv& env) : env_(&env) {}
  void begin_episode() override {}
  Action act() override { return Action{{-env_->config().gain * env_->state()}}; }

 private:
  const PointmassEnv* env_;
};

}  // namespace daglab

#pragma once

#include "daglab/env.hpp"
#include "daglab/rng.hpp"

namespace daglab {

// Adds i.i.d. N(0, sigma^2) noise to every observation component the novice
// sees. Rewards, termination, and the privileged state pass through, so a
// bound expert is unaffected.
class GaussianObsWrapper : public Environment {
 public:
  GaussianObsWrapper(Environment& inner, double sigma)
      : inner_(&inner), sigma_(sigma), rng_(0) {
    if (sigma < 0.0) throw ConfigError("env.obs_noise_sigma must be >= 0");
  }

  int observation_dim() const override { return inner_->observation_dim(); }
  int action_dim() const override { return inner_->action_dim(); }
  int max_steps() const override { return inner_->max_steps(); }

  Observation reset(std::uint64_t seed) override {
    rng_ = Rng(derive_seed(seed, 0x6f6273u));  // independent noise stream
    return corrupt(inner_->reset(seed));
  }

  StepResult step(const Action& action) override {
    StepResult res = inner_->step(action);
    res.observation = corrupt(std::move(res.observation));
    return res;
  }

  bool done() const override { return inner_->done(); }
  Outcome outcome() const override { return inner_->outcome(); }
  int steps_taken() const override { return inner_->steps_taken(); }
  std::array<double, 3> pose_xyt() const override { return inner_->pose_xyt(); }

 private:
  Observation corrupt(Observation obs) {
    if (sigma_ > 0.0)
      for (double& v : obs.values) v += rng_.normal(0.0, sigma_);
    return obs;
  }

  Environment* inner_;
  double sigma_;
  Rng rng_;
};

}  // namespace daglab

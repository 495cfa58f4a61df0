#pragma once

#include <cmath>
#include <vector>

#include "daglab/net.hpp"

namespace daglab {

struct Observation {
  std::vector<double> values;
};

struct Action {
  std::vector<double> values;
};

enum class Norm { Euclidean, Max };

inline double action_distance(const Action& a, const Action& b, Norm norm = Norm::Euclidean) {
  if (a.values.size() != b.values.size())
    throw ShapeError("action_distance: dimension mismatch");
  if (norm == Norm::Euclidean) {
    double sum = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
      const double d = a.values[i] - b.values[i];
      sum += d * d;
    }
    return std::sqrt(sum);
  }
  double best = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    best = std::max(best, std::abs(a.values[i] - b.values[i]));
  return best;
}

// N actions drawn from the novice plus their componentwise arithmetic mean.
struct ActionSampleSet {
  std::vector<Action> samples;
  Action mean;
};

inline Action sample_mean(const std::vector<Action>& samples) {
  if (samples.empty()) throw ShapeError("sample_mean: no samples");
  Action mean;
  mean.values.assign(samples.front().values.size(), 0.0);
  for (const Action& s : samples) {
    if (s.values.size() != mean.values.size())
      throw ShapeError("sample_mean: inconsistent action dims");
    for (size_t i = 0; i < mean.values.size(); ++i) mean.values[i] += s.values[i];
  }
  for (double& v : mean.values) v /= static_cast<double>(samples.size());
  return mean;
}

// N independent stochastic passes with fresh masks each.
inline ActionSampleSet novice_sample(const Mlp& net, const Observation& obs, int n, Rng& rng) {
  if (n < 1) throw ShapeError("novice_sample: N must be >= 1");
  ActionSampleSet set;
  set.samples.reserve(n);
  for (int i = 0; i < n; ++i)
    set.samples.push_back(Action{net.forward_stochastic(obs.values, rng)});
  set.mean = sample_mean(set.samples);
  return set;
}

// Dropout-free pass; used wherever the novice acts alone.
inline Action novice_act_deterministic(const Mlp& net, const Observation& obs) {
  return Action{net.forward_deterministic(obs.values)};
}

// Novice policy over observations.
class NovicePolicy {
 public:
  virtual ~NovicePolicy() = default;
  virtual Action act_deterministic(const Observation& obs) const = 0;
  virtual ActionSampleSet sample(const Observation& obs, int n, Rng& rng) const = 0;
};

class MlpNovice : public NovicePolicy {
 public:
  explicit MlpNovice(const Mlp& net) : net_(&net) {}
  Action act_deterministic(const Observation& obs) const override {
    return novice_act_deterministic(*net_, obs);
  }
  ActionSampleSet sample(const Observation& obs, int n, Rng& rng) const override {
    return novice_sample(*net_, obs, n, rng);
  }

 private:
  const Mlp* net_;
};

// Expert with privileged access to its environment's state. Implementations
// are bound to a concrete environment instance at construction.
class ExpertPolicy {
 public:
  virtual ~ExpertPolicy() = default;
  // Called once per episode after the environment reset (replanning etc.).
  virtual void begin_episode() = 0;
  // The expert's action for the environment's current state. Deterministic.
  virtual Action act() = 0;
};

}  // namespace daglab

#pragma once

#include <array>
#include <cstdint>

#include "daglab/policy.hpp"

namespace daglab {

enum class Outcome { Running, Exited, Collided, TimedOut };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Running: return "running";
    case Outcome::Exited: return "exited";
    case Outcome::Collided: return "collided";
    case Outcome::TimedOut: return "timed_out";
  }
  return "?";
}

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::Running;
};

// Episode-based environment. Instances are single-threaded and own their
// random stream, seeded per episode through reset().
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int max_steps() const = 0;
  virtual Observation reset(std::uint64_t seed) = 0;
  // Throws ProtocolError when called after done.
  virtual StepResult step(const Action& action) = 0;
  virtual bool done() const = 0;
  virtual Outcome outcome() const = 0;
  virtual int steps_taken() const = 0;
  // Privileged planar state (x, y, theta) for trajectory dumps; environments
  // without a pose return zeros beyond their own coordinates.
  virtual std::array<double, 3> pose_xyt() const { return {0.0, 0.0, 0.0}; }
};

}  // namespace daglab

#pragma once

#include <stdexcept>
#include <string>

namespace daglab {

// Input/parameter shapes that do not line up (vector lengths, matrix dims).
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Training blew up: nonfinite loss/gradients or loss above the abort bound.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry preconditions violated (e.g. raycast from outside the room).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No feasible Dubins word for a pose pair.
struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Episode protocol misuse (step after done, missing reset).
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

// Bad or unknown configuration keys/values. Messages name the key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace daglab

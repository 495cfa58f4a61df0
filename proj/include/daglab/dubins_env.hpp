#pragma once

#include <algorithm>
#include <vector>

#include "daglab/dubins.hpp"
#include "daglab/env.hpp"
#include "daglab/rng.hpp"

namespace daglab {

// Square room with one exit gap centered in the top wall, watched by a
// planar lidar. Distances in meters, angles in radians, time in seconds.
struct DubinsRoomConfig {
  double room_size = 100.0;
  double exit_width = 20.0;
  int lidar_rays = 100;
  double lidar_max_range = 100.0;
  double sigma1 = 10.0;  // additive range noise, meters
  double sigma2 = 0.5;   // multiplicative range noise, m/m
  double dt = 0.1;
  double omega_max = 1.0;
  double speed = 10.0;  // forward speed v; turn radius is speed / omega_max
  int max_steps = 300;
  double collision_buffer = 0.5;  // car-center-to-wall distance that counts as contact
  // Start poses are sampled in [start_margin, room_size - start_margin] x
  // [start_margin, start_y_max] with heading uniform in (-pi, 0), i.e. facing
  // away from the exit. The margins keep the first turning arc clear of the
  // walls and the start-to-goal distance above 4 turn radii, where the
  // shortest Dubins word is always arc-straight-arc.
  double start_margin = 22.0;
  double start_y_max = 45.0;
  // The expert's goal pose sits this far inside the room, centered under the
  // exit and heading out; the final turning circles then clear the top wall.
  double goal_inset = 14.0;

  double turn_radius() const { return speed / omega_max; }
  Pose goal_pose() const {
    return Pose{room_size / 2.0, room_size - goal_inset, std::numbers::pi / 2.0};
  }

  void validate() const {
    if (!(room_size > 0.0)) throw ConfigError("env.dubins.room_size must be > 0");
    if (!(exit_width > 0.0 && exit_width < room_size))
      throw ConfigError("env.dubins.exit_width must be in (0, room_size)");
    if (lidar_rays < 1) throw ConfigError("env.dubins.lidar_rays must be >= 1");
    if (!(lidar_max_range > 0.0)) throw ConfigError("env.dubins.lidar_max_range must be > 0");
    if (sigma1 < 0.0 || sigma2 < 0.0) throw ConfigError("env.dubins.sigma must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("env.dubins.dt must be > 0");
    if (!(omega_max > 0.0)) throw ConfigError("env.dubins.omega_max must be > 0");
    if (!(speed > 0.0)) throw ConfigError("env.dubins.speed must be > 0");
    if (max_steps < 1) throw ConfigError("env.dubins.max_steps must be >= 1");
    if (!(collision_buffer >= 0.0)) throw ConfigError("env.dubins.collision_buffer must be >= 0");
    if (!(start_margin > 0.0 && start_margin < room_size / 2.0))
      throw ConfigError("env.dubins.start_margin must be in (0, room_size/2)");
    if (!(start_y_max >= start_margin && start_y_max <= room_size / 2.0))
      throw ConfigError("env.dubins.start_y_max must be in [start_margin, room_size/2]");
    if (!(goal_inset > 0.0 && goal_inset < room_size / 2.0))
      throw ConfigError("env.dubins.goal_inset must be in (0, room_size/2)");
  }
};

struct WallSegment {
  double x1, y1, x2, y2;
};

// The four walls, with the top wall split around the exit gap.
inline std::vector<WallSegment> room_walls(const DubinsRoomConfig& room) {
  const double s = room.room_size;
  const double lo = s / 2.0 - room.exit_width / 2.0;
  const double hi = s / 2.0 + room.exit_width / 2.0;
  return {
      {0.0, 0.0, s, 0.0},   // south
      {0.0, 0.0, 0.0, s},   // west
      {s, 0.0, s, s},       // east
      {0.0, s, lo, s},      // north, left of the gap
      {hi, s, s, s},        // north, right of the gap
  };
}

// Explicit-Euler unicycle step; the command is clamped to +/- omega_max
// before integrating and the heading is renormalized.
inline Pose kinematics_step(const Pose& pose, double u, double speed, double dt,
                            double omega_max) {
  u = std::max(-omega_max, std::min(omega_max, u));
  Pose next;
  next.x = pose.x + speed * std::cos(pose.theta) * dt;
  next.y = pose.y + speed * std::sin(pose.theta) * dt;
  next.theta = wrap_angle(pose.theta + u * dt);
  return next;
}

namespace geom {

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// First intersection parameter t >= 0 of ray (ox,oy)+t*(dx,dy) with the
// segment, or infinity when they do not meet.
inline double ray_segment_t(double ox, double oy, double dx, double dy,
                            const WallSegment& seg) {
  const double ex = seg.x2 - seg.x1;
  const double ey = seg.y2 - seg.y1;
  const double denom = cross2(dx, dy, ex, ey);
  if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::infinity();
  const double rx = seg.x1 - ox;
  const double ry = seg.y1 - oy;
  const double t = cross2(rx, ry, ex, ey) / denom;
  const double u = cross2(rx, ry, dx, dy) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  return t;
}

inline double point_segment_distance(double px, double py, const WallSegment& seg) {
  const double ex = seg.x2 - seg.x1;
  const double ey = seg.y2 - seg.y1;
  const double len_sq = ex * ex + ey * ey;
  double t = len_sq > 0.0 ? ((px - seg.x1) * ex + (py - seg.y1) * ey) / len_sq : 0.0;
  t = std::max(0.0, std::min(1.0, t));
  const double cx = seg.x1 + t * ex;
  const double cy = seg.y1 + t * ey;
  return std::hypot(px - cx, py - cy);
}

inline bool segments_intersect(double ax, double ay, double bx, double by,
                               const WallSegment& seg) {
  const double d1 = cross2(bx - ax, by - ay, seg.x1 - ax, seg.y1 - ay);
  const double d2 = cross2(bx - ax, by - ay, seg.x2 - ax, seg.y2 - ay);
  const double d3 = cross2(seg.x2 - seg.x1, seg.y2 - seg.y1, ax - seg.x1, ay - seg.y1);
  const double d4 = cross2(seg.x2 - seg.x1, seg.y2 - seg.y1, bx - seg.x1, by - seg.y1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Minimum distance between the motion segment a->b and a wall segment.
inline double segment_segment_distance(double ax, double ay, double bx, double by,
                                       const WallSegment& seg) {
  if (segments_intersect(ax, ay, bx, by, seg)) return 0.0;
  const WallSegment motion{ax, ay, bx, by};
  double best = point_segment_distance(ax, ay, seg);
  best = std::min(best, point_segment_distance(bx, by, seg));
  best = std::min(best, point_segment_distance(seg.x1, seg.y1, motion));
  best = std::min(best, point_segment_distance(seg.x2, seg.y2, motion));
  return best;
}

}  // namespace geom

// Exact distance to the nearest wall along ray `ray_index` (direction
// theta + 2*pi*index/rays), capped at the lidar max range. Rays through the
// exit gap that meet no wall within range return the cap.
inline double raycast(const Pose& pose, int ray_index, const DubinsRoomConfig& room) {
  if (ray_index < 0 || ray_index >= room.lidar_rays)
    throw GeometryError("raycast: ray index out of range");
  if (pose.x < 0.0 || pose.x > room.room_size || pose.y < 0.0 || pose.y > room.room_size)
    throw GeometryError("raycast: pose outside the room");
  const double angle =
      pose.theta + 2.0 * std::numbers::pi * ray_index / static_cast<double>(room.lidar_rays);
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  double best = std::numeric_limits<double>::infinity();
  for (const WallSegment& seg : room_walls(room))
    best = std::min(best, geom::ray_segment_t(pose.x, pose.y, dx, dy, seg));
  return std::min(best, room.lidar_max_range);
}

// Range corruption before clamping: x~ = z1 + (1 + z2) * x with
// z_i ~ N(0, sigma_i) drawn independently per call.
inline double corrupt_raw(double x, double sigma1, double sigma2, Rng& rng) {
  const double z1 = sigma1 > 0.0 ? rng.normal(0.0, sigma1) : 0.0;
  const double z2 = sigma2 > 0.0 ? rng.normal(0.0, sigma2) : 0.0;
  return z1 + (1.0 + z2) * x;
}

// Corrupted measurement clamped to [0, max_range].
inline double corrupt(double x, double sigma1, double sigma2, double max_range, Rng& rng) {
  const double noisy = corrupt_raw(x, sigma1, sigma2, rng);
  return std::max(std::min(noisy, max_range), 0.0);
}

// Dubins car navigating out of the room. Observations are the corrupted
// lidar ranges; the 1-D action is the angular velocity command. Reward is
// +1 for exiting through the gap, -1 for wall contact, 0 otherwise.
class DubinsCarEnv : public Environment {
 public:
  explicit DubinsCarEnv(DubinsRoomConfig room) : room_(room), walls_(room_walls(room)), rng_(0) {
    room_.validate();
  }

  const DubinsRoomConfig& room() const { return room_; }
  Pose pose() const { return pose_; }

  int observation_dim() const override { return room_.lidar_rays; }
  int action_dim() const override { return 1; }
  int max_steps() const override { return room_.max_steps; }

  Observation reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    const double m = room_.start_margin;
    pose_.x = rng_.uniform(m, room_.room_size - m);
    pose_.y = rng_.uniform(m, room_.start_y_max);
    pose_.theta = rng_.uniform(-std::numbers::pi, 0.0);  // facing away from the exit
    steps_ = 0;
    outcome_ = Outcome::Running;
    started_ = true;
    return scan(pose_);
  }

  // Start an episode from a given pose (scripted rollouts, replays).
  Observation reset_to(const Pose& pose, std::uint64_t noise_seed) {
    if (!inside(pose)) throw GeometryError("reset_to: pose outside the room");
    rng_ = Rng(noise_seed);
    pose_ = pose;
    steps_ = 0;
    outcome_ = Outcome::Running;
    started_ = true;
    return scan(pose_);
  }

  StepResult step(const Action& action) override {
    if (!started_) throw ProtocolError("dubins env: step before reset");
    if (outcome_ != Outcome::Running) throw ProtocolError("dubins env: step after done");
    if (action.values.size() != 1) throw ShapeError("dubins env: action must be 1-D");

    const Pose old_pose = pose_;
    pose_ = kinematics_step(old_pose, action.values[0], room_.speed, room_.dt, room_.omega_max);
    ++steps_;

    StepResult res;
    double clearance = std::numeric_limits<double>::infinity();
    for (const WallSegment& seg : walls_)
      clearance = std::min(clearance, geom::segment_segment_distance(
                                          old_pose.x, old_pose.y, pose_.x, pose_.y, seg));
    if (clearance < room_.collision_buffer) {
      outcome_ = Outcome::Collided;
      res.reward = -1.0;
    } else if (pose_.y >= room_.room_size) {
      // past the top wall plane without wall contact: through the gap
      outcome_ = Outcome::Exited;
      res.reward = 1.0;
    } else if (steps_ >= room_.max_steps) {
      outcome_ = Outcome::TimedOut;
    }
    res.outcome = outcome_;
    res.done = outcome_ != Outcome::Running;
    res.observation = scan(inside(pose_) ? pose_ : old_pose);
    return res;
  }

  bool done() const override { return outcome_ != Outcome::Running; }
  Outcome outcome() const override { return outcome_; }
  int steps_taken() const override { return steps_; }
  std::array<double, 3> pose_xyt() const override { return {pose_.x, pose_.y, pose_.theta}; }

 private:
  bool inside(const Pose& p) const {
    return p.x >= 0.0 && p.x <= room_.room_size && p.y >= 0.0 && p.y <= room_.room_size;
  }

  Observation scan(const Pose& at) {
    Observation obs;
    obs.values.resize(room_.lidar_rays);
    for (int k = 0; k < room_.lidar_rays; ++k) {
      const double exact = raycast(at, k, room_);
      obs.values[k] = corrupt(exact, room_.sigma1, room_.sigma2, room_.lidar_max_range, rng_);
    }
    return obs;
  }

  DubinsRoomConfig room_;
  std::vector<WallSegment> walls_;
  Rng rng_;
  Pose pose_;
  int steps_ = 0;
  Outcome outcome_ = Outcome::Running;
  bool started_ = false;
};

// Finite-state Dubins-path follower with privileged access to the car pose.
// Two tracking modes:
//   ReplanEachStep (default): replans the shortest path from the current
//     pose every step, so the expert stays meaningful on states the novice
//     steered into; once the straight run out of the exit is lined up it
//     latches and drives straight.
//   OpenLoop: plans once per episode and tracks progress by arc length
//     (speed * dt per step), emitting 0 past the path end.
class DubinsExpert : public ExpertPolicy {
 public:
  enum class Mode { ReplanEachStep, OpenLoop };

  explicit DubinsExpert(const DubinsCarEnv& env, Mode mode = Mode::ReplanEachStep)
      : env_(&env), mode_(mode) {}

  Mode mode() const { return mode_; }

  void begin_episode() override {
    latched_ = false;
    have_path_ = false;
    if (mode_ == Mode::OpenLoop) {
      try {
        path_ = plan_dubins(env_->pose(), env_->room().goal_pose(), env_->room().turn_radius());
        have_path_ = true;
      } catch (const PlanningError&) {
        have_path_ = false;  // degenerate start; drive straight
      }
    }
  }

  Action act() override {
    const DubinsRoomConfig& room = env_->room();
    if (mode_ == Mode::OpenLoop) {
      if (!have_path_) return Action{{0.0}};
      const double s = env_->steps_taken() * room.speed * room.dt;
      if (s >= path_.length()) return Action{{0.0}};  // straight out the exit
      return Action{{segment_rate(path_.segment_at(s).kind)}};
    }

    const Pose pose = env_->pose();
    const Pose goal = room.goal_pose();
    if (!latched_ && pose.y >= goal.y - 2.0 && std::sin(pose.theta) > 0.1) {
      // Straight-line exit crossing, exact under zero-turn integration.
      const double x_cross =
          pose.x + (room.room_size - pose.y) * std::cos(pose.theta) / std::sin(pose.theta);
      if (std::abs(x_cross - room.room_size / 2.0) <= room.exit_width / 2.0 - 2.0)
        latched_ = true;
    }
    if (latched_) return Action{{0.0}};

    try {
      const DubinsPath path = plan_dubins(pose, goal, room.turn_radius());
      for (const DubinsSegment& seg : path.segments)
        if (seg.length > 1e-9) return Action{{segment_rate(seg.kind)}};
      return Action{{0.0}};
    } catch (const PlanningError&) {
      return Action{{0.0}};
    }
  }

 private:
  double segment_rate(SegKind kind) const {
    const DubinsRoomConfig& room = env_->room();
    const double rate = room.speed / room.turn_radius();  // == omega_max
    switch (kind) {
      case SegKind::Left: return rate;
      case SegKind::Right: return -rate;
      case SegKind::Straight: return 0.0;
    }
    return 0.0;
  }

  const DubinsCarEnv* env_;
  Mode mode_;
  DubinsPath path_;
  bool have_path_ = false;
  bool latched_ = false;
};

}  // namespace daglab

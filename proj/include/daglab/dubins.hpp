#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "daglab/errors.hpp"

namespace daglab {

// Planar pose; theta normalized to (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

// Angle reduced to [0, 2*pi).
inline double mod_2pi(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double m = std::fmod(a, two_pi);
  if (m < 0.0) m += two_pi;
  return m;
}

enum class SegKind { Left, Straight, Right };

struct DubinsSegment {
  SegKind kind = SegKind::Straight;
  double length = 0.0;  // arc length in meters
};

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

inline const char* word_name(DubinsWord w) {
  switch (w) {
    case DubinsWord::LSL: return "LSL";
    case DubinsWord::RSR: return "RSR";
    case DubinsWord::LSR: return "LSR";
    case DubinsWord::RSL: return "RSL";
    case DubinsWord::RLR: return "RLR";
    case DubinsWord::LRL: return "LRL";
  }
  return "?";
}

// Advance a pose along one unit-speed primitive for arc length s.
inline Pose advance(const Pose& p, SegKind kind, double s, double radius) {
  Pose q = p;
  switch (kind) {
    case SegKind::Straight:
      q.x += s * std::cos(p.theta);
      q.y += s * std::sin(p.theta);
      break;
    case SegKind::Left: {
      const double phi = s / radius;
      q.x += radius * (std::sin(p.theta + phi) - std::sin(p.theta));
      q.y -= radius * (std::cos(p.theta + phi) - std::cos(p.theta));
      q.theta = wrap_angle(p.theta + phi);
      break;
    }
    case SegKind::Right: {
      const double phi = s / radius;
      q.x -= radius * (std::sin(p.theta - phi) - std::sin(p.theta));
      q.y += radius * (std::cos(p.theta - phi) - std::cos(p.theta));
      q.theta = wrap_angle(p.theta - phi);
      break;
    }
  }
  return q;
}

// Arc-arc-straight-arc path anchored at its start pose.
struct DubinsPath {
  Pose start;
  double radius = 1.0;
  DubinsWord word = DubinsWord::LSL;
  std::array<DubinsSegment, 3> segments;

  double length() const {
    return segments[0].length + segments[1].length + segments[2].length;
  }

  // Active segment at arc length s (clamped to the path).
  const DubinsSegment& segment_at(double s) const {
    if (s <= segments[0].length) return segments[0];
    if (s <= segments[0].length + segments[1].length) return segments[1];
    return segments[2];
  }

  // Exact pose at arc length s, clamped to [0, length()].
  Pose sample(double s) const {
    s = std::max(0.0, std::min(s, length()));
    Pose p = start;
    for (const DubinsSegment& seg : segments) {
      const double take = std::min(s, seg.length);
      p = advance(p, seg.kind, take, radius);
      s -= take;
      if (s <= 0.0) break;
    }
    return p;
  }

  Pose endpoint() const { return sample(length()); }
};

struct WordCandidate {
  DubinsWord word = DubinsWord::LSL;
  bool feasible = false;
  double length = std::numeric_limits<double>::infinity();  // meters
  std::array<DubinsSegment, 3> segments;
};

namespace detail {

struct NormalizedProblem {
  double d, alpha, beta;
  double sa, sb, ca, cb, c_ab;
};

// t, p, q are the normalized segment lengths (arc angles and straight/R).
inline bool word_lsl(const NormalizedProblem& n, double& t, double& p, double& q) {
  const double p_sq = 2.0 + n.d * n.d - 2.0 * n.c_ab + 2.0 * n.d * (n.sa - n.sb);
  if (p_sq < 0.0) return false;
  const double tmp = std::atan2(n.cb - n.ca, n.d + n.sa - n.sb);
  t = mod_2pi(-n.alpha + tmp);
  p = std::sqrt(p_sq);
  q = mod_2pi(n.beta - tmp);
  return true;
}

inline bool word_rsr(const NormalizedProblem& n, double& t, double& p, double& q) {
  const double p_sq = 2.0 + n.d * n.d - 2.0 * n.c_ab + 2.0 * n.d * (n.sb - n.sa);
  if (p_sq < 0.0) return false;
  const double tmp = std::atan2(n.ca - n.cb, n.d - n.sa + n.sb);
  t = mod_2pi(n.alpha - tmp);
  p = std::sqrt(p_sq);
  q = mod_2pi(-n.beta + tmp);
  return true;
}

inline bool word_lsr(const NormalizedProblem& n, double& t, double& p, double& q) {
  const double p_sq = -2.0 + n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sa + n.sb);
  if (p_sq < 0.0) return false;
  p = std::sqrt(p_sq);
  const double tmp = std::atan2(-n.ca - n.cb, n.d + n.sa + n.sb) - std::atan2(-2.0, p);
  t = mod_2pi(-n.alpha + tmp);
  q = mod_2pi(-mod_2pi(n.beta) + tmp);
  return true;
}

inline bool word_rsl(const NormalizedProblem& n, double& t, double& p, double& q) {
  const double p_sq = n.d * n.d - 2.0 + 2.0 * n.c_ab - 2.0 * n.d * (n.sa + n.sb);
  if (p_sq < 0.0) return false;
  p = std::sqrt(p_sq);
  const double tmp = std::atan2(n.ca + n.cb, n.d - n.sa - n.sb) - std::atan2(2.0, p);
  t = mod_2pi(n.alpha - tmp);
  q = mod_2pi(n.beta - tmp);
  return true;
}

inline bool word_rlr(const NormalizedProblem& n, double& t, double& p, double& q) {
  const double tmp = (6.0 - n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sa - n.sb)) / 8.0;
  if (std::abs(tmp) > 1.0) return false;
  p = mod_2pi(2.0 * std::numbers::pi - std::acos(tmp));
  t = mod_2pi(n.alpha - std::atan2(n.ca - n.cb, n.d - n.sa + n.sb) + mod_2pi(p / 2.0));
  q = mod_2pi(n.alpha - n.beta - t + mod_2pi(p));
  return true;
}

inline bool word_lrl(const NormalizedProblem& n, double& t, double& p, double& q) {
  const double tmp = (6.0 - n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (-n.sa + n.sb)) / 8.0;
  if (std::abs(tmp) > 1.0) return false;
  p = mod_2pi(2.0 * std::numbers::pi - std::acos(tmp));
  t = mod_2pi(-n.alpha - std::atan2(n.ca - n.cb, n.d + n.sa - n.sb) + p / 2.0);
  q = mod_2pi(mod_2pi(n.beta) - n.alpha - t + mod_2pi(p));
  return true;
}

inline std::array<SegKind, 3> word_kinds(DubinsWord w) {
  switch (w) {
    case DubinsWord::LSL: return {SegKind::Left, SegKind::Straight, SegKind::Left};
    case DubinsWord::RSR: return {SegKind::Right, SegKind::Straight, SegKind::Right};
    case DubinsWord::LSR: return {SegKind::Left, SegKind::Straight, SegKind::Right};
    case DubinsWord::RSL: return {SegKind::Right, SegKind::Straight, SegKind::Left};
    case DubinsWord::RLR: return {SegKind::Right, SegKind::Left, SegKind::Right};
    case DubinsWord::LRL: return {SegKind::Left, SegKind::Right, SegKind::Left};
  }
  return {};
}

}  // namespace detail

// Evaluate all six Dubins words for the pose pair. Infeasible words are
// returned with feasible = false.
inline std::array<WordCandidate, 6> plan_dubins_words(const Pose& start, const Pose& goal,
                                                      double radius) {
  if (!(radius > 0.0)) throw PlanningError("plan_dubins: radius must be > 0");
  const double dx = goal.x - start.x;
  const double dy = goal.y - start.y;
  const double big_d = std::hypot(dx, dy);
  const double phi = std::atan2(dy, dx);

  detail::NormalizedProblem n;
  n.d = big_d / radius;
  n.alpha = mod_2pi(start.theta - phi);
  n.beta = mod_2pi(goal.theta - phi);
  n.sa = std::sin(n.alpha);
  n.sb = std::sin(n.beta);
  n.ca = std::cos(n.alpha);
  n.cb = std::cos(n.beta);
  n.c_ab = std::cos(n.alpha - n.beta);

  using Solver = bool (*)(const detail::NormalizedProblem&, double&, double&, double&);
  constexpr std::array<DubinsWord, 6> words = {DubinsWord::LSL, DubinsWord::RSR,
                                               DubinsWord::LSR, DubinsWord::RSL,
                                               DubinsWord::RLR, DubinsWord::LRL};
  const std::array<Solver, 6> solvers = {detail::word_lsl, detail::word_rsr,
                                         detail::word_lsr, detail::word_rsl,
                                         detail::word_rlr, detail::word_lrl};

  std::array<WordCandidate, 6> out;
  for (int i = 0; i < 6; ++i) {
    WordCandidate& cand = out[i];
    cand.word = words[i];
    double t = 0.0, p = 0.0, q = 0.0;
    if (!solvers[i](n, t, p, q)) continue;
    cand.feasible = true;
    cand.length = (t + p + q) * radius;
    const auto kinds = detail::word_kinds(words[i]);
    cand.segments = {DubinsSegment{kinds[0], t * radius},
                     DubinsSegment{kinds[1], p * radius},
                     DubinsSegment{kinds[2], q * radius}};
  }
  return out;
}

// Shortest feasible word. Coincident poses yield the zero-length path;
// PlanningError is raised when no word is feasible.
inline DubinsPath plan_dubins(const Pose& start, const Pose& goal, double radius) {
  if (!(radius > 0.0)) throw PlanningError("plan_dubins: radius must be > 0");
  if (std::hypot(goal.x - start.x, goal.y - start.y) < 1e-12 &&
      std::abs(wrap_angle(goal.theta - start.theta)) < 1e-12) {
    DubinsPath path;
    path.start = start;
    path.radius = radius;
    path.segments = {DubinsSegment{SegKind::Left, 0.0}, DubinsSegment{SegKind::Straight, 0.0},
                     DubinsSegment{SegKind::Left, 0.0}};
    return path;
  }
  const auto candidates = plan_dubins_words(start, goal, radius);
  const WordCandidate* best = nullptr;
  for (const WordCandidate& cand : candidates)
    if (cand.feasible && (!best || cand.length < best->length)) best = &cand;
  if (!best) throw PlanningError("plan_dubins: no feasible word for pose pair");
  DubinsPath path;
  path.start = start;
  path.radius = radius;
  path.word = best->word;
  path.segments = best->segments;
  return path;
}

}  // namespace daglab

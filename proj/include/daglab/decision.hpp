#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "daglab/policy.hpp"

namespace daglab {

enum class Actor { Expert, Novice };

inline const char* actor_name(Actor a) { return a == Actor::Expert ? "expert" : "novice"; }

// beta_i = lambda^i * beta0, the expert-action probability schedule.
struct VanillaSchedule {
  double beta0 = 1.0;
  double lambda = 0.63;
  int epoch = 0;
};

inline double beta_at(const VanillaSchedule& s) {
  return std::pow(s.lambda, static_cast<double>(s.epoch)) * s.beta0;
}

struct DropoutRuleParams {
  double tau = 0.3;    // ball radius around the expert action
  double p = 0.6;      // required fraction of samples inside the ball
  int n_samples = 20;  // N stochastic queries per decision
  Norm norm = Norm::Euclidean;
};

// Outcome of one handoff decision. Diagnostics not produced by a rule are
// left as NaN.
struct Decision {
  Action action;
  Actor actor = Actor::Expert;
  double p_hat = std::numeric_limits<double>::quiet_NaN();
  double distance = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
};

// Expert acts with probability beta_i; one uniform draw is consumed per call.
inline Decision dr_vanilla(const Action& a_exp, const Action& a_nov,
                           const VanillaSchedule& schedule, Rng& rng) {
  if (a_exp.values.size() != a_nov.values.size())
    throw ShapeError("dr_vanilla: action dims differ");
  Decision d;
  d.beta = beta_at(schedule);
  const double z = rng.uniform01();
  if (z <= d.beta) {
    d.actor = Actor::Expert;
    d.action = a_exp;
  } else {
    d.actor = Actor::Novice;
    d.action = a_nov;
  }
  return d;
}

// Novice acts iff its action is within the closed tau-ball of the expert's.
inline Decision dr_safedagger_star(const Action& a_exp, const Action& a_nov, double tau,
                                   Norm norm = Norm::Euclidean) {
  Decision d;
  d.distance = action_distance(a_nov, a_exp, norm);
  if (d.distance <= tau) {
    d.actor = Actor::Novice;
    d.action = a_nov;
  } else {
    d.actor = Actor::Expert;
    d.action = a_exp;
  }
  return d;
}

// Novice acts iff at least fraction p of the N samples lie in the closed
// tau-ball around the expert action; the executed action is the sample mean.
inline Decision dr_dropout(const Action& a_exp, const ActionSampleSet& samples,
                           const DropoutRuleParams& params) {
  if (static_cast<int>(samples.samples.size()) != params.n_samples)
    throw ShapeError("dr_dropout: sample count != N (" +
                     std::to_string(samples.samples.size()) + " vs " +
                     std::to_string(params.n_samples) + ")");
  int inside = 0;
  for (const Action& s : samples.samples)
    if (action_distance(a_exp, s, params.norm) <= params.tau) ++inside;
  Decision d;
  d.p_hat = static_cast<double>(inside) / params.n_samples;
  d.distance = action_distance(samples.mean, a_exp, params.norm);
  if (d.p_hat >= params.p) {
    d.actor = Actor::Novice;
    d.action = samples.mean;
  } else {
    d.actor = Actor::Expert;
    d.action = a_exp;
  }
  return d;
}

inline Decision dr_behavior_cloning(const Action& a_exp) {
  Decision d;
  d.actor = Actor::Expert;
  d.action = a_exp;
  return d;
}

inline Decision dr_expert_labels_only(const Action& a_nov) {
  Decision d;
  d.actor = Actor::Novice;
  d.action = a_nov;
  return d;
}

enum class RuleKind {
  BehaviorCloning,
  ExpertLabelsOnly,
  Vanilla,
  SafeDaggerStar,
  DropoutDagger,
};

inline const char* rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::BehaviorCloning: return "behavior_cloning";
    case RuleKind::ExpertLabelsOnly: return "expert_labels_only";
    case RuleKind::Vanilla: return "vanilla";
    case RuleKind::SafeDaggerStar: return "safedagger_star";
    case RuleKind::DropoutDagger: return "dropout_dagger";
  }
  return "?";
}

// A rule plus all its knobs; unused fields are ignored by the other rules.
struct RuleSpec {
  RuleKind kind = RuleKind::DropoutDagger;
  double tau = 0.3;
  double p = 0.6;
  int n_samples = 20;
  double beta0 = 1.0;
  double lambda = 0.63;
  Norm norm = Norm::Euclidean;

  void validate(const std::string& where) const {
    if (tau < 0.0) throw ConfigError(where + ".tau must be >= 0");
    if (p < 0.0 || p > 1.0) throw ConfigError(where + ".p must be in [0,1]");
    if (n_samples < 1) throw ConfigError(where + ".n_samples must be >= 1");
    if (beta0 < 0.0 || beta0 > 1.0) throw ConfigError(where + ".beta0 must be in [0,1]");
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError(where + ".lambda must be in (0,1)");
  }
};

// Bound decision rule as used by the rollout engine: queries the novice the
// way its rule requires (MC samples for DropoutDagger, one deterministic
// pass otherwise) and arbitrates against the expert action.
class DecisionPolicy {
 public:
  explicit DecisionPolicy(RuleSpec spec) : spec_(spec) {}

  const RuleSpec& spec() const { return spec_; }

  Decision decide(const Action& a_exp, const NovicePolicy& novice, const Observation& obs,
                  int epoch, Rng& rng) const {
    switch (spec_.kind) {
      case RuleKind::BehaviorCloning:
        return dr_behavior_cloning(a_exp);
      case RuleKind::ExpertLabelsOnly:
        return dr_expert_labels_only(novice.act_deterministic(obs));
      case RuleKind::Vanilla:
        return dr_vanilla(a_exp, novice.act_deterministic(obs),
                          VanillaSchedule{spec_.beta0, spec_.lambda, epoch}, rng);
      case RuleKind::SafeDaggerStar:
        return dr_safedagger_star(a_exp, novice.act_deterministic(obs), spec_.tau, spec_.norm);
      case RuleKind::DropoutDagger: {
        const ActionSampleSet set = novice.sample(obs, spec_.n_samples, rng);
        return dr_dropout(a_exp, set, DropoutRuleParams{spec_.tau, spec_.p, spec_.n_samples,
                                                        spec_.norm});
      }
    }
    throw ConfigError("decide: unknown rule kind");
  }

 private:
  RuleSpec spec_;
};

}  // namespace daglab

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "daglab/dataset.hpp"
#include "daglab/decision.hpp"
#include "daglab/env.hpp"

namespace daglab {

struct DaggerConfig {
  int epochs = 10;
  int episodes_per_epoch = 5;
  int horizon = 0;  // 0: use the environment's max_steps
  int eval_episodes = 50;
  int bootstrap_episodes = 1;  // expert-only episodes seeding the dataset
  bool warm_start = true;      // keep parameters across epochs (ADAM always resets)

  void validate() const {
    if (epochs < 1) throw ConfigError("dagger.epochs must be >= 1");
    if (episodes_per_epoch < 1) throw ConfigError("dagger.episodes_per_epoch must be >= 1");
    if (horizon < 0) throw ConfigError("dagger.horizon must be >= 0");
    if (eval_episodes < 1) throw ConfigError("dagger.eval_episodes must be >= 1");
    if (bootstrap_episodes < 1) throw ConfigError("dagger.bootstrap_episodes must be >= 1");
  }
};

struct EpochMetrics {
  int epoch = 0;
  double safety_mean = 0.0;   // combined expert-novice system return
  double safety_std = 0.0;
  double learning_mean = 0.0;  // novice-alone return
  double learning_std = 0.0;
  double expert_action_fraction = 0.0;
};

// Per-timestep handoff diagnostics from the collection rollouts.
struct DecisionRecord {
  int epoch = 0;
  int episode = 0;
  int t = 0;
  Actor actor = Actor::Expert;
  double p_hat = 0.0;
  double distance = 0.0;
  double beta = 0.0;
  double reward = 0.0;
};

struct TrajectoryRow {
  int t = 0;
  double x = 0.0, y = 0.0, theta = 0.0;
  double u = 0.0;
  Actor actor = Actor::Expert;
  double reward = 0.0;
};

struct RolloutResult {
  Dataset pairs;
  double total_return = 0.0;
  Outcome outcome = Outcome::Running;
  std::vector<Actor> actors;
  std::vector<Decision> decisions;
  std::vector<TrajectoryRow> trajectory;
};

namespace detail {
// Stream tags for the documented seed-splitting scheme (see rng.hpp):
// every random stream in a run is derive_seed(run_seed, tag, epoch, index).
enum SeedTag : std::uint64_t {
  kSeedNetInit = 1,
  kSeedBootstrap = 2,
  kSeedCollectEnv = 3,
  kSeedCollectPolicy = 4,
  kSeedTrain = 5,
  kSeedEvalSafetyEnv = 6,
  kSeedEvalSafetyPolicy = 7,
  kSeedEvalLearning = 8,
};

inline int effective_horizon(const Environment& env, int horizon) {
  return horizon > 0 ? horizon : env.max_steps();
}
}  // namespace detail

// Expert-only episode; every visited observation is labeled and the expert's
// action is executed.
inline RolloutResult rollout_expert(Environment& env, ExpertPolicy& expert,
                                    std::uint64_t episode_seed, int horizon = 0) {
  RolloutResult out;
  Observation obs = env.reset(episode_seed);
  expert.begin_episode();
  const int max_t = detail::effective_horizon(env, horizon);
  for (int t = 0; t < max_t && !env.done(); ++t) {
    const Action a_exp = expert.act();
    out.pairs.append({obs, a_exp});
    const auto pose = env.pose_xyt();
    const StepResult res = env.step(a_exp);
    out.total_return += res.reward;
    out.actors.push_back(Actor::Expert);
    out.trajectory.push_back({t, pose[0], pose[1], pose[2], a_exp.values[0],
                              Actor::Expert, res.reward});
    obs = res.observation;
    out.outcome = res.outcome;
  }
  return out;
}

// One combined expert-novice episode under a decision rule. Both policies
// are queried at every timestep; the pair (observation, expert action) is
// recorded regardless of who acts.
inline RolloutResult rollout_combined(Environment& env, ExpertPolicy& expert,
                                      const NovicePolicy& novice, const DecisionPolicy& rule,
                                      int epoch, std::uint64_t env_seed,
                                      std::uint64_t policy_seed, int horizon = 0) {
  RolloutResult out;
  Observation obs = env.reset(env_seed);
  expert.begin_episode();
  Rng policy_rng(policy_seed);
  const int max_t = detail::effective_horizon(env, horizon);
  for (int t = 0; t < max_t && !env.done(); ++t) {
    const Action a_exp = expert.act();
    const Decision decision = rule.decide(a_exp, novice, obs, epoch, policy_rng);
    out.pairs.append({obs, a_exp});
    const auto pose = env.pose_xyt();
    const StepResult res = env.step(decision.action);
    out.total_return += res.reward;
    out.actors.push_back(decision.actor);
    out.decisions.push_back(decision);
    out.trajectory.push_back({t, pose[0], pose[1], pose[2], decision.action.values[0],
                              decision.actor, res.reward});
    obs = res.observation;
    out.outcome = res.outcome;
  }
  return out;
}

// Novice-alone episode with the deterministic (dropout-off) policy.
inline RolloutResult rollout_novice(Environment& env, const NovicePolicy& novice,
                                    std::uint64_t episode_seed, int horizon = 0) {
  RolloutResult out;
  Observation obs = env.reset(episode_seed);
  const int max_t = detail::effective_horizon(env, horizon);
  for (int t = 0; t < max_t && !env.done(); ++t) {
    const Action a = novice.act_deterministic(obs);
    const auto pose = env.pose_xyt();
    const StepResult res = env.step(a);
    out.total_return += res.reward;
    out.actors.push_back(Actor::Novice);
    out.trajectory.push_back({t, pose[0], pose[1], pose[2], a.values[0], Actor::Novice,
                              res.reward});
    obs = res.observation;
    out.outcome = res.outcome;
  }
  return out;
}

namespace detail {
inline void mean_std(const std::vector<double>& xs, double& mean, double& std_dev) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) {
    std_dev = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}
}  // namespace detail

// Safety = combined-system return over eval_episodes fresh episodes;
// learning = novice-alone return over eval_episodes more. Evaluation never
// touches the training dataset.
inline EpochMetrics evaluate(Environment& env, ExpertPolicy& expert, const NovicePolicy& novice,
                             const DecisionPolicy& rule, int epoch, int eval_episodes,
                             std::uint64_t run_seed, int horizon = 0) {
  EpochMetrics m;
  m.epoch = epoch;
  std::vector<double> safety, learning;
  long expert_steps = 0, total_steps = 0;
  for (int j = 0; j < eval_episodes; ++j) {
    const RolloutResult res = rollout_combined(
        env, expert, novice, rule, epoch,
        derive_seed(run_seed, detail::kSeedEvalSafetyEnv, epoch, j),
        derive_seed(run_seed, detail::kSeedEvalSafetyPolicy, epoch, j), horizon);
    safety.push_back(res.total_return);
    total_steps += static_cast<long>(res.actors.size());
    for (Actor a : res.actors)
      if (a == Actor::Expert) ++expert_steps;
  }
  for (int j = 0; j < eval_episodes; ++j) {
    const RolloutResult res = rollout_novice(
        env, novice, derive_seed(run_seed, detail::kSeedEvalLearning, epoch, j), horizon);
    learning.push_back(res.total_return);
  }
  detail::mean_std(safety, m.safety_mean, m.safety_std);
  detail::mean_std(learning, m.learning_mean, m.learning_std);
  m.expert_action_fraction =
      total_steps > 0 ? static_cast<double>(expert_steps) / total_steps : 0.0;
  return m;
}

inline TrainReport train_on_dataset(Mlp& net, const Dataset& data, Rng& rng) {
  const std::vector<SampleView> views = data.views();
  return train(net, views, rng);
}

struct DaggerResult {
  std::vector<EpochMetrics> metrics;
  std::vector<DecisionRecord> decision_log;
  std::vector<std::vector<TrajectoryRow>> collection_trajectories;
  Dataset dataset;                        // the aggregated D after the run
  std::vector<size_t> dataset_sizes;      // |D| after each epoch's aggregation
  bool completed = false;
  std::string error;  // set when training diverged and the run is partial
};

// The full aggregation loop: bootstrap the dataset from expert-only
// episodes, train the initial novice, then per epoch collect combined
// rollouts, aggregate, retrain, and evaluate. Fully deterministic given
// run_seed. Training divergence ends the run early with partial metrics.
inline DaggerResult run_dagger(Environment& env, ExpertPolicy& expert, Mlp& net,
                               const DecisionPolicy& rule, const DaggerConfig& cfg,
                               std::uint64_t run_seed, bool keep_trajectories = false) {
  cfg.validate();
  DaggerResult out;
  MlpNovice novice(net);
  Dataset& dataset = out.dataset;

  auto retrain = [&](int epoch_index) {
    if (!cfg.warm_start && epoch_index > 0) {
      Rng init_rng(derive_seed(run_seed, detail::kSeedNetInit, epoch_index));
      net.reinit(init_rng);
    } else {
      net.reset_adam();
    }
    Rng train_rng(derive_seed(run_seed, detail::kSeedTrain, epoch_index));
    train_on_dataset(net, dataset, train_rng);
  };

  try {
    for (int e = 0; e < cfg.bootstrap_episodes; ++e) {
      RolloutResult res =
          rollout_expert(env, expert, derive_seed(run_seed, detail::kSeedBootstrap, e),
                         cfg.horizon);
      dataset.append_all(res.pairs);
    }
    retrain(0);

    for (int i = 0; i < cfg.epochs; ++i) {
      for (int e = 0; e < cfg.episodes_per_epoch; ++e) {
        RolloutResult res = rollout_combined(
            env, expert, novice, rule, i,
            derive_seed(run_seed, detail::kSeedCollectEnv, i, e),
            derive_seed(run_seed, detail::kSeedCollectPolicy, i, e), cfg.horizon);
        dataset.append_all(res.pairs);
        for (size_t t = 0; t < res.decisions.size(); ++t) {
          const Decision& d = res.decisions[t];
          out.decision_log.push_back({i, e, static_cast<int>(t), d.actor, d.p_hat,
                                      d.distance, d.beta, res.trajectory[t].reward});
        }
        if (keep_trajectories) out.collection_trajectories.push_back(std::move(res.trajectory));
      }
      out.dataset_sizes.push_back(dataset.size());
      retrain(i + 1);
      out.metrics.push_back(
          evaluate(env, expert, novice, rule, i, cfg.eval_episodes, run_seed, cfg.horizon));
    }
    out.completed = true;
  } catch (const DivergenceError& err) {
    out.error = err.what();
  }
  return out;
}

}  // namespace daglab

#include <doctest.h>

#include <cmath>

#include "daglab/dagger.hpp"
#include "daglab/pointmass.hpp"

using namespace daglab;

namespace {

// Novice that always proposes a fixed command.
class ScriptedNovice : public NovicePolicy {
 public:
  explicit ScriptedNovice(double value) : value_(value) {}
  Action act_deterministic(const Observation&) const override { return Action{{value_}}; }
  ActionSampleSet sample(const Observation&, int n, Rng&) const override {
    ActionSampleSet set;
    for (int i = 0; i < n; ++i) set.samples.push_back(Action{{value_}});
    set.mean = sample_mean(set.samples);
    return set;
  }

 private:
  double value_;
};

// Novice that reproduces the pointmass expert from the observation.
class MimicNovice : public NovicePolicy {
 public:
  explicit MimicNovice(double gain) : gain_(gain) {}
  Action act_deterministic(const Observation& obs) const override {
    return Action{{-gain_ * obs.values[0]}};
  }
  ActionSampleSet sample(const Observation& obs, int n, Rng&) const override {
    ActionSampleSet set;
    for (int i = 0; i < n; ++i) set.samples.push_back(act_deterministic(obs));
    set.mean = sample_mean(set.samples);
    return set;
  }

 private:
  double gain_;
};

NetConfig pointmass_net_config(double dropout = 0.1) {
  NetConfig cfg;
  cfg.layer_sizes = {1, 8, 1};
  cfg.dropout = dropout;
  cfg.learning_rate = 1e-2;
  cfg.train_epochs = 15;
  cfg.batch_size = 16;
  return cfg;
}

RuleSpec rule_of(RuleKind kind) {
  RuleSpec spec;
  spec.kind = kind;
  return spec;
}

}  // namespace

TEST_CASE("behavior cloning rollouts replay the expert exactly") {
  PointmassConfig cfg;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  ScriptedNovice novice(0.9);
  DecisionPolicy rule(rule_of(RuleKind::BehaviorCloning));

  const RolloutResult combined = rollout_combined(env, expert, novice, rule, 0, 42, 43);
  const RolloutResult expert_only = rollout_expert(env, expert, 42);
  CHECK(combined.total_return == expert_only.total_return);
  REQUIRE(combined.actors.size() == expert_only.actors.size());
  for (Actor a : combined.actors) CHECK(a == Actor::Expert);
  for (size_t i = 0; i < combined.trajectory.size(); ++i)
    CHECK(combined.trajectory[i].x == expert_only.trajectory[i].x);
}

TEST_CASE("expert-labels-only executes the novice but labels with the expert") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  cfg.fixed_x0 = 1.0;
  cfg.max_steps = 5;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  ScriptedNovice novice(0.25);
  DecisionPolicy rule(rule_of(RuleKind::ExpertLabelsOnly));

  const RolloutResult res = rollout_combined(env, expert, novice, rule, 0, 7, 8);
  REQUIRE(res.pairs.size() == 5);

  // hand trace: x advances by u*dt with u = 0.25; labels are -gain * x_t
  double x = 1.0;
  for (size_t t = 0; t < res.pairs.size(); ++t) {
    CHECK(res.actors[t] == Actor::Novice);
    CHECK(res.pairs[t].obs.values[0] == x);
    CHECK(res.pairs[t].label.values[0] == -cfg.gain * x);
    CHECK(res.trajectory[t].u == 0.25);
    x += 0.25 * cfg.dt;
  }
}

TEST_CASE("aggregate keeps order and appends") {
  Dataset d, d_i;
  for (int i = 0; i < 10; ++i) d.append({Observation{{double(i)}}, Action{{0.0}}});
  for (int i = 0; i < 7; ++i) d_i.append({Observation{{100.0 + i}}, Action{{1.0}}});

  CHECK(aggregate(Dataset{}, d_i).size() == 7);
  CHECK(aggregate(d, Dataset{}).size() == 10);
  const Dataset merged = aggregate(d, d_i);
  REQUIRE(merged.size() == 17);
  for (int i = 0; i < 10; ++i) CHECK(merged[i].obs.values[0] == double(i));
  for (int i = 0; i < 7; ++i) CHECK(merged[10 + i].obs.values[0] == 100.0 + i);

  Dataset bad;
  bad.append({Observation{{1.0, 2.0}}, Action{{0.0}}});
  CHECK_THROWS_AS((void)aggregate(d, bad), ShapeError);
}

TEST_CASE("dataset text dump round-trips") {
  Dataset d;
  Rng rng(5);
  for (int i = 0; i < 20; ++i)
    d.append({Observation{{rng.normal() * 1e3, rng.normal()}}, Action{{rng.normal() / 7.0}}});
  std::stringstream ss;
  save_dataset(d, ss);
  const Dataset restored = load_dataset(ss);
  REQUIRE(restored.size() == d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    CHECK(restored[i].obs.values == d[i].obs.values);
    CHECK(restored[i].label.values == d[i].label.values);
  }
}

TEST_CASE("deterministic environment and behavior cloning give zero safety spread") {
  PointmassConfig cfg;
  cfg.fixed_start = true;  // reset ignores the seed
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  ScriptedNovice novice(0.0);
  DecisionPolicy rule(rule_of(RuleKind::BehaviorCloning));
  const EpochMetrics m = evaluate(env, expert, novice, rule, 0, 10, 99);
  CHECK(m.safety_std == 0.0);
  CHECK(m.expert_action_fraction == 1.0);
}

TEST_CASE("an expert-mimicking novice scores identical safety and learning") {
  PointmassConfig cfg;
  cfg.fixed_start = true;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  MimicNovice novice(cfg.gain);
  DecisionPolicy rule(rule_of(RuleKind::ExpertLabelsOnly));
  const EpochMetrics m = evaluate(env, expert, novice, rule, 0, 8, 3);
  CHECK(m.learning_mean == doctest::Approx(m.safety_mean).epsilon(1e-12));
  CHECK(m.expert_action_fraction == 0.0);
}

TEST_CASE("evaluate leaves a dataset untouched") {
  PointmassConfig cfg;
  PointmassEnv env(cfg);
  PointmassExpert expert(env);
  ScriptedNovice novice(0.1);
  DecisionPolicy rule(rule_of(RuleKind::DropoutDagger));
  Dataset d;
  for (int i = 0; i < 5; ++i) d.append({Observation{{double(i)}}, Action{{-double(i)}}});
  std::stringstream before;
  save_dataset(d, before);
  (void)evaluate(env, expert, novice, rule, 0, 4, 11);
  std::stringstream after;
  save_dataset(d, after);
  CHECK(before.str() == after.str());
}

TEST_CASE("a one-epoch pointmass run has the predicted dataset size") {
  PointmassConfig env_cfg;  // horizonless: every episode runs 50 steps
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  NetConfig net_cfg = pointmass_net_config(0.0);
  Rng init(1);
  Mlp net(net_cfg, init);
  DaggerConfig dc;
  dc.epochs = 1;
  dc.episodes_per_epoch = 5;
  dc.eval_episodes = 2;
  DecisionPolicy rule(rule_of(RuleKind::BehaviorCloning));
  const DaggerResult res = run_dagger(env, expert, net, rule, dc, 77);
  REQUIRE(res.completed);
  CHECK(res.metrics.size() == 1);
  CHECK(res.dataset.size() == 50 + 5 * 50);
}

TEST_CASE("behavior cloning pins safety at the expert's deterministic return") {
  PointmassConfig env_cfg;
  env_cfg.fixed_start = true;
  env_cfg.fixed_x0 = 0.8;
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  const double expert_return = rollout_expert(env, expert, 1).total_return;

  NetConfig net_cfg = pointmass_net_config(0.0);
  Rng init(8);
  Mlp net(net_cfg, init);
  DaggerConfig dc;
  dc.epochs = 3;
  dc.episodes_per_epoch = 1;
  dc.eval_episodes = 4;
  const DaggerResult res =
      run_dagger(env, expert, net, DecisionPolicy(rule_of(RuleKind::BehaviorCloning)), dc, 66);
  REQUIRE(res.completed);
  for (const EpochMetrics& m : res.metrics) {
    CHECK(m.safety_mean == expert_return);
    CHECK(m.safety_std == 0.0);
  }
}

TEST_CASE("an explicit horizon truncates rollouts and collection") {
  PointmassConfig env_cfg;  // environment cap is 50
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  const RolloutResult truncated = rollout_expert(env, expert, 9, 10);
  CHECK(truncated.pairs.size() == 10);
  CHECK(truncated.outcome == Outcome::Running);

  NetConfig net_cfg = pointmass_net_config(0.0);
  Rng init(9);
  Mlp net(net_cfg, init);
  DaggerConfig dc;
  dc.epochs = 1;
  dc.episodes_per_epoch = 2;
  dc.eval_episodes = 1;
  dc.horizon = 10;
  const DaggerResult res =
      run_dagger(env, expert, net, DecisionPolicy(rule_of(RuleKind::BehaviorCloning)), dc, 3);
  CHECK(res.dataset.size() == 10 + 2 * 10);
}

TEST_CASE("label purity and monotone dataset growth over a full run") {
  PointmassConfig env_cfg;
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  NetConfig net_cfg = pointmass_net_config(0.1);
  Rng init(2);
  Mlp net(net_cfg, init);
  DaggerConfig dc;
  dc.epochs = 3;
  dc.episodes_per_epoch = 2;
  dc.eval_episodes = 2;
  RuleSpec spec = rule_of(RuleKind::DropoutDagger);
  spec.tau = 0.3;
  spec.p = 0.6;
  spec.n_samples = 10;
  const DaggerResult res = run_dagger(env, expert, net, DecisionPolicy(spec), dc, 123);
  REQUIRE(res.completed);

  // label purity: the stored label is the expert's response to the stored state
  for (const LabeledPair& pair : res.dataset.pairs())
    CHECK(pair.label.values[0] == -env_cfg.gain * pair.obs.values[0]);

  // monotone growth
  size_t prev = 0;
  for (size_t s : res.dataset_sizes) {
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(res.dataset.size() == prev);
}

TEST_CASE("identical configuration and seed reproduce metrics bitwise") {
  auto run = [] {
    PointmassConfig env_cfg;
    PointmassEnv env(env_cfg);
    PointmassExpert expert(env);
    NetConfig net_cfg = pointmass_net_config(0.05);
    Rng init(3);
    Mlp net(net_cfg, init);
    DaggerConfig dc;
    dc.epochs = 2;
    dc.episodes_per_epoch = 2;
    dc.eval_episodes = 3;
    RuleSpec spec;
    spec.kind = RuleKind::DropoutDagger;
    spec.n_samples = 8;
    return run_dagger(env, expert, net, DecisionPolicy(spec), dc, 31337);
  };
  const DaggerResult a = run(), b = run();
  REQUIRE(a.metrics.size() == b.metrics.size());
  for (size_t i = 0; i < a.metrics.size(); ++i) {
    CHECK(a.metrics[i].safety_mean == b.metrics[i].safety_mean);
    CHECK(a.metrics[i].safety_std == b.metrics[i].safety_std);
    CHECK(a.metrics[i].learning_mean == b.metrics[i].learning_mean);
    CHECK(a.metrics[i].learning_std == b.metrics[i].learning_std);
    CHECK(a.metrics[i].expert_action_fraction == b.metrics[i].expert_action_fraction);
  }
}

TEST_CASE("expert fraction is 1 under behavior cloning and 0 under p = 0") {
  PointmassConfig env_cfg;
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  DaggerConfig dc;
  dc.epochs = 2;
  dc.episodes_per_epoch = 1;
  dc.eval_episodes = 2;

  {
    NetConfig net_cfg = pointmass_net_config(0.1);
    Rng init(4);
    Mlp net(net_cfg, init);
    const DaggerResult res =
        run_dagger(env, expert, net, DecisionPolicy(rule_of(RuleKind::BehaviorCloning)), dc, 5);
    for (const EpochMetrics& m : res.metrics) CHECK(m.expert_action_fraction == 1.0);
  }
  {
    NetConfig net_cfg = pointmass_net_config(0.1);
    Rng init(4);
    Mlp net(net_cfg, init);
    RuleSpec spec;
    spec.kind = RuleKind::DropoutDagger;
    spec.p = 0.0;  // the expert merely labels
    spec.n_samples = 5;
    const DaggerResult res = run_dagger(env, expert, net, DecisionPolicy(spec), dc, 5);
    for (const EpochMetrics& m : res.metrics) CHECK(m.expert_action_fraction == 0.0);
  }
}

TEST_CASE("vanilla runs log beta following the schedule") {
  PointmassConfig env_cfg;
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  NetConfig net_cfg = pointmass_net_config(0.0);
  Rng init(6);
  Mlp net(net_cfg, init);
  DaggerConfig dc;
  dc.epochs = 3;
  dc.episodes_per_epoch = 1;
  dc.eval_episodes = 1;
  RuleSpec spec;
  spec.kind = RuleKind::Vanilla;
  spec.beta0 = 1.0;
  spec.lambda = 0.63;
  const DaggerResult res = run_dagger(env, expert, net, DecisionPolicy(spec), dc, 17);
  REQUIRE(res.completed);
  CHECK(!res.decision_log.empty());
  for (const DecisionRecord& r : res.decision_log)
    CHECK(r.beta == doctest::Approx(std::pow(0.63, r.epoch)).epsilon(1e-12));
}

TEST_CASE("training divergence yields a partial result instead of a crash") {
  PointmassConfig env_cfg;
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  NetConfig net_cfg = pointmass_net_config(0.0);
  net_cfg.learning_rate = 1e5;  // forces the loss over the abort bound
  Rng init(7);
  Mlp net(net_cfg, init);
  DaggerConfig dc;
  dc.epochs = 2;
  dc.episodes_per_epoch = 1;
  dc.eval_episodes = 1;
  const DaggerResult res =
      run_dagger(env, expert, net, DecisionPolicy(rule_of(RuleKind::BehaviorCloning)), dc, 2);
  CHECK(!res.completed);
  CHECK(!res.error.empty());
  CHECK(res.metrics.size() < 2);
}

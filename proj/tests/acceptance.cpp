// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any criterion fails. The scaled Dubins experiment (criteria 8
// and 9) dominates the runtime; everything else finishes in seconds.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "daglab/experiment.hpp"

using namespace daglab;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", num, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- 1
void check_beta_schedule() {
  const double beta10 = beta_at({1.0, 0.63, 10});
  criterion(1, "beta schedule reaches ~0.01 by epoch 10",
            beta10 >= 0.0090 && beta10 <= 0.0105, fmt("beta_10 = %.6f", beta10));
}

// ---------------------------------------------------------------- 2
void check_reductions() {
  Rng rng(2001);
  int agree = 0, novice_under_p0 = 0, expert_under_tau0 = 0;
  const int trials = 1000;
  int total_agree_checks = 0;
  for (int trial = 0; trial < trials; ++trial) {
    NetConfig det_cfg;
    det_cfg.layer_sizes = {4, 8, 2};
    det_cfg.dropout = 0.0;
    Rng net_rng(10000 + trial);
    Mlp det_net(det_cfg, net_rng);

    const Observation obs{{rng.normal(), rng.normal(), rng.normal(), rng.normal()}};
    const Action a_exp{{rng.normal(), rng.normal()}};
    const double tau = std::abs(rng.normal()) * 0.5;

    // (a) d = 0: dropout rule matches safedagger* for every p
    Rng mc(trial);
    const ActionSampleSet set = novice_sample(det_net, obs, 20, mc);
    const Action det_action = novice_act_deterministic(det_net, obs);
    for (double p : {0.1, 0.5, 1.0}) {
      const Decision dd = dr_dropout(a_exp, set, {tau, p, 20, Norm::Euclidean});
      const Decision ds = dr_safedagger_star(a_exp, det_action, tau);
      ++total_agree_checks;
      if (dd.actor == ds.actor) ++agree;
    }

    // (b)/(c) on a dropout-enabled net with continuous-valued samples
    NetConfig mc_cfg = det_cfg;
    mc_cfg.dropout = 0.2;
    Rng net_rng2(20000 + trial);
    Mlp mc_net(mc_cfg, net_rng2);
    Rng mc2(5000 + trial);
    const ActionSampleSet wet = novice_sample(mc_net, obs, 20, mc2);
    if (dr_dropout(a_exp, wet, {tau, 0.0, 20, Norm::Euclidean}).actor == Actor::Novice)
      ++novice_under_p0;
    if (dr_dropout(a_exp, wet, {0.0, 0.5, 20, Norm::Euclidean}).actor == Actor::Expert)
      ++expert_under_tau0;
  }
  criterion(2, "decision-rule reductions (d=0, p=0, tau=0)",
            agree == total_agree_checks && novice_under_p0 == trials &&
                expert_under_tau0 == trials,
            fmt("agree %d/%d, p0-novice %d/%d, tau0-expert %d/%d", agree, total_agree_checks,
                novice_under_p0, trials, expert_under_tau0, trials));
}

// ---------------------------------------------------------------- 3
// Finite differences are only a valid oracle away from the ReLU kinks.
double min_hidden_preactivation(const Mlp& net, const std::vector<std::vector<double>>& inputs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& input : inputs) {
    std::vector<double> act = input;
    for (int l = 0; l < net.num_layers(); ++l) {
      const Layer& layer = net.layers()[l];
      std::vector<double> z(layer.w.rows, 0.0);
      for (int r = 0; r < layer.w.rows; ++r) {
        z[r] = layer.b[r];
        for (int c = 0; c < layer.w.cols; ++c) z[r] += layer.w.at(r, c) * act[c];
      }
      if (l == net.num_layers() - 1) break;
      for (double& v : z) {
        best = std::min(best, std::abs(v));
        v = v > 0.0 ? v : 0.0;
      }
      act = z;
    }
  }
  return best;
}

void check_gradients() {
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 3; ++trial) {
    NetConfig cfg;
    cfg.layer_sizes = {6, 10, 8, 4};  // 194 parameters
    cfg.l2_weight = trial == 2 ? 1e-3 : 0.0;

    std::uint64_t net_seed = 3100 + trial;
    Rng net_rng(net_seed);
    Mlp net(cfg, net_rng);
    Rng data_rng(3200 + trial);
    std::vector<std::vector<double>> inputs, targets;
    for (int attempt = 0;; ++attempt) {
      inputs.clear();
      targets.clear();
      for (int s = 0; s < 4; ++s) {
        inputs.emplace_back();
        targets.emplace_back();
        for (int k = 0; k < 6; ++k) inputs.back().push_back(data_rng.normal());
        for (int k = 0; k < 4; ++k) targets.back().push_back(data_rng.normal());
      }
      if (min_hidden_preactivation(net, inputs) > 1e-3 || attempt >= 100) break;
      Rng redraw(++net_seed * 104729);
      net = Mlp(cfg, redraw);
    }
    std::vector<SampleView> views;
    for (size_t s = 0; s < inputs.size(); ++s) views.push_back({inputs[s], targets[s]});

    NetTrainer trainer(net);
    Gradients g;
    trainer.gradients(net, views, nullptr, g);
    const double h = 1e-6;
    auto fd_of = [&](double& param) {
      const double saved = param;
      param = saved + h;
      const double up = trainer.loss(net, views);
      param = saved - h;
      const double down = trainer.loss(net, views);
      param = saved;
      return (up - down) / (2.0 * h);
    };
    for (int l = 0; l < net.num_layers() && ok; ++l) {
      for (size_t k = 0; k < net.layers()[l].w.a.size(); ++k) {
        const double fd = fd_of(net.layers()[l].w.a[k]);
        const double rel =
            std::abs(fd - g.w[l].a[k]) / std::max({1.0, std::abs(fd), std::abs(g.w[l].a[k])});
        worst = std::max(worst, rel);
        if (rel >= 1e-5) ok = false;
      }
      for (size_t k = 0; k < net.layers()[l].b.size(); ++k) {
        const double fd = fd_of(net.layers()[l].b[k]);
        const double rel =
            std::abs(fd - g.b[l][k]) / std::max({1.0, std::abs(fd), std::abs(g.b[l][k])});
        worst = std::max(worst, rel);
        if (rel >= 1e-5) ok = false;
      }
    }
  }
  criterion(3, "analytic gradients match finite differences", ok,
            fmt("worst relative error %.2e", worst));
}

// ---------------------------------------------------------------- 4
void check_noise_moments() {
  const double x = 50.0, s1 = 10.0, s2 = 10.0, cap = 100.0;
  const int n = 1000000;
  Rng raw_rng(41001), clamp_rng(41002);
  double sum = 0.0, sum_sq = 0.0;
  int clamped_ok = 0;
  for (int i = 0; i < n; ++i) {
    const double raw = corrupt_raw(x, s1, s2, raw_rng);
    sum += raw;
    sum_sq += raw * raw;
    const double clamped = corrupt(x, s1, s2, cap, clamp_rng);
    if (clamped >= 0.0 && clamped <= cap) ++clamped_ok;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double want_var = s1 * s1 + x * x * s2 * s2;
  const double se = std::sqrt(want_var / n);
  const bool ok = std::abs(mean - x) < 3.0 * se && std::abs(var - want_var) < 0.05 * want_var &&
                  clamped_ok == n;
  criterion(4, "lidar noise moments and clamping", ok,
            fmt("mean %.3f (3se %.3f), var %.0f vs %.0f, clamped %d/%d", mean, 3.0 * se, var,
                want_var, clamped_ok, n));
}

// ---------------------------------------------------------------- 5
double raymarch_oracle(const Pose& pose, int ray, const DubinsRoomConfig& room) {
  const double angle = pose.theta + 2.0 * std::numbers::pi * ray / room.lidar_rays;
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double gap_lo = room.room_size / 2.0 - room.exit_width / 2.0;
  const double gap_hi = room.room_size / 2.0 + room.exit_width / 2.0;
  for (double t = 1e-3; t <= room.lidar_max_range; t += 1e-3) {
    const double px = pose.x + t * dx;
    const double py = pose.y + t * dy;
    if (px < 0.0 || px > room.room_size || py < 0.0) return t;
    if (py > room.room_size) return (px > gap_lo && px < gap_hi) ? room.lidar_max_range : t;
  }
  return room.lidar_max_range;
}

void check_raycast_oracle() {
  DubinsRoomConfig room;
  Rng rng(51234);
  double worst = 0.0;
  int ok_count = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const Pose pose{rng.uniform(0.2, 99.8), rng.uniform(0.2, 99.8),
                    rng.uniform(-std::numbers::pi, std::numbers::pi)};
    const int ray = static_cast<int>(rng.below(room.lidar_rays));
    const double diff = std::abs(raycast(pose, ray, room) - raymarch_oracle(pose, ray, room));
    worst = std::max(worst, diff);
    if (diff < 2e-3) ++ok_count;
  }
  criterion(5, "analytic raycast matches 1 mm marching oracle", ok_count == trials,
            fmt("%d/%d within 2 mm, worst %.4g m", ok_count, trials, worst));
}

// ---------------------------------------------------------------- 6
void check_dubins_planner() {
  Rng rng(61234);
  int endpoint_ok = 0, shortest_ok = 0;
  const int trials = 1000;
  double worst_pos = 0.0;
  for (int i = 0; i < trials; ++i) {
    const Pose start{rng.uniform(0, 4), rng.uniform(0, 4),
                     rng.uniform(-std::numbers::pi, std::numbers::pi)};
    const Pose goal{rng.uniform(0, 4), rng.uniform(0, 4),
                    rng.uniform(-std::numbers::pi, std::numbers::pi)};
    const DubinsPath path = plan_dubins(start, goal, 1.0);

    Pose pose = start;
    const double dt = 1e-4;
    for (const DubinsSegment& seg : path.segments) {
      double u = 0.0;
      if (seg.kind == SegKind::Left) u = 1.0;
      if (seg.kind == SegKind::Right) u = -1.0;
      double remaining = seg.length;
      while (remaining > 1e-12) {
        const double step = std::min(dt, remaining);
        pose = kinematics_step(pose, u, 1.0, step, 2.0);
        remaining -= step;
      }
    }
    const double pos_err = std::hypot(pose.x - goal.x, pose.y - goal.y);
    const double ang_err = std::abs(wrap_angle(pose.theta - goal.theta));
    worst_pos = std::max(worst_pos, pos_err);
    if (pos_err < 1e-3 && ang_err < 1e-3) ++endpoint_ok;

    bool shortest = true;
    for (const WordCandidate& cand : plan_dubins_words(start, goal, 1.0))
      if (cand.feasible && path.length() > cand.length + 1e-12) shortest = false;
    if (shortest) ++shortest_ok;
  }
  criterion(6, "dubins planner integration oracle and word optimality",
            endpoint_ok == trials && shortest_ok == trials,
            fmt("endpoint %d/%d (worst %.2e m), shortest %d/%d", endpoint_ok, trials, worst_pos,
                shortest_ok, trials));
}

// ---------------------------------------------------------------- 7
void check_expert_safety() {
  DubinsRoomConfig room;
  DubinsCarEnv env(room);
  DubinsExpert expert(env);
  int exits = 0;
  const int episodes = 50;
  for (int j = 0; j < episodes; ++j) {
    const RolloutResult res = rollout_expert(env, expert, derive_seed(7001, 7, j));
    if (res.outcome == Outcome::Exited && res.total_return == 1.0) ++exits;
  }
  criterion(7, "expert-only control exits in 100% of 50 episodes", exits == episodes,
            fmt("%d/%d exited", exits, episodes));
}

// -------------------------------------------------------------- 8+9
ExperimentConfig scaled_fig6_config(const std::string& out_dir) {
  std::stringstream ss(
      "experiment.name = dubins_scaled\n"
      "experiment.seed = 1729\n"
      "env.type = dubins\n"
      "dagger.epochs = 10\n"
      "dagger.episodes_per_epoch = 5\n"
      "dagger.eval_episodes = 20\n"
      "algo.0.rule = dropout_dagger\n"  // tau 0.3, p 0.6, N 20, d 0.05 defaults
      "algo.1.rule = expert_labels_only\n");
  ExperimentConfig cfg = load_config(ss);
  cfg.output_dir = out_dir;
  return cfg;
}

void check_scaled_experiment() {
  namespace fs = std::filesystem;
  const fs::path dir_a = fs::temp_directory_path() / "daglab_acceptance_a";
  const fs::path dir_b = fs::temp_directory_path() / "daglab_acceptance_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  std::fprintf(stderr, "running the scaled Dubins experiment twice; this takes minutes...\n");
  const ExperimentResult first = run_experiment(scaled_fig6_config(dir_a.string()));
  const ExperimentResult second = run_experiment(scaled_fig6_config(dir_b.string()));

  double min_safety = 1e9, final_learning = -1e9;
  double dropout_early = 0.0, labels_early = 0.0;
  int dropout_rows = 0;
  for (const ResultRow& row : first.table.rows) {
    if (row.algorithm == "dropout_dagger") {
      ++dropout_rows;
      min_safety = std::min(min_safety, row.safety_mean);
      if (row.epoch == 9) final_learning = row.learning_mean;
      if (row.epoch < 3) dropout_early += row.safety_mean / 3.0;
    } else if (row.algorithm == "expert_labels_only" && row.epoch < 3) {
      labels_early += row.safety_mean / 3.0;
    }
  }
  const bool complete = dropout_rows == 10 && first.outcomes.size() == 2 &&
                        first.outcomes[0].completed && first.outcomes[1].completed;

  criterion(8, "scaled reproduction: safety, learning, and baseline ordering",
            complete && min_safety >= 0.95 && final_learning >= 0.6 &&
                labels_early < dropout_early,
            fmt("min safety %.3f, final learning %.3f, early safety %.3f vs %.3f", min_safety,
                final_learning, labels_early, dropout_early));

  std::ifstream csv_a(dir_a / "results.csv", std::ios::binary);
  std::ifstream csv_b(dir_b / "results.csv", std::ios::binary);
  std::stringstream buf_a, buf_b;
  buf_a << csv_a.rdbuf();
  buf_b << csv_b.rdbuf();
  const bool identical = csv_a.good() && csv_b.good() && buf_a.str() == buf_b.str() &&
                         !buf_a.str().empty();
  criterion(9, "rerun with the same seed is byte-identical", identical,
            fmt("%zu bytes vs %zu bytes", buf_a.str().size(), buf_b.str().size()));

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

// ---------------------------------------------------------------- 10
void check_engine_properties() {
  PointmassConfig env_cfg;
  PointmassEnv env(env_cfg);
  PointmassExpert expert(env);
  NetConfig net_cfg;
  net_cfg.layer_sizes = {1, 8, 1};
  net_cfg.dropout = 0.1;
  net_cfg.learning_rate = 1e-2;
  net_cfg.train_epochs = 10;
  net_cfg.batch_size = 16;
  Rng init(10001);
  Mlp net(net_cfg, init);
  RuleSpec spec;
  spec.kind = RuleKind::DropoutDagger;
  spec.n_samples = 10;
  DaggerConfig dc;
  dc.epochs = 4;
  dc.episodes_per_epoch = 3;
  dc.eval_episodes = 5;
  const DaggerResult res = run_dagger(env, expert, net, DecisionPolicy(spec), dc, 10101);

  bool purity = res.completed;
  for (const LabeledPair& pair : res.dataset.pairs())
    if (pair.label.values[0] != -env_cfg.gain * pair.obs.values[0]) purity = false;

  bool monotone = true;
  size_t prev = 0;
  for (size_t s : res.dataset_sizes) {
    if (s < prev) monotone = false;
    prev = s;
  }

  // evaluation isolation: an extra evaluate must not disturb the dataset
  std::stringstream before;
  save_dataset(res.dataset, before);
  MlpNovice novice(net);
  (void)evaluate(env, expert, novice, DecisionPolicy(spec), 0, 5, 777);
  std::stringstream after;
  save_dataset(res.dataset, after);
  const bool isolated = before.str() == after.str();

  criterion(10, "engine properties: label purity, monotone data, eval isolation",
            purity && monotone && isolated,
            fmt("pairs %zu, purity %s, monotone %s, isolated %s", res.dataset.size(),
                purity ? "yes" : "no", monotone ? "yes" : "no", isolated ? "yes" : "no"));
}

}  // namespace

int main() {
  check_beta_schedule();
  check_reductions();
  check_gradients();
  check_noise_moments();
  check_raycast_oracle();
  check_dubins_planner();
  check_expert_safety();
  check_scaled_experiment();
  check_engine_properties();
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criterion(s) FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

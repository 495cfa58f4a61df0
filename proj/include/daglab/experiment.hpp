#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "daglab/config.hpp"
#include "daglab/obs_noise.hpp"
#include "daglab/svg.hpp"

namespace daglab {

struct ResultRow {
  std::string algorithm;
  int epoch = 0;
  double safety_mean = 0.0;
  double safety_std = 0.0;
  double learning_mean = 0.0;
  double learning_std = 0.0;
  double expert_action_fraction = 0.0;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
};

inline constexpr const char* kResultsCsvHeader =
    "algorithm,epoch,safety_mean,safety_std,learning_mean,learning_std,expert_action_fraction";

inline std::string emit_results_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << kResultsCsvHeader << '\n';
  for (const ResultRow& r : table.rows)
    out << r.algorithm << ',' << r.epoch << ',' << format_double(r.safety_mean) << ','
        << format_double(r.safety_std) << ',' << format_double(r.learning_mean) << ','
        << format_double(r.learning_std) << ',' << format_double(r.expert_action_fraction)
        << '\n';
  return out.str();
}

inline ResultsTable parse_results_csv(std::istream& in) {
  ResultsTable table;
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader)
    throw ConfigError("results csv: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ResultRow r;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ',')) throw ConfigError(std::string("results csv: missing ") + what);
      return field;
    };
    r.algorithm = next("algorithm");
    r.epoch = static_cast<int>(cfgdetail::parse_int("epoch", next("epoch")));
    r.safety_mean = cfgdetail::parse_double("safety_mean", next("safety_mean"));
    r.safety_std = cfgdetail::parse_double("safety_std", next("safety_std"));
    r.learning_mean = cfgdetail::parse_double("learning_mean", next("learning_mean"));
    r.learning_std = cfgdetail::parse_double("learning_std", next("learning_std"));
    r.expert_action_fraction =
        cfgdetail::parse_double("expert_action_fraction", next("expert_action_fraction"));
    table.rows.push_back(std::move(r));
  }
  return table;
}

inline ResultsTable parse_results_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("results csv: cannot open " + path);
  return parse_results_csv(in);
}

inline constexpr const char* kTrajectoryCsvHeader = "t,x,y,theta,u,actor,reward";

inline std::string emit_trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream out;
  out << kTrajectoryCsvHeader << '\n';
  for (const TrajectoryRow& r : rows)
    out << r.t << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
        << format_double(r.theta) << ',' << format_double(r.u) << ',' << actor_name(r.actor)
        << ',' << format_double(r.reward) << '\n';
  return out.str();
}

inline std::vector<TrajectoryRow> parse_trajectory_csv(std::istream& in) {
  std::vector<TrajectoryRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryCsvHeader)
    throw ConfigError("trajectory csv: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    TrajectoryRow r;
    auto next = [&] {
      if (!std::getline(ss, field, ',')) throw ConfigError("trajectory csv: short row");
      return field;
    };
    r.t = static_cast<int>(cfgdetail::parse_int("t", next()));
    r.x = cfgdetail::parse_double("x", next());
    r.y = cfgdetail::parse_double("y", next());
    r.theta = cfgdetail::parse_double("theta", next());
    r.u = cfgdetail::parse_double("u", next());
    const std::string actor = next();
    if (actor == "expert") r.actor = Actor::Expert;
    else if (actor == "novice") r.actor = Actor::Novice;
    else throw ConfigError("trajectory csv: unknown actor '" + actor + "'");
    r.reward = cfgdetail::parse_double("reward", next());
    rows.push_back(r);
  }
  return rows;
}

namespace expdetail {

// Environment plus a bound expert, built per algorithm run.
struct EnvBundle {
  std::unique_ptr<DubinsCarEnv> dubins;
  std::unique_ptr<PointmassEnv> pointmass;
  std::unique_ptr<GaussianObsWrapper> wrapper;
  std::unique_ptr<ExpertPolicy> expert;
  Environment* env = nullptr;  // the environment rollouts should use
};

inline EnvBundle make_env(const ExperimentConfig& cfg) {
  EnvBundle bundle;
  if (cfg.env_kind == EnvKind::Dubins) {
    bundle.dubins = std::make_unique<DubinsCarEnv>(cfg.dubins);
    bundle.expert = std::make_unique<DubinsExpert>(
        *bundle.dubins, cfg.dubins_expert_replan ? DubinsExpert::Mode::ReplanEachStep
                                                 : DubinsExpert::Mode::OpenLoop);
    bundle.env = bundle.dubins.get();
  } else {
    bundle.pointmass = std::make_unique<PointmassEnv>(cfg.pointmass);
    bundle.expert = std::make_unique<PointmassExpert>(*bundle.pointmass);
    bundle.env = bundle.pointmass.get();
  }
  if (cfg.obs_noise_sigma > 0.0) {
    bundle.wrapper = std::make_unique<GaussianObsWrapper>(*bundle.env, cfg.obs_noise_sigma);
    bundle.env = bundle.wrapper.get();
  }
  return bundle;
}

inline std::string decisions_csv(const std::vector<DecisionRecord>& log) {
  std::ostringstream out;
  out << "epoch,episode,t,actor,p_hat,distance,beta,reward\n";
  for (const DecisionRecord& r : log)
    out << r.epoch << ',' << r.episode << ',' << r.t << ',' << actor_name(r.actor) << ','
        << format_double(r.p_hat) << ',' << format_double(r.distance) << ','
        << format_double(r.beta) << ',' << format_double(r.reward) << '\n';
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace expdetail

struct AlgorithmOutcome {
  std::string name;
  bool completed = false;
  std::string error;
  std::vector<EpochMetrics> metrics;
  size_t dataset_size = 0;
};

struct ExperimentResult {
  ResultsTable table;
  std::vector<AlgorithmOutcome> outcomes;
};

// Curves grouped per algorithm in first-appearance order.
inline std::string render_results_svg(const ResultsTable& table) {
  if (table.rows.empty()) throw ConfigError("render_plots: empty results table");
  std::vector<Curve> safety, learning;
  for (const ResultRow& r : table.rows) {
    size_t idx = safety.size();
    for (size_t k = 0; k < safety.size(); ++k)
      if (safety[k].label == r.algorithm) idx = k;
    if (idx == safety.size()) {
      safety.push_back({r.algorithm, {}});
      learning.push_back({r.algorithm, {}});
    }
    safety[idx].values.push_back(r.safety_mean);
    learning[idx].values.push_back(r.learning_mean);
  }
  return render_curves_svg(safety, learning);
}

// Runs every algorithm of the sweep with per-algorithm derived seeds and, if
// out_dir is nonempty, writes config echo, results CSV/JSON, per-step
// decision diagnostics, curve SVGs, and optional trajectory dumps there.
// A failing algorithm is recorded as partial without aborting the others.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& out_dir_override = "") {
  cfg.validate();
  const std::string out_dir = out_dir_override.empty() ? cfg.output_dir : out_dir_override;
  const bool write_outputs = !out_dir.empty();
  namespace fs = std::filesystem;
  if (write_outputs) {
    fs::create_directories(out_dir);
    ExperimentConfig echo = cfg;
    echo.output_dir = out_dir;
    expdetail::write_file(fs::path(out_dir) / "config_echo.cfg", emit_config(echo));
  }

  ExperimentResult result;
  for (size_t a = 0; a < cfg.algorithms.size(); ++a) {
    const AlgorithmSpec& algo = cfg.algorithms[a];
    AlgorithmOutcome outcome;
    outcome.name = algo.name;
    try {
      expdetail::EnvBundle bundle = expdetail::make_env(cfg);
      const NetConfig net_cfg =
          cfg.net_config(bundle.env->observation_dim(), bundle.env->action_dim(), algo);
      const std::uint64_t run_seed = derive_seed(cfg.seed, 0xa160u, a);
      Rng init_rng(derive_seed(run_seed, detail::kSeedNetInit, 0));
      Mlp net(net_cfg, init_rng);
      DecisionPolicy rule(algo.rule);
      DaggerResult dagger = run_dagger(*bundle.env, *bundle.expert, net, rule, cfg.dagger,
                                       run_seed, cfg.dump_trajectories);
      outcome.completed = dagger.completed;
      outcome.error = dagger.error;
      outcome.metrics = dagger.metrics;
      outcome.dataset_size = dagger.dataset.size();
      for (const EpochMetrics& m : dagger.metrics)
        result.table.rows.push_back({algo.name, m.epoch, m.safety_mean, m.safety_std,
                                     m.learning_mean, m.learning_std,
                                     m.expert_action_fraction});
      if (write_outputs) {
        expdetail::write_file(fs::path(out_dir) / ("decisions_" + algo.name + ".csv"),
                              expdetail::decisions_csv(dagger.decision_log));
        if (cfg.dump_dataset)
          save_dataset(dagger.dataset, (fs::path(out_dir) / ("dataset_" + algo.name + ".txt")).string());
        if (cfg.dump_trajectories) {
          const fs::path traj_dir = fs::path(out_dir) / "trajectories" / algo.name;
          fs::create_directories(traj_dir);
          for (size_t k = 0; k < dagger.collection_trajectories.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "collect_%04zu.csv", k);
            expdetail::write_file(traj_dir / name,
                                  emit_trajectory_csv(dagger.collection_trajectories[k]));
          }
        }
      }
    } catch (const std::exception& e) {
      outcome.completed = false;
      outcome.error = e.what();
    }
    result.outcomes.push_back(std::move(outcome));
  }

  if (write_outputs) {
    expdetail::write_file(fs::path(out_dir) / "results.csv", emit_results_csv(result.table));

    nlohmann::json j;
    j["experiment"] = cfg.name;
    j["seed"] = cfg.seed;
    j["algorithms"] = nlohmann::json::array();
    for (const AlgorithmOutcome& o : result.outcomes) {
      nlohmann::json ja;
      ja["name"] = o.name;
      ja["completed"] = o.completed;
      if (!o.error.empty()) ja["error"] = o.error;
      ja["dataset_size"] = o.dataset_size;
      ja["epochs"] = nlohmann::json::array();
      for (const EpochMetrics& m : o.metrics)
        ja["epochs"].push_back({{"epoch", m.epoch},
                                {"safety_mean", m.safety_mean},
                                {"safety_std", m.safety_std},
                                {"learning_mean", m.learning_mean},
                                {"learning_std", m.learning_std},
                                {"expert_action_fraction", m.expert_action_fraction}});
      j["algorithms"].push_back(std::move(ja));
    }
    expdetail::write_file(fs::path(out_dir) / "results.json", j.dump(2) + "\n");

    if (!result.table.rows.empty())
      expdetail::write_file(fs::path(out_dir) / "curves.svg", render_results_svg(result.table));
  }
  return result;
}

}  // namespace daglab

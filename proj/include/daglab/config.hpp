#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "daglab/dagger.hpp"
#include "daglab/dubins_env.hpp"
#include "daglab/net_io.hpp"
#include "daglab/pointmass.hpp"

namespace daglab {

enum class EnvKind { Dubins, Pointmass };

// One algorithm entry of a sweep: a decision rule plus optional per-algorithm
// overrides of the shared network defaults.
struct AlgorithmSpec {
  std::string name;  // defaults to the rule name
  RuleSpec rule;
  double dropout_override = -1.0;  // < 0: use the experiment-wide net.dropout
};

// Everything a reproducible experiment run needs. Outputs are a pure
// function of this struct (including the master seed).
struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool dump_trajectories = false;
  bool dump_dataset = false;  // write each algorithm's aggregated dataset

  EnvKind env_kind = EnvKind::Dubins;
  double obs_noise_sigma = 0.0;  // extra diagonal-Gaussian noise on novice observations
  DubinsRoomConfig dubins;
  bool dubins_expert_replan = true;  // false: open-loop path tracking
  PointmassConfig pointmass;

  std::vector<int> hidden = {64, 64, 32};
  double net_dropout = 0.05;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double l2_weight = 1e-5;
  int train_epochs = 100;
  int batch_size = 32;
  double input_scale = 0.0;  // 0 = auto: 1/lidar_max_range on dubins, 1 on pointmass

  DaggerConfig dagger;

  std::vector<AlgorithmSpec> algorithms;

  double resolved_input_scale() const {
    if (input_scale > 0.0) return input_scale;
    return env_kind == EnvKind::Dubins ? 1.0 / dubins.lidar_max_range : 1.0;
  }

  NetConfig net_config(int obs_dim, int act_dim, const AlgorithmSpec& algo) const {
    NetConfig net;
    net.layer_sizes.push_back(obs_dim);
    for (int h : hidden) net.layer_sizes.push_back(h);
    net.layer_sizes.push_back(act_dim);
    net.dropout = algo.dropout_override >= 0.0 ? algo.dropout_override : net_dropout;
    net.learning_rate = learning_rate;
    net.adam_beta1 = adam_beta1;
    net.adam_beta2 = adam_beta2;
    net.adam_epsilon = adam_epsilon;
    net.l2_weight = l2_weight;
    net.train_epochs = train_epochs;
    net.batch_size = batch_size;
    net.input_scale = resolved_input_scale();
    return net;
  }

  void validate() const {
    if (name.empty()) throw ConfigError("experiment.name must not be empty");
    dubins.validate();
    pointmass.validate();
    if (obs_noise_sigma < 0.0) throw ConfigError("env.obs_noise_sigma must be >= 0");
    if (hidden.empty()) throw ConfigError("net.hidden must list at least one layer width");
    for (int h : hidden)
      if (h < 1) throw ConfigError("net.hidden entries must be >= 1");
    if (!(net_dropout >= 0.0 && net_dropout < 1.0))
      throw ConfigError("net.dropout must be in [0,1)");
    if (!(learning_rate > 0.0)) throw ConfigError("net.learning_rate must be > 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("net.adam_beta1 must be in (0,1)");
    if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("net.adam_beta2 must be in (0,1)");
    if (!(adam_epsilon > 0.0)) throw ConfigError("net.adam_epsilon must be > 0");
    if (l2_weight < 0.0) throw ConfigError("net.l2_weight must be >= 0");
    if (train_epochs < 1) throw ConfigError("net.train_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("net.batch_size must be >= 1");
    if (input_scale < 0.0) throw ConfigError("net.input_scale must be >= 0 (0 = auto)");
    dagger.validate();
    if (algorithms.empty()) throw ConfigError("at least one algo.<i>.rule entry is required");
    for (size_t i = 0; i < algorithms.size(); ++i) {
      const AlgorithmSpec& a = algorithms[i];
      const std::string where = "algo." + std::to_string(i);
      if (a.name.empty()) throw ConfigError(where + ".name must not be empty");
      if (a.name.find(',') != std::string::npos || a.name.find('\n') != std::string::npos)
        throw ConfigError(where + ".name must not contain commas or newlines");
      a.rule.validate(where);
      if (a.dropout_override >= 1.0) throw ConfigError(where + ".dropout must be in [0,1)");
      for (size_t j = 0; j < i; ++j)
        if (algorithms[j].name == a.name)
          throw ConfigError(where + ".name duplicates algo." + std::to_string(j));
    }
  }
};

namespace cfgdetail {

struct KeyValues {
  std::map<std::string, std::string> entries;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
  const std::string* find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
};

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (kv.entries.count(key))
      throw ConfigError("config: duplicate key " + key);
    kv.entries[key] = value;
  }
  return kv;
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + value + "'");
  }
}

inline long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + value + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an unsigned integer: '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(parse_int(key, item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated integer list");
  return out;
}

inline RuleKind parse_rule(const std::string& key, const std::string& value) {
  for (RuleKind k : {RuleKind::BehaviorCloning, RuleKind::ExpertLabelsOnly, RuleKind::Vanilla,
                     RuleKind::SafeDaggerStar, RuleKind::DropoutDagger})
    if (value == rule_name(k)) return k;
  throw ConfigError(key + ": unknown rule '" + value + "'");
}

inline Norm parse_norm(const std::string& key, const std::string& value) {
  if (value == "euclidean") return Norm::Euclidean;
  if (value == "max") return Norm::Max;
  throw ConfigError(key + ": expected euclidean or max, got '" + value + "'");
}

}  // namespace cfgdetail

// Parse and fully validate a config. Unknown keys and out-of-range values
// raise ConfigError naming the offending key.
inline ExperimentConfig load_config(std::istream& in) {
  using namespace cfgdetail;
  const KeyValues kv = parse_key_values(in);
  ExperimentConfig cfg;

  std::map<std::string, bool> consumed;
  auto get = [&](const std::string& key) -> const std::string* {
    consumed[key] = true;
    return kv.find(key);
  };
  auto get_d = [&](const std::string& key, double& into) {
    if (const std::string* v = get(key)) into = parse_double(key, *v);
  };
  auto get_i = [&](const std::string& key, int& into) {
    if (const std::string* v = get(key)) into = static_cast<int>(parse_int(key, *v));
  };
  auto get_b = [&](const std::string& key, bool& into) {
    if (const std::string* v = get(key)) into = parse_bool(key, *v);
  };
  auto get_s = [&](const std::string& key, std::string& into) {
    if (const std::string* v = get(key)) into = *v;
  };

  get_s("experiment.name", cfg.name);
  if (const std::string* v = get("experiment.seed")) cfg.seed = parse_u64("experiment.seed", *v);
  get_s("experiment.output_dir", cfg.output_dir);
  get_b("experiment.dump_trajectories", cfg.dump_trajectories);
  get_b("experiment.dump_dataset", cfg.dump_dataset);

  if (const std::string* v = get("env.type")) {
    if (*v == "dubins") cfg.env_kind = EnvKind::Dubins;
    else if (*v == "pointmass") cfg.env_kind = EnvKind::Pointmass;
    else throw ConfigError("env.type: expected dubins or pointmass, got '" + *v + "'");
  }
  get_d("env.obs_noise_sigma", cfg.obs_noise_sigma);

  get_d("env.dubins.room_size", cfg.dubins.room_size);
  get_d("env.dubins.exit_width", cfg.dubins.exit_width);
  get_i("env.dubins.lidar_rays", cfg.dubins.lidar_rays);
  get_d("env.dubins.lidar_max_range", cfg.dubins.lidar_max_range);
  get_d("env.dubins.sigma1", cfg.dubins.sigma1);
  get_d("env.dubins.sigma2", cfg.dubins.sigma2);
  get_d("env.dubins.dt", cfg.dubins.dt);
  get_d("env.dubins.omega_max", cfg.dubins.omega_max);
  get_d("env.dubins.speed", cfg.dubins.speed);
  get_i("env.dubins.max_steps", cfg.dubins.max_steps);
  get_d("env.dubins.collision_buffer", cfg.dubins.collision_buffer);
  get_d("env.dubins.start_margin", cfg.dubins.start_margin);
  get_d("env.dubins.start_y_max", cfg.dubins.start_y_max);
  get_d("env.dubins.goal_inset", cfg.dubins.goal_inset);
  if (const std::string* v = get("env.dubins.expert_mode")) {
    if (*v == "replan") cfg.dubins_expert_replan = true;
    else if (*v == "open_loop") cfg.dubins_expert_replan = false;
    else throw ConfigError("env.dubins.expert_mode: expected replan or open_loop");
  }

  get_d("env.pointmass.dt", cfg.pointmass.dt);
  get_d("env.pointmass.gain", cfg.pointmass.gain);
  get_d("env.pointmass.u_max", cfg.pointmass.u_max);
  get_i("env.pointmass.max_steps", cfg.pointmass.max_steps);
  get_d("env.pointmass.start_lo", cfg.pointmass.start_lo);
  get_d("env.pointmass.start_hi", cfg.pointmass.start_hi);
  get_b("env.pointmass.fixed_start", cfg.pointmass.fixed_start);
  get_d("env.pointmass.fixed_x0", cfg.pointmass.fixed_x0);

  if (const std::string* v = get("net.hidden")) cfg.hidden = parse_int_list("net.hidden", *v);
  get_d("net.dropout", cfg.net_dropout);
  get_d("net.learning_rate", cfg.learning_rate);
  get_d("net.adam_beta1", cfg.adam_beta1);
  get_d("net.adam_beta2", cfg.adam_beta2);
  get_d("net.adam_epsilon", cfg.adam_epsilon);
  get_d("net.l2_weight", cfg.l2_weight);
  get_i("net.train_epochs", cfg.train_epochs);
  get_i("net.batch_size", cfg.batch_size);
  get_d("net.input_scale", cfg.input_scale);

  get_i("dagger.epochs", cfg.dagger.epochs);
  get_i("dagger.episodes_per_epoch", cfg.dagger.episodes_per_epoch);
  get_i("dagger.horizon", cfg.dagger.horizon);
  get_i("dagger.eval_episodes", cfg.dagger.eval_episodes);
  get_i("dagger.bootstrap_episodes", cfg.dagger.bootstrap_episodes);
  get_b("dagger.warm_start", cfg.dagger.warm_start);

  for (int i = 0;; ++i) {
    const std::string prefix = "algo." + std::to_string(i) + ".";
    const std::string* rule = get(prefix + "rule");
    if (!rule) break;
    AlgorithmSpec spec;
    spec.rule.kind = parse_rule(prefix + "rule", *rule);
    spec.name = rule_name(spec.rule.kind);
    get_s(prefix + "name", spec.name);
    get_d(prefix + "tau", spec.rule.tau);
    get_d(prefix + "p", spec.rule.p);
    get_i(prefix + "n_samples", spec.rule.n_samples);
    get_d(prefix + "beta0", spec.rule.beta0);
    get_d(prefix + "lambda", spec.rule.lambda);
    if (const std::string* v = get(prefix + "norm"))
      spec.rule.norm = parse_norm(prefix + "norm", *v);
    if (const std::string* v = get(prefix + "dropout")) {
      spec.dropout_override = parse_double(prefix + "dropout", *v);
      if (spec.dropout_override < 0.0 || spec.dropout_override >= 1.0)
        throw ConfigError(prefix + ".dropout must be in [0,1)");
    }
    cfg.algorithms.push_back(std::move(spec));
  }

  for (const auto& [key, value] : kv.entries)
    if (!consumed.count(key)) throw ConfigError("config: unknown key '" + key + "'");

  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_config: cannot open " + path);
  return load_config(in);
}

// Canonical emission with every key explicit; load(emit(cfg)) == cfg and
// emit is a fixpoint of load-then-emit.
inline std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto d = [&](const std::string& key, double v) { out << key << " = " << format_double(v) << '\n'; };
  auto i = [&](const std::string& key, long v) { out << key << " = " << v << '\n'; };
  auto s = [&](const std::string& key, const std::string& v) { out << key << " = " << v << '\n'; };
  auto b = [&](const std::string& key, bool v) { out << key << " = " << (v ? "true" : "false") << '\n'; };

  s("experiment.name", cfg.name);
  out << "experiment.seed = " << cfg.seed << '\n';
  s("experiment.output_dir", cfg.output_dir);
  b("experiment.dump_trajectories", cfg.dump_trajectories);
  b("experiment.dump_dataset", cfg.dump_dataset);
  s("env.type", cfg.env_kind == EnvKind::Dubins ? "dubins" : "pointmass");
  d("env.obs_noise_sigma", cfg.obs_noise_sigma);
  d("env.dubins.room_size", cfg.dubins.room_size);
  d("env.dubins.exit_width", cfg.dubins.exit_width);
  i("env.dubins.lidar_rays", cfg.dubins.lidar_rays);
  d("env.dubins.lidar_max_range", cfg.dubins.lidar_max_range);
  d("env.dubins.sigma1", cfg.dubins.sigma1);
  d("env.dubins.sigma2", cfg.dubins.sigma2);
  d("env.dubins.dt", cfg.dubins.dt);
  d("env.dubins.omega_max", cfg.dubins.omega_max);
  d("env.dubins.speed", cfg.dubins.speed);
  i("env.dubins.max_steps", cfg.dubins.max_steps);
  d("env.dubins.collision_buffer", cfg.dubins.collision_buffer);
  d("env.dubins.start_margin", cfg.dubins.start_margin);
  d("env.dubins.start_y_max", cfg.dubins.start_y_max);
  d("env.dubins.goal_inset", cfg.dubins.goal_inset);
  s("env.dubins.expert_mode", cfg.dubins_expert_replan ? "replan" : "open_loop");
  d("env.pointmass.dt", cfg.pointmass.dt);
  d("env.pointmass.gain", cfg.pointmass.gain);
  d("env.pointmass.u_max", cfg.pointmass.u_max);
  i("env.pointmass.max_steps", cfg.pointmass.max_steps);
  d("env.pointmass.start_lo", cfg.pointmass.start_lo);
  d("env.pointmass.start_hi", cfg.pointmass.start_hi);
  b("env.pointmass.fixed_start", cfg.pointmass.fixed_start);
  d("env.pointmass.fixed_x0", cfg.pointmass.fixed_x0);
  {
    out << "net.hidden = ";
    for (size_t k = 0; k < cfg.hidden.size(); ++k)
      out << (k ? "," : "") << cfg.hidden[k];
    out << '\n';
  }
  d("net.dropout", cfg.net_dropout);
  d("net.learning_rate", cfg.learning_rate);
  d("net.adam_beta1", cfg.adam_beta1);
  d("net.adam_beta2", cfg.adam_beta2);
  d("net.adam_epsilon", cfg.adam_epsilon);
  d("net.l2_weight", cfg.l2_weight);
  i("net.train_epochs", cfg.train_epochs);
  i("net.batch_size", cfg.batch_size);
  d("net.input_scale", cfg.input_scale);
  i("dagger.epochs", cfg.dagger.epochs);
  i("dagger.episodes_per_epoch", cfg.dagger.episodes_per_epoch);
  i("dagger.horizon", cfg.dagger.horizon);
  i("dagger.eval_episodes", cfg.dagger.eval_episodes);
  i("dagger.bootstrap_episodes", cfg.dagger.bootstrap_episodes);
  b("dagger.warm_start", cfg.dagger.warm_start);
  for (size_t k = 0; k < cfg.algorithms.size(); ++k) {
    const AlgorithmSpec& a = cfg.algorithms[k];
    const std::string prefix = "algo." + std::to_string(k) + ".";
    s(prefix + "rule", rule_name(a.rule.kind));
    s(prefix + "name", a.name);
    d(prefix + "tau", a.rule.tau);
    d(prefix + "p", a.rule.p);
    i(prefix + "n_samples", a.rule.n_samples);
    d(prefix + "beta0", a.rule.beta0);
    d(prefix + "lambda", a.rule.lambda);
    s(prefix + "norm", a.rule.norm == Norm::Euclidean ? "euclidean" : "max");
    if (a.dropout_override >= 0.0) d(prefix + "dropout", a.dropout_override);
  }
  return out.str();
}

inline void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_config: cannot open " + path);
  out << emit_config(cfg);
}

}  // namespace daglab

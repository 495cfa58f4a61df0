// Command-line front end: run experiments, re-render plots, replay
// trajectories, and validate configs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "daglab/experiment.hpp"

namespace {

std::string resolve_out_dir(const std::string& cli_value, const std::string& config_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("DAGLAB_OUT"); env && *env) return env;
  return config_value;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, long long seed,
            bool has_seed) {
  daglab::ExperimentConfig cfg = daglab::load_config(config_path);
  if (has_seed) cfg.seed = static_cast<std::uint64_t>(seed);
  const std::string out = resolve_out_dir(out_dir, cfg.output_dir);
  const daglab::ExperimentResult result = daglab::run_experiment(cfg, out);
  bool all_ok = true;
  for (const daglab::AlgorithmOutcome& o : result.outcomes) {
    std::cout << o.name << ": " << (o.completed ? "completed" : "PARTIAL") << ", "
              << o.metrics.size() << " epochs, dataset " << o.dataset_size << "\n";
    if (!o.error.empty()) {
      std::cout << "  error: " << o.error << "\n";
      all_ok = false;
    }
    for (const daglab::EpochMetrics& m : o.metrics) {
      std::cout << "  epoch " << m.epoch << ": safety " << m.safety_mean << " +- "
                << m.safety_std << ", learning " << m.learning_mean << " +- " << m.learning_std
                << ", expert fraction " << m.expert_action_fraction << "\n";
    }
  }
  std::cout << "results written to " << out << "\n";
  return all_ok ? 0 : 1;
}

int cmd_plot(const std::string& results_path, const std::string& out_path) {
  const daglab::ResultsTable table = daglab::parse_results_csv_file(results_path);
  const std::string svg = daglab::render_results_svg(table);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << svg;
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_replay(const std::string& traj_path, const std::string& out_path, double room_size,
               double exit_width) {
  std::ifstream in(traj_path);
  if (!in) {
    std::cerr << "cannot open " << traj_path << "\n";
    return 1;
  }
  const auto rows = daglab::parse_trajectory_csv(in);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << daglab::render_replay_svg(rows, room_size, exit_width);
  std::cout << "wrote " << out_path << " (" << rows.size() << " steps)\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  daglab::ExperimentConfig cfg = daglab::load_config(config_path);
  std::cout << "ok: " << cfg.name << ", " << cfg.algorithms.size() << " algorithm(s), "
            << cfg.dagger.epochs << " epochs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"daglab: safe imitation-learning experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, results_path, traj_path, out_path;
  long long seed = 0;
  double room_size = 100.0, exit_width = 20.0;

  CLI::App* run = app.add_subcommand("run", "run an experiment sweep from a config file");
  run->add_option("-c,--config", config_path, "config file path")->required();
  run->add_option("-o,--out", out_dir, "output directory (overrides config and DAGLAB_OUT)");
  CLI::Option* seed_opt = run->add_option("-s,--seed", seed, "master seed override");

  CLI::App* plot = app.add_subcommand("plot", "render curve SVGs from a results CSV");
  plot->add_option("-r,--results", results_path, "results.csv path")->required();
  plot->add_option("-o,--out", out_path, "output SVG path")->default_val("curves.svg");

  CLI::App* replay = app.add_subcommand("replay", "render a trajectory CSV as a room SVG");
  replay->add_option("-t,--trajectory", traj_path, "trajectory csv path")->required();
  replay->add_option("-o,--out", out_path, "output SVG path")->default_val("replay.svg");
  replay->add_option("--room-size", room_size, "room side length in meters");
  replay->add_option("--exit-width", exit_width, "exit gap width in meters");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("-c,--config", config_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed, seed_opt->count() > 0);
    if (plot->parsed()) return cmd_plot(results_path, out_path);
    if (replay->parsed()) return cmd_replay(traj_path, out_path, room_size, exit_width);
    if (validate->parsed()) return cmd_validate(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

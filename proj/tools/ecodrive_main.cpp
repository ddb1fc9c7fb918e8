#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include <CLI11.hpp>

#include "ecodrive/config.hpp"
#include "ecodrive/evaluation.hpp"
#include "ecodrive/nn/checkpoint.hpp"
#include "ecodrive/outputs.hpp"
#include "ecodrive/training.hpp"

namespace fs = std::filesystem;
using namespace ecodrive;

namespace {

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
}

int run_train(const std::string& config_path, const std::string& agent, const std::string& cycle_path,
              std::uint64_t seed, const std::string& out_dir, const std::vector<std::string>& sets, bool quiet) {
  RunConfig cfg = load_config(config_path);
  apply_overrides(cfg, sets);
  cfg.agent = parse_agent_kind(agent);
  cfg.seed = seed;
  if (!cycle_path.empty()) cfg.cycle = fs::absolute(cycle_path).string();
  cfg.validate();

  const fs::path out(out_dir);
  fs::create_directories(out);
  write_text(out / "config.cfg", serialize_config(cfg));
  const DriveCycle cycle = config_cycle(cfg);

  TrainOptions opts;
  opts.checkpoint_dir = out / "checkpoints";
  if (!quiet) {
    opts.on_cycle = [&](const CurveRow& r) {
      std::fprintf(stderr, "cycle %4d  mpg %.4f  rmse %.4f  shifts %d  gate %d  loss %s%s\n", r.cycle, r.metrics.mpg,
                   r.metrics.accel_rmse, r.metrics.shift_count, r.gate_active ? 1 : 0,
                   format_number(r.critic_loss).c_str(), r.train_collided ? "  (training collision)" : "");
    };
  }
  const TrainResult result = train(cfg, cycle, opts);

  write_text(out / "learning_curve.csv", learning_curve_csv(result.curve));
  write_text(out / "steps.csv", steps_csv(result.final_eval.steps, to_string(cfg.agent)));
  write_text(out / "metrics.json", train_metrics_json(cfg, result).dump(2) + "\n");
  nn::write_json_file(out / "checkpoint.json", checkpoint_json(cfg, result.agent, static_cast<int>(result.curve.size())));
  return 0;
}

int run_evaluate(const std::string& checkpoint, const std::vector<std::string>& cycle_paths, int reps,
                 const std::string& out_dir, const std::vector<std::string>& sets) {
  LoadedCheckpoint ck = load_checkpoint(checkpoint);
  apply_overrides(ck.config, sets);
  ck.config.validate();
  std::vector<DriveCycle> cycles;
  for (const auto& p : cycle_paths) cycles.push_back(load_cycle(p));
  const EvaluationResult result = evaluate(ck.config, ck.agent, cycles, reps);

  const fs::path out(out_dir);
  fs::create_directories(out);
  write_text(out / "metrics.json", evaluation_json(ck.config, result).dump(2) + "\n");
  std::string steps;
  for (std::size_t i = 0; i < result.first_runs.size(); ++i) {
    std::string block = steps_csv(result.first_runs[i].steps, to_string(ck.config.agent) + ":" + cycles[i].name());
    if (i > 0) block.erase(0, block.find('\n') + 1);
    steps += block;
  }
  write_text(out / "steps.csv", steps);
  for (const auto& c : result.cycles) {
    std::printf("%s  mpg %.4f +- %.4f  rmse %.4f +- %.4f  shifts %.1f +- %.1f  time %.1f +- %.1f  collisions %d\n",
                c.cycle.c_str(), c.mpg.mean, c.mpg.std, c.accel_rmse.mean, c.accel_rmse.std, c.shift_count.mean,
                c.shift_count.std, c.travel_time.mean, c.travel_time.std, c.collisions);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  CLI::App app{"Longitudinal truck simulator with residual and plain RL eco-driving agents"};
  app.require_subcommand(1);

  std::string config_path, agent = "rpl", cycle_path, out_dir, checkpoint;
  std::uint64_t seed = 0;
  int reps = 25;
  bool quiet = false;
  std::vector<std::string> sets, cycles, runs;

  auto* train_cmd = app.add_subcommand("train", "train an agent on a drive cycle");
  train_cmd->add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--agent", agent, "baseline, rl or rpl")->check(CLI::IsMember({"baseline", "rl", "rpl"}));
  train_cmd->add_option("--cycle", cycle_path, "drive cycle CSV (time_s, speed_mps)")->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", seed, "run seed");
  train_cmd->add_option("--out", out_dir, "output directory")->required();
  train_cmd->add_option("--set", sets, "override a config entry, key=value");
  train_cmd->add_flag("--quiet", quiet, "no per-cycle progress");

  auto* eval_cmd = app.add_subcommand("evaluate", "noisy greedy evaluation of a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--cycles", cycles, "drive cycle CSVs")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--reps", reps, "repetitions per cycle")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", out_dir, "output directory")->required();
  eval_cmd->add_option("--set", sets, "override a config entry, key=value");

  auto* plot_cmd = app.add_subcommand("plotdata", "CSV series for learning curves and time series");
  plot_cmd->add_option("--run", runs, "training run directories")->required()->check(CLI::ExistingDirectory);
  plot_cmd->add_option("--out", out_dir, "output directory (default: first run)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train_cmd) return run_train(config_path, agent, cycle_path, seed, out_dir, sets, quiet);
    if (*eval_cmd) return run_evaluate(checkpoint, cycles, reps, out_dir, sets);
    if (*plot_cmd) {
      std::vector<fs::path> dirs(runs.begin(), runs.end());
      write_plot_data(dirs, out_dir.empty() ? dirs.front() : fs::path(out_dir));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "ecodrive/agent.hpp"
#include "ecodrive/config.hpp"
#include "ecodrive/drive_cycle.hpp"
#include "ecodrive/episode.hpp"

namespace ecodrive {

/// One learning-curve entry: the greedy, noise-free evaluation run after a
/// training cycle.
struct CurveRow {
  int cycle = 0;  // 1-based count of completed training cycles
  Metrics metrics;
  bool gate_active = false;
  bool train_collided = false;
  bool eval_collided = false;
  double critic_loss = 0.0;  // mean critic loss over the cycle, NaN if none
  int policy_updates = 0;    // during the cycle
};

struct TrainOptions {
  /// Directory for periodic checkpoints; empty disables them.
  std::filesystem::path checkpoint_dir;
  std::function<void(const CurveRow&)> on_cycle;
  std::function<void(int cycle, const EpisodeResult&)> on_training_episode;
};

struct TrainResult {
  Agent agent;
  std::vector<CurveRow> curve;
  EpisodeResult final_eval;         // greedy noise-free run after the last cycle
  std::optional<int> gate_cycle;    // training cycle (1-based) in which the gate opened
  std::optional<long> gate_step;    // global environment step at which it opened
  long env_steps = 0;
};

/// Repeats the noise-perturbed training cycle `cfg.train_cycles` times,
/// invoking the learner every `learn_every` steps; after each cycle runs a
/// greedy evaluation on the unperturbed cycle.
TrainResult train(const RunConfig& cfg, const DriveCycle& cycle, const TrainOptions& options = {});

/// Checkpoint container: the run config plus the agent state.
nlohmann::json checkpoint_json(const RunConfig& cfg, const Agent& agent, int cycles_trained);
struct LoadedCheckpoint {
  RunConfig config;
  Agent agent;
  int cycles_trained = 0;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);
LoadedCheckpoint checkpoint_from_json(const nlohmann::json& j);

/// Cycle named by the config, or the bundled synthetic cycle.
DriveCycle config_cycle(const RunConfig& cfg);
std::filesystem::path bundled_cycle_path();

}  // namespace ecodrive

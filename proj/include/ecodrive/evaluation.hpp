#pragma once

#include <string>
#include <vector>

#include "ecodrive/agent.hpp"
#include "ecodrive/config.hpp"
#include "ecodrive/drive_cycle.hpp"
#include "ecodrive/episode.hpp"

namespace ecodrive {

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

Stat summarize(const std::vector<double>& values);

struct CycleSummary {
  std::string cycle;
  int repetitions = 0;
  int collisions = 0;  // excluded from the statistics below
  Stat mpg;
  Stat accel_rmse;
  Stat shift_count;
  Stat travel_time;
  Stat fuel_used;
  Stat distance;
  std::vector<Metrics> runs;
};

struct EvaluationResult {
  std::vector<CycleSummary> cycles;
  std::vector<EpisodeResult> first_runs;  // repetition 0 of each cycle
};

/// Greedy-action evaluation: `reps` noise-perturbed runs per cycle. Each
/// repetition draws its noise from its own stream, so results do not depend
/// on evaluation order.
EvaluationResult evaluate(const RunConfig& cfg, const Agent& agent, const std::vector<DriveCycle>& cycles, int reps);

}  // namespace ecodrive

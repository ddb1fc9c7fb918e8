#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ecodrive/agent.hpp"
#include "ecodrive/drive_cycle.hpp"
#include "ecodrive/driver_idm.hpp"
#include "ecodrive/metrics.hpp"
#include "ecodrive/mpo/replay_buffer.hpp"
#include "ecodrive/reward.hpp"
#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive {

/// Fixed physical setting shared by every episode of a run.
struct Environment {
  VehiclePlant plant;
  IdmParams idm;
  RewardWeights weights;
  RewardNorms norms;
  double dt = 0.2;
  double shift_cost = 0.05;
  double fuel_density = 0.85;
  double collision_penalty = 0.0;  // added to the reward of the step that ends in a collision

  static Environment from_config(const RunConfig& cfg);
};

struct EpisodeHooks {
  /// Receives each learner transition (stochastic mode only).
  std::function<void(const mpo::Transition&)> on_transition;
  /// Called after every plant step.
  std::function<void()> after_step;
  /// Stop (without a terminal flag) after this many steps; negative runs the whole cycle.
  long max_steps = -1;
};

struct EpisodeResult {
  std::vector<StepRecord> steps;
  Metrics metrics;
  bool collided = false;
  std::string collision;  // message when collided
  bool metrics_valid = false;
};

/// Simulates the ego behind a lead driving `cycle`, at dt for the whole
/// cycle duration. The ego starts at the lead's initial speed, at the IDM
/// equilibrium gap, in the lowest admissible gear. A collision ends the
/// episode early and is reported in the result. Non-finite states throw.
EpisodeResult run_episode(const Environment& env, const Agent& agent, const DriveCycle& cycle, ActMode mode,
                          std::mt19937_64& rng, const EpisodeHooks& hooks = {});

}  // namespace ecodrive

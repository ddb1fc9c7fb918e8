#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecodrive/driver_idm.hpp"
#include "ecodrive/hybrid_policy.hpp"
#include "ecodrive/mpo/mpo_learner.hpp"
#include "ecodrive/reward.hpp"
#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive {

enum class AgentKind { kBaseline, kRl, kRpl };

AgentKind parse_agent_kind(const std::string& name);
std::string to_string(AgentKind kind);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs. Defaults are the reference settings; every field
/// has a key in the flat config format (see config_keys()).
struct RunConfig {
  AgentKind agent = AgentKind::kBaseline;
  std::uint64_t seed = 0;
  std::string cycle;           // drive cycle CSV; empty selects the bundled one
  std::string powertrain_dir;  // empty selects the bundled dataset

  // vehicle and driver
  double mass = 9070.0;
  double frontal_area = 7.71;
  double drag_coeff = 0.8;
  double rolling_coeff = 0.015;
  double wheel_radius = 0.498;
  double dt = 0.2;
  double a_max = 2.0;
  double headway_time = 3.0;
  double desired_speed = 30.0;
  double comfort_decel = 1.5;
  double jam_distance = 4.0;
  double accel_exponent = 4.0;
  double max_decel = 3.0;
  double shift_cost = 0.05;

  // reward
  double w_accel = 1.0;
  double w_torque = 0.1;
  double w_fuel = 0.5;
  double w_gear = 0.05;
  double w_reserve = 0.1;
  double max_accel_error = 2.0;

  // learner
  double actor_lr = 5e-5;
  double critic_lr = 1e-4;
  double gamma = 0.99;
  double lambda = 0.9;
  double beta = 0.1;
  int retrace_steps = 15;
  double kl_mean = 0.1;
  double kl_std = 0.001;
  double kl_gear = 0.1;
  double kl_estep = 0.1;
  int batch_size = 3072;
  int action_samples = 40;
  int critic_updates = 10;
  int policy_updates = 5;
  int learn_every = 250;
  int target_period = 200;
  int actor_target_period = 100;
  double dual_lr = 0.01;
  int hidden_layers = 3;
  int hidden_units = 256;
  std::string activation = "elu";
  double output_init_scale = 0.01;
  double gate_decay = 0.99;
  int gate_warmup = 1000;   // critic updates ignored by the gate
  double residual_range = 0.1;  // fraction of T_max
  double sigma_min = 0.01;      // fraction of the torque range
  double sigma_max = 0.5;
  double init_sigma = 0.1;      // fraction of the torque range at initialization
  double init_hold_logit = 2.5;
  long buffer_capacity = 1L << 20;

  // protocol
  int train_cycles = 300;
  int eval_reps = 25;
  double noise_amplitude = 1.5;
  double noise_period = 60.0;
  double fuel_density = 0.85;  // g/mL
  int checkpoint_every = 50;

  void validate() const;

  VehicleParams vehicle_params() const;
  IdmParams idm_params() const;
  RewardWeights reward_weights() const;
  mpo::MpoConfig mpo_config() const;
};

/// Keys accepted by the flat config format, in canonical order.
std::vector<std::string> config_keys();

/// Applies one "key=value" assignment. Throws ConfigError for unknown keys or
/// malformed values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses "key = value" lines; blank lines and '#' comments are ignored.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form, one "key = value" per line in config_keys() order.
/// Parsing it reproduces the same RunConfig.
std::string serialize_config(const RunConfig& cfg);

std::map<std::string, std::string> config_map(const RunConfig& cfg);

}  // namespace ecodrive

#include "ecodrive/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace ecodrive {
namespace {

template <class Cfg, class F>
void visit_fields(Cfg& c, F&& f) {
  f("agent", c.agent);
  f("seed", c.seed);
  f("cycle", c.cycle);
  f("powertrain_dir", c.powertrain_dir);
  f("mass", c.mass);
  f("frontal_area", c.frontal_area);
  f("drag_coeff", c.drag_coeff);
  f("rolling_coeff", c.rolling_coeff);
  f("wheel_radius", c.wheel_radius);
  f("dt", c.dt);
  f("a_max", c.a_max);
  f("headway_time", c.headway_time);
  f("desired_speed", c.desired_speed);
  f("comfort_decel", c.comfort_decel);
  f("jam_distance", c.jam_distance);
  f("accel_exponent", c.accel_exponent);
  f("max_decel", c.max_decel);
  f("shift_cost", c.shift_cost);
  f("w_accel", c.w_accel);
  f("w_torque", c.w_torque);
  f("w_fuel", c.w_fuel);
  f("w_gear", c.w_gear);
  f("w_reserve", c.w_reserve);
  f("max_accel_error", c.max_accel_error);
  f("actor_lr", c.actor_lr);
  f("critic_lr", c.critic_lr);
  f("gamma", c.gamma);
  f("lambda", c.lambda);
  f("beta", c.beta);
  f("retrace_steps", c.retrace_steps);
  f("kl_mean", c.kl_mean);
  f("kl_std", c.kl_std);
  f("kl_gear", c.kl_gear);
  f("kl_estep", c.kl_estep);
  f("batch_size", c.batch_size);
  f("action_samples", c.action_samples);
  f("critic_updates", c.critic_updates);
  f("policy_updates", c.policy_updates);
  f("learn_every", c.learn_every);
  f("target_period", c.target_period);
  f("actor_target_period", c.actor_target_period);
  f("dual_lr", c.dual_lr);
  f("hidden_layers", c.hidden_layers);
  f("hidden_units", c.hidden_units);
  f("activation", c.activation);
  f("output_init_scale", c.output_init_scale);
  f("gate_decay", c.gate_decay);
  f("gate_warmup", c.gate_warmup);
  f("residual_range", c.residual_range);
  f("sigma_min", c.sigma_min);
  f("sigma_max", c.sigma_max);
  f("init_sigma", c.init_sigma);
  f("init_hold_logit", c.init_hold_logit);
  f("buffer_capacity", c.buffer_capacity);
  f("train_cycles", c.train_cycles);
  f("eval_reps", c.eval_reps);
  f("noise_amplitude", c.noise_amplitude);
  f("noise_period", c.noise_period);
  f("fuel_density", c.fuel_density);
  f("checkpoint_every", c.checkpoint_every);
}

template <class T>
T parse_scalar(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError("bad value '" + text + "' for key '" + key + "'");
  return value;
}

template <class T>
void assign(const std::string& key, T& field, const std::string& value) {
  if constexpr (std::is_same_v<T, std::string>) {
    field = value;
  } else if constexpr (std::is_same_v<T, AgentKind>) {
    try {
      field = parse_agent_kind(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    field = parse_scalar<T>(key, value);
  }
}

template <class T>
std::string format(const T& field) {
  if constexpr (std::is_same_v<T, std::string>) {
    return field;
  } else if constexpr (std::is_same_v<T, AgentKind>) {
    return to_string(field);
  } else {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, field);
    return std::string(buf, ptr);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "baseline") return AgentKind::kBaseline;
  if (name == "rl") return AgentKind::kRl;
  if (name == "rpl") return AgentKind::kRpl;
  throw std::invalid_argument("unknown agent '" + name + "' (expected baseline, rl or rpl)");
}

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kBaseline: return "baseline";
    case AgentKind::kRl: return "rl";
    case AgentKind::kRpl: return "rpl";
  }
  return "?";
}

std::vector<std::string> config_keys() {
  RunConfig c;
  std::vector<std::string> keys;
  visit_fields(c, [&](const char* k, auto&) { keys.emplace_back(k); });
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  bool found = false;
  visit_fields(cfg, [&](const char* k, auto& field) {
    if (key == k) {
      assign(key, field, value);
      found = true;
    }
  });
  if (!found) throw ConfigError("unknown config key '" + key + "'");
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  std::string out;
  bool found = false;
  visit_fields(const_cast<RunConfig&>(cfg), [&](const char* k, auto& field) {
    if (key == k) {
      out = format(field);
      found = true;
    }
  });
  if (!found) throw ConfigError("unknown config key '" + key + "'");
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  visit_fields(const_cast<RunConfig&>(cfg), [&](const char* k, auto& field) {
    out += k;
    out += " = ";
    out += format(field);
    out += '\n';
  });
  return out;
}

std::map<std::string, std::string> config_map(const RunConfig& cfg) {
  std::map<std::string, std::string> m;
  visit_fields(const_cast<RunConfig&>(cfg), [&](const char* k, auto& field) { m[k] = format(field); });
  return m;
}

void RunConfig::validate() const {
  require(mass > 0 && frontal_area > 0 && drag_coeff >= 0 && rolling_coeff >= 0 && wheel_radius > 0,
          "vehicle parameters must be positive");
  require(dt > 0 && dt <= 1.0, "dt must be in (0, 1]");
  require(a_max > 0 && headway_time > 0 && desired_speed > 0 && comfort_decel > 0 && jam_distance >= 0 &&
              accel_exponent > 0 && max_decel > 0,
          "driver parameters must be positive");
  require(shift_cost >= 0, "shift_cost must be >= 0");
  require(w_accel >= 0 && w_torque >= 0 && w_fuel >= 0 && w_gear >= 0 && w_reserve >= 0,
          "reward weights must be >= 0");
  require(max_accel_error > 0, "max_accel_error must be > 0");
  require(beta > 0, "beta must be > 0");
  require(gate_decay >= 0 && gate_decay < 1, "gate_decay must be in [0, 1)");
  require(gate_warmup >= 0, "gate_warmup must be >= 0");
  require(learn_every >= 1, "learn_every must be >= 1");
  require(hidden_layers >= 0 && hidden_units >= 1, "network size must be positive");
  require(residual_range > 0, "residual_range must be > 0");
  require(sigma_min > 0 && sigma_max > sigma_min, "need 0 < sigma_min < sigma_max");
  require(init_sigma > sigma_min && init_sigma < sigma_max, "init_sigma must lie strictly between sigma bounds");
  require(output_init_scale > 0, "output_init_scale must be > 0");
  require(buffer_capacity >= retrace_steps, "buffer_capacity must hold at least one window");
  require(train_cycles >= 0 && eval_reps >= 1, "train_cycles >= 0 and eval_reps >= 1 required");
  require(noise_amplitude >= 0 && noise_period > 0, "noise amplitude must be >= 0 and period > 0");
  require(fuel_density > 0, "fuel_density must be > 0");
  require(checkpoint_every >= 0, "checkpoint_every must be >= 0");
  try {
    (void)nn::parse_activation(activation);
    mpo_config().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

VehicleParams RunConfig::vehicle_params() const {
  VehicleParams p;
  p.mass = mass;
  p.frontal_area = frontal_area;
  p.drag_coeff = drag_coeff;
  p.rolling_coeff = rolling_coeff;
  p.wheel_radius = wheel_radius;
  return p;
}

IdmParams RunConfig::idm_params() const {
  IdmParams p;
  p.desired_speed = desired_speed;
  p.headway_time = headway_time;
  p.max_accel = a_max;
  p.comfort_decel = comfort_decel;
  p.accel_exponent = accel_exponent;
  p.jam_distance = jam_distance;
  p.max_decel = max_decel;
  return p;
}

RewardWeights RunConfig::reward_weights() const { return {w_accel, w_torque, w_fuel, w_gear, w_reserve}; }

mpo::MpoConfig RunConfig::mpo_config() const {
  mpo::MpoConfig m;
  m.gamma = gamma;
  m.lambda = lambda;
  m.retrace_steps = retrace_steps;
  m.batch_size = batch_size;
  m.action_samples = action_samples;
  m.actor_lr = actor_lr;
  m.critic_lr = critic_lr;
  m.kl = {kl_estep, kl_mean, kl_std, kl_gear};
  m.critic_updates = critic_updates;
  m.policy_updates = policy_updates;
  m.target_period = target_period;
  m.actor_target_period = actor_target_period;
  m.dual_lr = dual_lr;
  return m;
}

}  // namespace ecodrive

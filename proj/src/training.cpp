#include "ecodrive/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ecodrive/nn/checkpoint.hpp"
#include "ecodrive/powertrain_io.hpp"

namespace ecodrive {

std::filesystem::path bundled_cycle_path() { return bundled_data_dir() / "cycles" / "synthetic_urban.csv"; }

DriveCycle config_cycle(const RunConfig& cfg) {
  return load_cycle(cfg.cycle.empty() ? bundled_cycle_path() : std::filesystem::path(cfg.cycle));
}

nlohmann::json checkpoint_json(const RunConfig& cfg, const Agent& agent, int cycles_trained) {
  nlohmann::json j;
  j["config"] = config_map(cfg);
  j["cycles_trained"] = cycles_trained;
  j["agent"] = agent.to_json();
  return j;
}

LoadedCheckpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    RunConfig cfg;
    for (const auto& [key, value] : j.at("config").items()) set_config_value(cfg, key, value.get<std::string>());
    cfg.validate();
    const Environment env = Environment::from_config(cfg);
    Agent agent = Agent::from_json(j.at("agent"), cfg, env.norms.max_torque);
    return {cfg, std::move(agent), j.at("cycles_trained").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw nn::CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(nn::read_json_file(path));
}

TrainResult train(const RunConfig& cfg, const DriveCycle& cycle, const TrainOptions& options) {
  cfg.validate();
  const Environment env = Environment::from_config(cfg);
  TrainResult result{Agent(cfg, env.norms.max_torque), {}, {}, std::nullopt, std::nullopt, 0};
  Agent& agent = result.agent;

  std::mt19937_64 noise_rng = make_rng(cfg.seed, Stream::kNoise);
  std::mt19937_64 actor_rng = make_rng(cfg.seed, Stream::kActor);
  std::mt19937_64 learner_rng = make_rng(cfg.seed, Stream::kLearner);
  const NoisePolicy noise{cfg.noise_amplitude, cfg.noise_period};

  std::optional<mpo::ReplayBuffer> buffer;
  if (agent.learns()) {
    buffer.emplace(static_cast<std::size_t>(cfg.buffer_capacity), agent.observation_size());
    buffer->set_window(cfg.retrace_steps);
  }

  const auto steps_per_cycle = static_cast<long>(std::llround(cycle.duration() / cfg.dt));
  for (int c = 1; c <= cfg.train_cycles; ++c) {
    const DriveCycle perturbed = perturb_cycle(cycle, noise, noise_rng);
    double loss_sum = 0.0;
    int loss_count = 0;
    int policy_updates = 0;

    EpisodeHooks hooks;
    if (buffer) hooks.on_transition = [&](const mpo::Transition& t) { buffer->push(t); };
    hooks.after_step = [&] {
      ++result.env_steps;
      if (!agent.learns() || result.env_steps % cfg.learn_every != 0) return;
      const mpo::LearnStats stats = agent.learner().learn(
          *buffer, learner_rng,
          [&](double loss) {
            const bool was_active = agent.gate().active;
            if (agent.learner().critic_steps() > cfg.gate_warmup) agent.gate() = gate_update(agent.gate(), loss);
            if (!was_active && agent.gate().active) {
              result.gate_cycle = c;
              result.gate_step = result.env_steps;
            }
            loss_sum += loss;
            ++loss_count;
          },
          [&] { return agent.policy_updates_enabled(); });
      policy_updates += stats.policy_updates;
    };

    // A collision restarts the route; the cycle ends once a full route's worth of steps is used.
    bool collided = false;
    for (long used = 0; used < steps_per_cycle;) {
      if (buffer) buffer->begin_episode();
      hooks.max_steps = steps_per_cycle - used;
      const EpisodeResult training = run_episode(env, agent, perturbed, ActMode::kStochastic, actor_rng, hooks);
      if (options.on_training_episode) options.on_training_episode(c, training);
      used += std::max<long>(1, static_cast<long>(training.steps.size()));
      collided = collided || training.collided;
      if (!training.collided) break;
    }

    std::mt19937_64 unused = make_rng(cfg.seed, Stream::kEvaluation);
    EpisodeResult eval = run_episode(env, agent, cycle, ActMode::kGreedy, unused);

    CurveRow row;
    row.cycle = c;
    row.metrics = eval.metrics;
    row.gate_active = agent.gate().active;
    row.train_collided = collided;
    row.eval_collided = eval.collided || !eval.metrics_valid;
    row.critic_loss = loss_count > 0 ? loss_sum / loss_count : std::numeric_limits<double>::quiet_NaN();
    row.policy_updates = policy_updates;
    result.curve.push_back(row);
    if (options.on_cycle) options.on_cycle(row);

    if (!options.checkpoint_dir.empty() && cfg.checkpoint_every > 0 && c % cfg.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "cycle_%04d.json", c);
      nn::write_json_file(options.checkpoint_dir / name, checkpoint_json(cfg, agent, c));
    }
    if (c == cfg.train_cycles) result.final_eval = std::move(eval);
  }
  if (cfg.train_cycles == 0) {
    std::mt19937_64 unused = make_rng(cfg.seed, Stream::kEvaluation);
    result.final_eval = run_episode(env, agent, cycle, ActMode::kGreedy, unused);
  }
  return result;
}

}  // namespace ecodrive

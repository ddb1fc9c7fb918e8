#include "ecodrive/episode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ecodrive/powertrain_io.hpp"
#include "ecodrive/source_policy.hpp"

namespace ecodrive {

Environment Environment::from_config(const RunConfig& cfg) {
  Powertrain pt = cfg.powertrain_dir.empty() ? bundled_powertrain() : load_powertrain(cfg.powertrain_dir);
  Environment env{VehiclePlant(cfg.vehicle_params(), std::move(pt)), cfg.idm_params(), cfg.reward_weights(), {},
                  cfg.dt, cfg.shift_cost, cfg.fuel_density};
  env.norms = reward_norms(env.plant, cfg.max_accel_error);
  // Worst per-step reward for the rest of the discounted horizon.
  const RewardWeights& w = env.weights;
  env.collision_penalty = -(w.accel + w.torque + w.fuel + w.gear + w.reserve) / (1.0 - cfg.gamma);
  env.idm.validate();
  return env;
}

namespace {

struct Pending {
  Eigen::VectorXd state;
  PolicySample sample;
  double reward = 0.0;
};

}  // namespace

EpisodeResult run_episode(const Environment& env, const Agent& agent, const DriveCycle& cycle, ActMode mode,
                          std::mt19937_64& rng, const EpisodeHooks& hooks) {
  EpisodeResult out;
  const auto n_steps = static_cast<long>(std::llround(cycle.duration() / env.dt));
  if (n_steps <= 0) throw std::invalid_argument("run_episode: cycle shorter than one step");
  const VehiclePlant& plant = env.plant;

  const auto lead0 = lead_trajectory(cycle, 0.0);
  PlantState state = plant.initial_state(lead0->velocity, lead0->position - initial_gap(lead0->velocity, env.idm));
  out.steps.reserve(static_cast<std::size_t>(n_steps));

  const long last = hooks.max_steps >= 0 ? std::min(n_steps, hooks.max_steps) : n_steps;
  std::optional<Pending> pending;
  const bool learn = mode == ActMode::kStochastic && agent.learns() && hooks.on_transition;

  for (long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * env.dt;
    const LeadState lead = lead_trajectory(cycle, std::min(t, cycle.duration())).value();
    double a_des = 0.0;
    try {
      a_des = desired_acceleration(state.velocity, lead.position - state.position, lead.velocity, env.idm);
    } catch (const CollisionError& e) {
      out.collided = true;
      out.collision = e.what();
      if (pending) {
        mpo::Transition tr;
        tr.state = pending->state;
        tr.torque = pending->sample.torque_norm;
        tr.gear_index = pending->sample.gear_index;
        tr.behavior_logprob_torque = pending->sample.logprob_torque;
        tr.behavior_prob_gear = pending->sample.prob_gear;
        tr.reward = pending->reward + env.collision_penalty;
        tr.next_state = std::move(pending->state);
        tr.done = true;
        hooks.on_transition(tr);
      }
      break;
    }
    const SourceAction source = source_action(a_des, state, plant, env.shift_cost);

    if (pending) {
      mpo::Transition tr;
      tr.state = std::move(pending->state);
      tr.torque = pending->sample.torque_norm;
      tr.gear_index = pending->sample.gear_index;
      tr.behavior_logprob_torque = pending->sample.logprob_torque;
      tr.behavior_prob_gear = pending->sample.prob_gear;
      tr.reward = pending->reward;
      tr.next_state = agent.observe(state, a_des, source);
      tr.done = false;
      hooks.on_transition(tr);
      pending.reset();
    }
    if (k == last) break;

    const ActDecision d = agent.act(state, a_des, source, mode, rng);
    const StepResult r = plant.step(state, d.applied.torque, d.applied.gear_cmd, env.dt);
    const PlantState& next = r.state;
    if (!std::isfinite(next.velocity) || !std::isfinite(next.position) || !std::isfinite(r.fuel_rate)) {
      throw std::runtime_error("run_episode: non-finite plant state at t = " + std::to_string(t));
    }

    const PowerReserve pr = plant.power_reserve(next.velocity, next.gear, r.engine_power);
    RewardInputs in;
    in.desired_accel = a_des;
    in.next_accel = r.acceleration;
    in.torque = r.wheel_torque;
    in.next_fuel_rate = r.fuel_rate;
    in.prev_gear = state.gear;
    in.next_gear = next.gear;
    in.next_reserve = pr.reserve;
    in.next_max_reserve = pr.max_reserve;
    const double rew = reward(in, env.weights, env.norms);

    StepRecord rec;
    rec.time = t;
    rec.lead_position = lead.position;
    rec.lead_speed = lead.velocity;
    rec.next_lead_position = cycle.position_at(std::min(t + env.dt, cycle.duration()));
    rec.position = state.position;
    rec.next_position = next.position;
    rec.speed = state.velocity;
    rec.accel = state.acceleration;
    rec.desired_accel = a_des;
    rec.next_accel = r.acceleration;
    rec.gear = state.gear;
    rec.next_gear = next.gear;
    rec.gear_cmd = d.applied.gear_cmd;
    rec.torque = r.wheel_torque;
    rec.source_torque = source.torque;
    rec.source_gear_cmd = source.gear_cmd;
    rec.engine_speed = state.engine_speed;
    rec.fuel_rate = r.fuel_rate;
    rec.fuel_used = next.fuel_used;
    rec.reward = rew;
    rec.residual_applied = d.residual_applied;
    out.steps.push_back(rec);

    if (learn && d.sample) pending = Pending{d.observation, *d.sample, rew};
    state = next;
    if (hooks.after_step) hooks.after_step();
  }

  if (!out.steps.empty()) {
    try {
      out.metrics = compute_metrics(out.steps, env.dt, env.fuel_density);
      out.metrics_valid = true;
    } catch (const MetricsError&) {
      out.metrics_valid = false;
    }
  }
  return out;
}

}  // namespace ecodrive

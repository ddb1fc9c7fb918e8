#include "ecodrive/agent.hpp"

#include "ecodrive/nn/checkpoint.hpp"

namespace ecodrive {

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const auto s = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace {

std::vector<int> layer_widths(int in, const RunConfig& cfg, int out) {
  std::vector<int> w{in};
  for (int i = 0; i < cfg.hidden_layers; ++i) w.push_back(cfg.hidden_units);
  w.push_back(out);
  return w;
}

}  // namespace

Agent::Agent(const RunConfig& cfg, double max_wheel_torque) : kind_(cfg.agent) {
  norms_.speed = 30.0;
  norms_.accel = cfg.a_max;
  norms_.torque = max_wheel_torque;
  norms_.validate();
  gate_.threshold = cfg.beta;
  gate_.decay = cfg.gate_decay;
  if (!learns()) return;

  HeadConfig head;
  head.torque_range = (kind_ == AgentKind::kRpl ? cfg.residual_range : 1.0) * max_wheel_torque;
  head.sigma_min_frac = cfg.sigma_min;
  head.sigma_max_frac = cfg.sigma_max;
  const PolicyHeads heads(head);

  const nn::Activation act = nn::parse_activation(cfg.activation);
  const int obs = observation_size();
  std::mt19937_64 init = make_rng(cfg.seed, Stream::kInit);
  nn::Mlp actor(layer_widths(obs, cfg, kHeadOutputs), act);
  actor.initialize(init, cfg.output_init_scale);
  const int last = actor.num_layers() - 1;
  actor.bias(last)[1] += heads.std_preactivation(cfg.init_sigma);
  actor.bias(last)[2 + gear_index(0)] += cfg.init_hold_logit;
  nn::Mlp critic(layer_widths(obs + mpo::kActionFeatures, cfg, 1), act);
  critic.initialize(init, 1.0);
  learner_.emplace(cfg.mpo_config(), heads, std::move(actor), std::move(critic));
}

Eigen::VectorXd Agent::observe(const PlantState& plant, double desired_accel, const SourceAction& source) const {
  return encode_state(plant, desired_accel, uses_source_features() ? std::optional(source) : std::nullopt, norms_);
}

ActDecision Agent::act(const PlantState& plant, double desired_accel, const SourceAction& source, ActMode mode,
                       std::mt19937_64& rng) const {
  ActDecision d;
  if (!learns()) {
    d.applied = {source.torque, source.gear_cmd};
    return d;
  }
  d.observation = observe(plant, desired_accel, source);
  HybridAction policy_action;
  if (mode == ActMode::kStochastic && kind_ == AgentKind::kRpl && !gate_.active) {
    // The plant gets the source action, so the learner records a zero residual.
    PolicySample zero;
    zero.logprob_torque = mpo::kPointMassLogProb;
    zero.prob_gear = 1.0;
    d.sample = zero;
    policy_action = zero.action;
  } else if (mode == ActMode::kStochastic) {
    d.sample = learner().heads().sample(learner().policy(d.observation), rng);
    policy_action = d.sample->action;
  } else {
    policy_action = learner().heads().mode(learner().policy(d.observation));
  }
  if (kind_ == AgentKind::kRl) {
    d.applied = policy_action;
  } else {
    d.applied = mix_actions(source, policy_action, gate_);
    d.residual_applied = gate_.active;
  }
  return d;
}

bool Agent::policy_updates_enabled() const {
  if (kind_ == AgentKind::kRl) return true;
  if (kind_ == AgentKind::kRpl) return gate_.active;
  return false;
}

nlohmann::json Agent::to_json() const {
  nlohmann::json j;
  j["format"] = "ecodrive-checkpoint";
  j["version"] = 1;
  j["agent"] = to_string(kind_);
  j["gate"] = {{"threshold", gate_.threshold}, {"decay", gate_.decay}, {"ema", gate_.ema},
               {"has_ema", gate_.has_ema},      {"active", gate_.active}};
  if (learner_) {
    const auto& l = *learner_;
    j["learner"] = {{"actor", nn::mlp_to_json(l.actor())},
                    {"critic", nn::mlp_to_json(l.critic())},
                    {"target_critic", nn::mlp_to_json(l.target_critic())},
                    {"reference_actor", nn::mlp_to_json(l.reference_actor())},
                    {"actor_optimizer", nn::adam_to_json(l.actor_optimizer())},
                    {"critic_optimizer", nn::adam_to_json(l.critic_optimizer())},
                    {"duals",
                     {{"eta", l.duals().eta},
                      {"alpha_mean", l.duals().alpha_mean},
                      {"alpha_std", l.duals().alpha_std},
                      {"alpha_gear", l.duals().alpha_gear}}},
                    {"critic_steps", l.critic_steps()},
                    {"policy_steps", l.policy_steps()}};
  }
  return j;
}

Agent Agent::from_json(const nlohmann::json& j, const RunConfig& cfg, double max_wheel_torque) {
  try {
    if (j.at("format") != "ecodrive-checkpoint" || j.at("version") != 1) {
      throw nn::CheckpointError("unsupported checkpoint format");
    }
    if (parse_agent_kind(j.at("agent").get<std::string>()) != cfg.agent) {
      throw nn::CheckpointError("checkpoint agent kind does not match its config");
    }
    Agent a(cfg, max_wheel_torque);
    const auto& g = j.at("gate");
    a.gate_.threshold = g.at("threshold").get<double>();
    a.gate_.decay = g.at("decay").get<double>();
    a.gate_.ema = g.at("ema").get<double>();
    a.gate_.has_ema = g.at("has_ema").get<bool>();
    a.gate_.active = g.at("active").get<bool>();
    if (a.learner_) {
      const auto& l = j.at("learner");
      const auto& d = l.at("duals");
      mpo::DualVars duals{d.at("eta").get<double>(), d.at("alpha_mean").get<double>(), d.at("alpha_std").get<double>(),
                          d.at("alpha_gear").get<double>()};
      a.learner_->restore(nn::mlp_from_json(l.at("actor")), nn::mlp_from_json(l.at("critic")),
                          nn::mlp_from_json(l.at("target_critic")), nn::mlp_from_json(l.at("reference_actor")),
                          nn::adam_from_json(l.at("actor_optimizer")), nn::adam_from_json(l.at("critic_optimizer")),
                          duals, l.at("critic_steps").get<long>(), l.at("policy_steps").get<long>());
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw nn::CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw nn::CheckpointError(std::string("checkpoint does not fit its config: ") + e.what());
  }
}

bool Agent::operator==(const Agent& o) const {
  if (kind_ != o.kind_ || !(gate_ == o.gate_) || learner_.has_value() != o.learner_.has_value()) return false;
  if (!learner_) return true;
  const auto& a = *learner_;
  const auto& b = *o.learner_;
  return a.actor() == b.actor() && a.critic() == b.critic() && a.target_critic() == b.target_critic() &&
         a.reference_actor() == b.reference_actor() && a.actor_optimizer() == b.actor_optimizer() &&
         a.critic_optimizer() == b.critic_optimizer() && a.duals() == b.duals() &&
         a.critic_steps() == b.critic_steps() && a.policy_steps() == b.policy_steps();
}

}  // namespace ecodrive

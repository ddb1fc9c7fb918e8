#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <json.hpp>

#include "ecodrive/config.hpp"
#include "ecodrive/gate.hpp"
#include "ecodrive/hybrid_policy.hpp"
#include "ecodrive/mpo/mpo_learner.hpp"
#include "ecodrive/source_policy.hpp"
#include "ecodrive/state_encoder.hpp"

namespace ecodrive {

/// Independent generator per purpose, derived from the run seed.
enum class Stream : std::uint64_t { kNoise = 1, kActor = 2, kInit = 3, kLearner = 4, kEvaluation = 5 };
std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

enum class ActMode { kStochastic, kGreedy };

struct ActDecision {
  HybridAction applied;           // command sent to the plant
  Eigen::VectorXd observation;    // empty for the baseline
  std::optional<PolicySample> sample;  // learner action (the residual in rpl mode)
  bool residual_applied = false;
};

/// Baseline (source only), plain RL (policy drives the plant) or RPL (policy
/// output is a residual on the source action, gated on critic loss).
class Agent {
 public:
  Agent(const RunConfig& cfg, double max_wheel_torque);

  AgentKind kind() const { return kind_; }
  bool learns() const { return kind_ != AgentKind::kBaseline; }
  bool uses_source_features() const { return kind_ == AgentKind::kRpl; }
  int observation_size() const { return encoded_state_size(uses_source_features()); }
  const StateNorms& norms() const { return norms_; }

  ActDecision act(const PlantState& plant, double desired_accel, const SourceAction& source, ActMode mode,
                  std::mt19937_64& rng) const;
  Eigen::VectorXd observe(const PlantState& plant, double desired_accel, const SourceAction& source) const;

  mpo::MpoLearner& learner() { return learner_.value(); }
  const mpo::MpoLearner& learner() const { return learner_.value(); }
  GateState& gate() { return gate_; }
  const GateState& gate() const { return gate_; }

  /// Whether policy (M-step) updates may run: always for rl, after the gate
  /// opens for rpl.
  bool policy_updates_enabled() const;

  nlohmann::json to_json() const;
  /// Rebuilds an agent; the embedded config must match `cfg` in network shape.
  static Agent from_json(const nlohmann::json& j, const RunConfig& cfg, double max_wheel_torque);

  bool operator==(const Agent& other) const;

 private:
  AgentKind kind_;
  StateNorms norms_;
  std::optional<mpo::MpoLearner> learner_;
  GateState gate_;
};

}  // namespace ecodrive

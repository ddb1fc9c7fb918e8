#pragma once

#include <functional>
#include <random>
#include <vector>

#include "ecodrive/hybrid_policy.hpp"
#include "ecodrive/mpo/e_step.hpp"
#include "ecodrive/mpo/m_step.hpp"
#include "ecodrive/mpo/replay_buffer.hpp"
#include "ecodrive/nn/adam.hpp"
#include "ecodrive/nn/mlp.hpp"

namespace ecodrive::mpo {

struct MpoConfig {
  double gamma = 0.99;
  double lambda = 0.9;
  int retrace_steps = 15;
  int batch_size = 3072;      // transitions per update
  int action_samples = 40;    // M
  double actor_lr = 5e-5;
  double critic_lr = 1e-4;
  KlBudget kl;
  int critic_updates = 10;    // per learner invocation
  int policy_updates = 5;
  int target_period = 200;    // critic updates between target copies
  int actor_target_period = 100;  // policy updates between reference-policy copies
  double dual_lr = 0.01;
  TemperatureBracket bracket;

  void validate() const;
  int segments_per_batch() const { return std::max(1, batch_size / retrace_steps); }
};

/// Critic input: state followed by [torque, one-hot gear index].
inline constexpr int kActionFeatures = 1 + kNumGearCommands;
Eigen::MatrixXd critic_inputs(const Eigen::Ref<const Eigen::MatrixXd>& states, const Eigen::VectorXd& torques,
                              const Eigen::VectorXi& gears);

struct LearnStats {
  std::vector<double> critic_losses;  // pre-step loss of each critic update
  int policy_updates = 0;
  double eta = 0.0;
  HeadKl kl_to_reference;
};

/// Owns the actor, critic, their targets and optimizers, and performs the
/// critic (Retrace) and policy (E-step + M-step) updates.
class MpoLearner {
 public:
  MpoLearner() = default;
  MpoLearner(MpoConfig cfg, PolicyHeads heads, nn::Mlp actor, nn::Mlp critic);

  const MpoConfig& config() const { return cfg_; }
  const PolicyHeads& heads() const { return heads_; }
  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  const nn::Mlp& target_critic() const { return target_critic_; }
  const nn::Mlp& reference_actor() const { return reference_actor_; }
  const nn::AdamState& actor_optimizer() const { return actor_opt_; }
  const nn::AdamState& critic_optimizer() const { return critic_opt_; }
  const DualVars& duals() const { return duals_; }
  long critic_steps() const { return critic_steps_; }
  long policy_steps() const { return policy_steps_; }

  /// Restores every piece of learner state (checkpoint loading).
  void restore(nn::Mlp actor, nn::Mlp critic, nn::Mlp target_critic, nn::Mlp reference_actor, nn::AdamState actor_opt,
               nn::AdamState critic_opt, DualVars duals, long critic_steps, long policy_steps);

  PolicyDist policy(const Eigen::Ref<const Eigen::VectorXd>& state) const;

  /// Retrace targets for a batch of segments using the target critic and
  /// the current policy.
  std::vector<std::vector<double>> targets(const std::vector<Segment>& segments, std::mt19937_64& rng) const;

  /// One critic step towards the Retrace targets; returns the pre-step loss.
  double critic_update(const std::vector<Segment>& segments, std::mt19937_64& rng);

  /// E-step on the batch states followed by one M-step.
  MStepStats policy_update(const Eigen::MatrixXd& states, std::mt19937_64& rng, double* eta = nullptr);

  /// Full learner invocation. Returns nullopt-equivalent (empty stats) when
  /// the buffer has no complete window. `on_critic_loss` sees each loss as
  /// it is produced; `policy_enabled` is consulted before each policy update.
  LearnStats learn(const ReplayBuffer& buffer, std::mt19937_64& rng,
                   const std::function<void(double)>& on_critic_loss = {},
                   const std::function<bool()>& policy_enabled = {});

 private:
  MpoConfig cfg_;
  PolicyHeads heads_;
  nn::Mlp actor_;
  nn::Mlp critic_;
  nn::Mlp target_critic_;
  nn::Mlp reference_actor_;
  nn::AdamState actor_opt_;
  nn::AdamState critic_opt_;
  DualVars duals_;
  long critic_steps_ = 0;
  long policy_steps_ = 0;
};

}  // namespace ecodrive::mpo

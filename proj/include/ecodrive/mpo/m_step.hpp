#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ecodrive/hybrid_policy.hpp"
#include "ecodrive/nn/adam.hpp"
#include "ecodrive/nn/mlp.hpp"

namespace ecodrive::mpo {

struct KlBudget {
  double e_step = 0.1;  // epsilon of the temperature dual
  double mean = 0.1;    // epsilon_mu
  double std = 0.001;   // epsilon_sigma
  double gear = 0.1;    // epsilon_d

  void validate() const;
};

struct DualVars {
  double eta = 1.0;
  double alpha_mean = 0.0;
  double alpha_std = 0.0;
  double alpha_gear = 0.0;

  bool operator==(const DualVars&) const = default;
};

struct HeadKl {
  double mean = 0.0;
  double std = 0.0;
  double gear = 0.0;
};

/// Sampled actions and E-step weights for B states and M samples each.
struct MStepBatch {
  Eigen::MatrixXd states;   // state_dim x B
  Eigen::MatrixXd torques;  // B x M, normalized
  Eigen::MatrixXi gears;    // B x M, indices 0..2
  Eigen::MatrixXd weights;  // B x M, rows sum to 1
};

struct MStepStats {
  HeadKl kl_to_reference;  // after the update, against the reference policy
  HeadKl kl_step;          // after the update, against the policy before it
  double weighted_loglik = 0.0;
  double step_fraction = 1.0;  // 1 unless the trust-region guard shortened the step
};

std::vector<PolicyDist> distributions(const nn::Mlp& actor, const PolicyHeads& heads,
                                      const Eigen::Ref<const Eigen::MatrixXd>& states);

/// Mean over states of the decoupled per-head KLs KL(reference || policy):
/// the Gaussian mean part holds the reference stddev, the stddev part holds
/// the reference mean.
HeadKl decoupled_kl(const std::vector<PolicyDist>& reference, const std::vector<PolicyDist>& policy);

/// Gradient of the M-step loss with respect to the raw head outputs
/// (5 x B). The loss is the negated, batch-averaged decoupled weighted
/// log-likelihood plus the alpha-weighted KLs to the reference.
Eigen::MatrixXd m_step_output_gradient(const std::vector<PolicyDist>& policy, const std::vector<PolicyDist>& reference,
                                       const MStepBatch& batch, const DualVars& duals, const PolicyHeads& heads);

/// Decoupled weighted log-likelihood averaged over states.
double weighted_loglik(const std::vector<PolicyDist>& policy, const std::vector<PolicyDist>& reference,
                       const MStepBatch& batch);

/// One Adam step on the actor followed by dual ascent on the alphas:
///   alpha <- max(0, alpha + dual_lr * (KL - eps) / eps).
/// If the step moves any head further than its budget from the policy
/// before the step, the parameter change is halved until it fits.
MStepStats m_step(nn::Mlp& actor, nn::AdamState& opt, const PolicyHeads& heads, const MStepBatch& batch,
                  const std::vector<PolicyDist>& reference, const KlBudget& budget, DualVars& duals, double dual_lr);

}  // namespace ecodrive::mpo

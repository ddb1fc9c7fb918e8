#include "ecodrive/mpo/m_step.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ecodrive::mpo {

void KlBudget::validate() const {
  if (!(e_step > 0 && mean > 0 && std > 0 && gear > 0)) throw std::invalid_argument("KlBudget: all bounds must be > 0");
}

std::vector<PolicyDist> distributions(const nn::Mlp& actor, const PolicyHeads& heads,
                                      const Eigen::Ref<const Eigen::MatrixXd>& states) {
  const Eigen::MatrixXd out = actor.forward(states);
  std::vector<PolicyDist> d;
  d.reserve(out.cols());
  for (Eigen::Index b = 0; b < out.cols(); ++b) d.push_back(heads.distribution(out.col(b)));
  return d;
}

HeadKl decoupled_kl(const std::vector<PolicyDist>& ref, const std::vector<PolicyDist>& pol) {
  if (ref.size() != pol.size() || ref.empty()) throw std::invalid_argument("decoupled_kl: batch mismatch");
  HeadKl kl;
  for (std::size_t b = 0; b < ref.size(); ++b) {
    const double dm = pol[b].mean - ref[b].mean;
    kl.mean += dm * dm / (2.0 * ref[b].std * ref[b].std);
    const double r = ref[b].std / pol[b].std;
    kl.std += -std::log(r) + 0.5 * r * r - 0.5;
    for (int k = 0; k < kNumGearCommands; ++k) {
      const double p = ref[b].probs[k];
      if (p > 0) kl.gear += p * (std::log(p) - std::log(pol[b].probs[k]));
    }
  }
  const double n = static_cast<double>(ref.size());
  kl.mean /= n;
  kl.std /= n;
  kl.gear /= n;
  if (!std::isfinite(kl.mean) || !std::isfinite(kl.std) || !std::isfinite(kl.gear)) {
    std::ostringstream msg;
    msg << "non-finite KL (mean " << kl.mean << ", std " << kl.std << ", gear " << kl.gear << ")";
    throw nn::NonFiniteError(msg.str());
  }
  return kl;
}

double weighted_loglik(const std::vector<PolicyDist>& pol, const std::vector<PolicyDist>& ref,
                       const MStepBatch& batch) {
  double total = 0.0;
  for (std::size_t b = 0; b < pol.size(); ++b) {
    const auto row = static_cast<Eigen::Index>(b);
    for (Eigen::Index j = 0; j < batch.weights.cols(); ++j) {
      const double a = batch.torques(row, j);
      const double ll = gaussian_log_pdf(a, pol[b].mean, ref[b].std) + gaussian_log_pdf(a, ref[b].mean, pol[b].std) +
                        std::log(pol[b].probs[batch.gears(row, j)]);
      total += batch.weights(row, j) * ll;
    }
  }
  return total / static_cast<double>(pol.size());
}

Eigen::MatrixXd m_step_output_gradient(const std::vector<PolicyDist>& pol, const std::vector<PolicyDist>& ref,
                                       const MStepBatch& batch, const DualVars& duals, const PolicyHeads& heads) {
  const auto n = static_cast<Eigen::Index>(pol.size());
  if (ref.size() != pol.size() || batch.weights.rows() != n || batch.torques.rows() != n || batch.gears.rows() != n) {
    throw std::invalid_argument("m_step: batch shape mismatch");
  }
  const double span = heads.sigma_max() - heads.sigma_min();
  Eigen::MatrixXd grad(kHeadOutputs, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const PolicyDist& p = pol[b];
    const PolicyDist& r = ref[b];
    const double var_ref = r.std * r.std;
    double d_mean = 0.0;
    double d_std = 0.0;
    std::array<double, kNumGearCommands> w{};
    for (Eigen::Index j = 0; j < batch.weights.cols(); ++j) {
      const double q = batch.weights(b, j);
      const double a = batch.torques(b, j);
      d_mean -= q * (a - p.mean) / var_ref;
      const double dev = a - r.mean;
      d_std -= q * (dev * dev / (p.std * p.std * p.std) - 1.0 / p.std);
      w[batch.gears(b, j)] += q;
    }
    d_mean += duals.alpha_mean * (p.mean - r.mean) / var_ref;
    d_std += duals.alpha_std * (1.0 / p.std - var_ref / (p.std * p.std * p.std));

    const double sig = (p.std - heads.sigma_min()) / span;
    grad(0, b) = d_mean * (1.0 - p.mean * p.mean);
    grad(1, b) = d_std * span * sig * (1.0 - sig);
    for (int k = 0; k < kNumGearCommands; ++k) {
      grad(2 + k, b) = -(w[k] - p.probs[k]) + duals.alpha_gear * (p.probs[k] - r.probs[k]);
    }
  }
  return grad / static_cast<double>(n);
}

MStepStats m_step(nn::Mlp& actor, nn::AdamState& opt, const PolicyHeads& heads, const MStepBatch& batch,
                  const std::vector<PolicyDist>& reference, const KlBudget& budget, DualVars& duals, double dual_lr) {
  budget.validate();
  nn::MlpTape tape;
  const Eigen::MatrixXd out = actor.forward(batch.states, tape);
  std::vector<PolicyDist> before;
  before.reserve(out.cols());
  for (Eigen::Index b = 0; b < out.cols(); ++b) before.push_back(heads.distribution(out.col(b)));

  const Eigen::MatrixXd head_grad = m_step_output_gradient(before, reference, batch, duals, heads);
  const Eigen::VectorXd grads = actor.backward(tape, head_grad);
  const Eigen::VectorXd start = actor.params();
  nn::adam_step(actor.params(), grads, opt);

  MStepStats stats;
  const Eigen::VectorXd delta = actor.params() - start;
  std::vector<PolicyDist> after = distributions(actor, heads, batch.states);
  stats.kl_step = decoupled_kl(before, after);
  for (int halvings = 0;
       stats.kl_step.mean > budget.mean || stats.kl_step.std > budget.std || stats.kl_step.gear > budget.gear;
       ++halvings) {
    if (halvings == 30) {
      stats.step_fraction = 0.0;
      actor.params() = start;
      after = before;
      stats.kl_step = {};
      break;
    }
    stats.step_fraction *= 0.5;
    actor.params() = start + stats.step_fraction * delta;
    after = distributions(actor, heads, batch.states);
    stats.kl_step = decoupled_kl(before, after);
  }

  stats.kl_to_reference = decoupled_kl(reference, after);
  stats.weighted_loglik = weighted_loglik(after, reference, batch);
  auto ascend = [dual_lr](double alpha, double kl, double eps) {
    return std::max(0.0, alpha + dual_lr * (kl - eps) / eps);
  };
  duals.alpha_mean = ascend(duals.alpha_mean, stats.kl_to_reference.mean, budget.mean);
  duals.alpha_std = ascend(duals.alpha_std, stats.kl_to_reference.std, budget.std);
  duals.alpha_gear = ascend(duals.alpha_gear, stats.kl_to_reference.gear, budget.gear);
  return stats;
}

}  // namespace ecodrive::mpo

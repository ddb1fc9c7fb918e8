#include "ecodrive/mpo/mpo_learner.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ecodrive/mpo/retrace.hpp"

namespace ecodrive::mpo {

void MpoConfig::validate() const {
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must be in (0, 1)");
  if (!(lambda > 0 && lambda <= 1)) throw std::invalid_argument("lambda must be in (0, 1]");
  if (retrace_steps < 1) throw std::invalid_argument("retrace_steps must be >= 1");
  if (batch_size < retrace_steps) throw std::invalid_argument("batch_size must be >= retrace_steps");
  if (action_samples < 2) throw std::invalid_argument("action_samples must be >= 2");
  if (!(actor_lr > 0 && critic_lr > 0)) throw std::invalid_argument("learning rates must be positive");
  if (critic_updates < 0 || policy_updates < 0) throw std::invalid_argument("update counts must be >= 0");
  if (target_period < 1 || actor_target_period < 1) throw std::invalid_argument("target periods must be >= 1");
  if (!(dual_lr >= 0)) throw std::invalid_argument("dual_lr must be >= 0");
  kl.validate();
}

Eigen::MatrixXd critic_inputs(const Eigen::Ref<const Eigen::MatrixXd>& states, const Eigen::VectorXd& torques,
                              const Eigen::VectorXi& gears) {
  const Eigen::Index n = states.cols();
  const Eigen::Index d = states.rows();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d + kActionFeatures, n);
  x.topRows(d) = states;
  for (Eigen::Index i = 0; i < n; ++i) {
    x(d, i) = torques[i];
    x(d + 1 + gears[i], i) = 1.0;
  }
  return x;
}

MpoLearner::MpoLearner(MpoConfig cfg, PolicyHeads heads, nn::Mlp actor, nn::Mlp critic)
    : cfg_(cfg),
      heads_(heads),
      actor_(std::move(actor)),
      critic_(std::move(critic)),
      target_critic_(nn::snapshot(critic_)),
      reference_actor_(nn::snapshot(actor_)),
      actor_opt_(actor_.num_params(), cfg.actor_lr),
      critic_opt_(critic_.num_params(), cfg.critic_lr) {
  cfg_.validate();
  if (actor_.output_size() != kHeadOutputs) throw std::invalid_argument("actor must have 5 outputs");
  if (critic_.output_size() != 1 || critic_.input_size() != actor_.input_size() + kActionFeatures) {
    throw std::invalid_argument("critic shape does not match actor state size");
  }
}

void MpoLearner::restore(nn::Mlp actor, nn::Mlp critic, nn::Mlp target_critic, nn::Mlp reference_actor,
                         nn::AdamState actor_opt, nn::AdamState critic_opt, DualVars duals, long critic_steps,
                         long policy_steps) {
  if (!(actor.widths() == actor_.widths() && reference_actor.widths() == actor_.widths() &&
        critic.widths() == critic_.widths() && target_critic.widths() == critic_.widths() &&
        actor_opt.m.size() == actor.num_params() && critic_opt.m.size() == critic.num_params())) {
    throw std::invalid_argument("restore: shapes do not match the configured networks");
  }
  actor_ = std::move(actor);
  critic_ = std::move(critic);
  target_critic_ = std::move(target_critic);
  reference_actor_ = std::move(reference_actor);
  actor_opt_ = std::move(actor_opt);
  critic_opt_ = std::move(critic_opt);
  duals_ = duals;
  critic_steps_ = critic_steps;
  policy_steps_ = policy_steps;
}

PolicyDist MpoLearner::policy(const Eigen::Ref<const Eigen::VectorXd>& state) const {
  return heads_.distribution(actor_.forward(state).col(0));
}

namespace {

struct FlatBatch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd torques;
  Eigen::VectorXi gears;
  Eigen::VectorXd behavior_logp;  // joint log-probability
  std::vector<double> rewards;
  std::vector<char> done;
};

FlatBatch flatten(const std::vector<Segment>& segments) {
  Eigen::Index n = 0;
  for (const auto& s : segments) n += static_cast<Eigen::Index>(s.steps.size());
  if (n == 0) throw std::invalid_argument("empty segment batch");
  const Eigen::Index d = segments.front().steps.front().state.size();
  FlatBatch f;
  f.states.resize(d, n);
  f.next_states.resize(d, n);
  f.torques.resize(n);
  f.gears.resize(n);
  f.behavior_logp.resize(n);
  f.rewards.resize(n);
  f.done.resize(n);
  Eigen::Index i = 0;
  for (const auto& s : segments) {
    for (const auto& t : s.steps) {
      f.states.col(i) = t.state;
      f.next_states.col(i) = t.next_state;
      f.torques[i] = t.torque;
      f.gears[i] = t.gear_index;
      f.behavior_logp[i] = t.behavior_logprob_torque + std::log(t.behavior_prob_gear);
      f.rewards[i] = t.reward;
      f.done[i] = t.done ? 1 : 0;
      ++i;
    }
  }
  return f;
}

// M samples per column of `states`: returns critic inputs (column j*M + m).
void sample_actions(const std::vector<PolicyDist>& dists, const PolicyHeads& heads, int m, std::mt19937_64& rng,
                    Eigen::MatrixXd& torques, Eigen::MatrixXi& gears) {
  const auto n = static_cast<Eigen::Index>(dists.size());
  torques.resize(n, m);
  gears.resize(n, m);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (int j = 0; j < m; ++j) {
      const PolicySample s = heads.sample(dists[b], rng);
      torques(b, j) = s.torque_norm;
      gears(b, j) = s.gear_index;
    }
  }
}

// Q(s_b, a_bj) for all samples, as a B x M matrix.
Eigen::MatrixXd evaluate_samples(const nn::Mlp& critic, const Eigen::MatrixXd& states, const Eigen::MatrixXd& torques,
                                 const Eigen::MatrixXi& gears) {
  const Eigen::Index n = states.cols();
  const Eigen::Index m = torques.cols();
  Eigen::MatrixXd rep(states.rows(), n * m);
  Eigen::VectorXd t(n * m);
  Eigen::VectorXi g(n * m);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index j = 0; j < m; ++j) {
      rep.col(b * m + j) = states.col(b);
      t[b * m + j] = torques(b, j);
      g[b * m + j] = gears(b, j);
    }
  }
  const Eigen::MatrixXd q = critic.forward(critic_inputs(rep, t, g));
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index j = 0; j < m; ++j) out(b, j) = q(0, b * m + j);
  }
  return out;
}

std::vector<PolicyDist> dists_for(const nn::Mlp& actor, const PolicyHeads& heads, const Eigen::MatrixXd& states) {
  return distributions(actor, heads, states);
}

}  // namespace

std::vector<std::vector<double>> MpoLearner::targets(const std::vector<Segment>& segments,
                                                     std::mt19937_64& rng) const {
  const FlatBatch f = flatten(segments);
  const Eigen::Index n = f.states.cols();
  const Eigen::MatrixXd q_taken = target_critic_.forward(critic_inputs(f.states, f.torques, f.gears));

  const std::vector<PolicyDist> next_dists = dists_for(actor_, heads_, f.next_states);
  Eigen::MatrixXd torques;
  Eigen::MatrixXi gears;
  sample_actions(next_dists, heads_, cfg_.action_samples, rng, torques, gears);
  const Eigen::VectorXd v_next = evaluate_samples(target_critic_, f.next_states, torques, gears).rowwise().mean();

  const std::vector<PolicyDist> cur = dists_for(actor_, heads_, f.states);
  std::vector<std::vector<double>> out;
  out.reserve(segments.size());
  Eigen::Index i = 0;
  for (const auto& seg : segments) {
    RetraceInputs in;
    for (std::size_t k = 0; k < seg.steps.size(); ++k, ++i) {
      in.q_taken.push_back(q_taken(0, i));
      in.v_next.push_back(v_next[i]);
      in.rewards.push_back(f.rewards[i]);
      in.done.push_back(f.done[i]);
      const double logp = cur[i].log_prob_torque(f.torques[i]) + cur[i].log_prob_gear(f.gears[i]);
      in.traces.push_back(truncated_trace(logp - f.behavior_logp[i], cfg_.lambda));
    }
    out.push_back(retrace_targets(in, cfg_.gamma));
  }
  (void)n;
  return out;
}

double MpoLearner::critic_update(const std::vector<Segment>& segments, std::mt19937_64& rng) {
  const std::vector<std::vector<double>> tgt = targets(segments, rng);
  const FlatBatch f = flatten(segments);
  const Eigen::Index n = f.states.cols();
  Eigen::RowVectorXd target(n);
  Eigen::Index i = 0;
  for (const auto& seg : tgt) {
    for (double v : seg) target[i++] = v;
  }
  nn::MlpTape tape;
  const Eigen::MatrixXd q = critic_.forward(critic_inputs(f.states, f.torques, f.gears), tape);
  const Eigen::RowVectorXd err = q.row(0) - target;
  const double loss = err.squaredNorm() / static_cast<double>(n);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "critic loss is non-finite after " << critic_steps_ << " updates";
    throw nn::NonFiniteError(msg.str());
  }
  const Eigen::MatrixXd out_grad = (2.0 / static_cast<double>(n)) * err;
  nn::adam_step(critic_.params(), critic_.backward(tape, out_grad), critic_opt_);
  ++critic_steps_;
  if (critic_steps_ % cfg_.target_period == 0) target_critic_ = nn::snapshot(critic_);
  return loss;
}

MStepStats MpoLearner::policy_update(const Eigen::MatrixXd& states, std::mt19937_64& rng, double* eta) {
  // Samples come from the reference policy, the centre of the decoupled fit.
  const std::vector<PolicyDist> reference = dists_for(reference_actor_, heads_, states);
  MStepBatch batch;
  batch.states = states;
  sample_actions(reference, heads_, cfg_.action_samples, rng, batch.torques, batch.gears);
  const Eigen::MatrixXd q = evaluate_samples(critic_, states, batch.torques, batch.gears);
  const EStepResult e = e_step(q, cfg_.kl.e_step, cfg_.bracket);
  batch.weights = e.weights;
  duals_.eta = e.eta;
  if (eta != nullptr) *eta = e.eta;

  MStepStats stats = m_step(actor_, actor_opt_, heads_, batch, reference, cfg_.kl, duals_, cfg_.dual_lr);
  ++policy_steps_;
  if (policy_steps_ % cfg_.actor_target_period == 0) reference_actor_ = nn::snapshot(actor_);
  return stats;
}

LearnStats MpoLearner::learn(const ReplayBuffer& buffer, std::mt19937_64& rng,
                             const std::function<void(double)>& on_critic_loss,
                             const std::function<bool()>& policy_enabled) {
  LearnStats stats;
  if (!buffer.ready() || buffer.window() != cfg_.retrace_steps) return stats;
  const auto count = static_cast<std::size_t>(cfg_.segments_per_batch());
  for (int k = 0; k < cfg_.critic_updates; ++k) {
    const auto segments = buffer.sample_segments(count, rng);
    const double loss = critic_update(*segments, rng);
    stats.critic_losses.push_back(loss);
    if (on_critic_loss) on_critic_loss(loss);
  }
  for (int k = 0; k < cfg_.policy_updates; ++k) {
    if (policy_enabled && !policy_enabled()) break;
    const auto segments = buffer.sample_segments(count, rng);
    const FlatBatch f = flatten(*segments);
    const MStepStats m = policy_update(f.states, rng, &stats.eta);
    stats.kl_to_reference = m.kl_to_reference;
    ++stats.policy_updates;
  }
  return stats;
}

}  // namespace ecodrive::mpo

#include "ecodrive/hybrid_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecodrive {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}

double gaussian_log_pdf(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return -0.5 * z * z - std::log(std) - kLogSqrt2Pi;
}

void HeadConfig::validate() const {
  if (!(torque_range > 0)) throw std::invalid_argument("HeadConfig: torque_range must be positive");
  if (!(sigma_min_frac > 0 && sigma_max_frac > sigma_min_frac)) {
    throw std::invalid_argument("HeadConfig: need 0 < sigma_min < sigma_max");
  }
}

double PolicyDist::log_prob_torque(double torque_norm) const { return gaussian_log_pdf(torque_norm, mean, std); }

double PolicyDist::log_prob_gear(int index) const { return std::log(probs.at(index)); }

int PolicyDist::mode_gear_index() const {
  int best = 1;
  if (probs[2] > probs[best]) best = 2;
  if (probs[0] > probs[best]) best = 0;
  return best;
}

PolicyHeads::PolicyHeads(HeadConfig cfg) : cfg_(cfg) { cfg_.validate(); }

PolicyDist PolicyHeads::distribution(const Eigen::Ref<const Eigen::VectorXd>& o) const {
  if (o.size() != kHeadOutputs) throw std::invalid_argument("PolicyHeads: expected 5 outputs");
  if (!o.allFinite()) throw std::domain_error("PolicyHeads: non-finite head outputs");
  PolicyDist d;
  d.mean = std::tanh(o[0]);
  const double sig = 1.0 / (1.0 + std::exp(-o[1]));
  d.std = cfg_.sigma_min_frac + (cfg_.sigma_max_frac - cfg_.sigma_min_frac) * sig;
  const double top = std::max({o[2], o[3], o[4]});
  double z = 0.0;
  for (int k = 0; k < kNumGearCommands; ++k) {
    d.logits[k] = o[2 + k];
    d.probs[k] = std::exp(o[2 + k] - top);
    z += d.probs[k];
  }
  for (double& p : d.probs) p /= z;
  return d;
}

PolicySample PolicyHeads::sample(const PolicyDist& d, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  PolicySample s;
  s.torque_norm = std::clamp(d.mean + d.std * normal(rng), -1.0, 1.0);
  const double u = uniform(rng);
  double acc = 0.0;
  s.gear_index = kNumGearCommands - 1;
  for (int k = 0; k < kNumGearCommands; ++k) {
    acc += d.probs[k];
    if (u < acc) {
      s.gear_index = k;
      break;
    }
  }
  s.logprob_torque = d.log_prob_torque(s.torque_norm);
  s.prob_gear = d.probs[s.gear_index];
  s.action = {s.torque_norm * cfg_.torque_range, gear_command(s.gear_index)};
  return s;
}

HybridAction PolicyHeads::mode(const PolicyDist& d) const {
  return {d.mean * cfg_.torque_range, gear_command(d.mode_gear_index())};
}

double PolicyHeads::std_preactivation(double std_frac) const {
  const double s = (std_frac - cfg_.sigma_min_frac) / (cfg_.sigma_max_frac - cfg_.sigma_min_frac);
  if (!(s > 0 && s < 1)) throw std::invalid_argument("std fraction outside (sigma_min, sigma_max)");
  return std::log(s / (1.0 - s));
}

}  // namespace ecodrive

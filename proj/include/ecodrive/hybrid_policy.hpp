#pragma once

#include <array>
#include <random>

#include <Eigen/Dense>

namespace ecodrive {

/// Wheel torque plus a gear command in {-1, 0, +1}.
struct HybridAction {
  double torque = 0.0;  // N*m
  int gear_cmd = 0;

  bool operator==(const HybridAction&) const = default;
};

inline constexpr int kNumGearCommands = 3;
inline int gear_index(int gear_cmd) { return gear_cmd + 1; }
inline int gear_command(int index) { return index - 1; }

/// Raw actor outputs per state: [mean, stddev, logit(-1), logit(0), logit(+1)].
inline constexpr int kHeadOutputs = 5;

struct HeadConfig {
  double torque_range = 1.0;    // N*m, half-width of the torque interval
  double sigma_min_frac = 0.01;  // of torque_range
  double sigma_max_frac = 0.5;

  void validate() const;
};

/// Policy at one state, in normalized torque units (torque / torque_range).
struct PolicyDist {
  double mean = 0.0;  // in (-1, 1)
  double std = 0.0;   // in [sigma_min_frac, sigma_max_frac]
  std::array<double, kNumGearCommands> logits{};
  std::array<double, kNumGearCommands> probs{};

  double log_prob_torque(double torque_norm) const;
  double log_prob_gear(int index) const;
  /// Index of the most probable command; ties resolve to 0, then upshift.
  int mode_gear_index() const;
};

struct PolicySample {
  HybridAction action;      // physical units
  double torque_norm = 0.0;  // sampled, clamped to [-1, 1]
  int gear_index = 1;
  double logprob_torque = 0.0;
  double prob_gear = 0.0;
};

/// Tanh-squashed Gaussian mean, sigmoid-bounded standard deviation and a
/// softmax over the three gear commands.
class PolicyHeads {
 public:
  PolicyHeads() = default;
  explicit PolicyHeads(HeadConfig cfg);

  const HeadConfig& config() const { return cfg_; }
  double torque_range() const { return cfg_.torque_range; }
  double sigma_min() const { return cfg_.sigma_min_frac; }
  double sigma_max() const { return cfg_.sigma_max_frac; }

  /// Throws std::domain_error on non-finite outputs.
  PolicyDist distribution(const Eigen::Ref<const Eigen::VectorXd>& outputs) const;

  PolicySample sample(const PolicyDist& dist, std::mt19937_64& rng) const;
  HybridAction mode(const PolicyDist& dist) const;

  /// Raw pre-activation that yields a given standard deviation fraction.
  double std_preactivation(double std_frac) const;

 private:
  HeadConfig cfg_;
};

/// log N(x; mean, std).
double gaussian_log_pdf(double x, double mean, double std);

}  // namespace ecodrive

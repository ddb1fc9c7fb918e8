#pragma once

#include <optional>

#include <Eigen/Dense>

#include "ecodrive/source_policy.hpp"
#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive {

/// Scaling constants for the agent's observation.
struct StateNorms {
  double speed = 30.0;       // m/s
  double accel = 2.0;        // A_max, m/s^2
  double torque = 1.0;       // T_max, N*m at the wheels

  void validate() const;
};

inline constexpr int kBaseStateSize = 3 + kNumGears;
inline constexpr int kSourceFeatures = 1 + 3;

inline int encoded_state_size(bool with_source) { return kBaseStateSize + (with_source ? kSourceFeatures : 0); }

/// [V/30, A_e/A_max, A_des/A_max, one-hot gear (10)], followed in residual
/// mode by [T_s/T_max, one-hot source gear command (3)].
Eigen::VectorXd encode_state(const PlantState& plant, double desired_accel, const std::optional<SourceAction>& source,
                             const StateNorms& norms);

}  // namespace ecodrive

#include "ecodrive/state_encoder.hpp"

#include <stdexcept>

namespace ecodrive {

void StateNorms::validate() const {
  if (!(speed > 0 && accel > 0 && torque > 0)) throw std::invalid_argument("StateNorms: scales must be positive");
}

Eigen::VectorXd encode_state(const PlantState& plant, double desired_accel, const std::optional<SourceAction>& source,
                             const StateNorms& norms) {
  if (plant.gear < 1 || plant.gear > kNumGears) throw std::out_of_range("encode_state: gear outside 1..10");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(encoded_state_size(source.has_value()));
  x[0] = plant.velocity / norms.speed;
  x[1] = plant.acceleration / norms.accel;
  x[2] = desired_accel / norms.accel;
  x[3 + plant.gear - 1] = 1.0;
  if (source) {
    x[kBaseStateSize] = source->torque / norms.torque;
    x[kBaseStateSize + 1 + source->gear_cmd + 1] = 1.0;
  }
  return x;
}

}  // namespace ecodrive

#include "ecodrive/reward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ecodrive {

void RewardNorms::validate() const {
  if (!(max_accel_error > 0 && max_torque > 0 && max_fuel_rate > 0)) {
    throw std::invalid_argument("RewardNorms: all norms must be strictly positive");
  }
}

RewardTerms reward_terms(const RewardInputs& in, const RewardWeights& w, const RewardNorms& norms) {
  const bool finite = std::isfinite(in.desired_accel) && std::isfinite(in.next_accel) && std::isfinite(in.torque) &&
                      std::isfinite(in.next_fuel_rate) && std::isfinite(in.next_reserve) &&
                      std::isfinite(in.next_max_reserve);
  if (!finite) throw std::invalid_argument("reward: non-finite input");
  if (!(in.next_max_reserve > 0)) throw std::invalid_argument("reward: max power reserve must be positive");

  RewardTerms t;
  t.accel = -w.accel * std::abs(in.desired_accel - in.next_accel) / norms.max_accel_error;
  t.torque = -w.torque * std::abs(in.torque) / norms.max_torque;
  t.fuel = -w.fuel * in.next_fuel_rate / norms.max_fuel_rate;
  t.gear = -w.gear * std::abs(in.next_gear - in.prev_gear);
  t.reserve = -w.reserve * (in.next_max_reserve - in.next_reserve) / in.next_max_reserve;
  t.total = t.accel + t.torque + t.fuel + t.gear + t.reserve;
  return t;
}

double reward(const RewardInputs& in, const RewardWeights& w, const RewardNorms& norms) {
  return reward_terms(in, w, norms).total;
}

double max_wheel_torque(const VehiclePlant& plant) {
  double peak = 0.0;
  for (double t : plant.engine().max_torque.ys()) peak = std::max(peak, t);
  const auto& tr = plant.transmission();
  return peak * tr.overall_ratio(1) * tr.driveline_efficiency;
}

RewardNorms reward_norms(const VehiclePlant& plant, double max_accel_error) {
  RewardNorms n;
  n.max_accel_error = max_accel_error;
  n.max_torque = max_wheel_torque(plant);
  n.max_fuel_rate = plant.engine().fuel_map.max_value();
  n.validate();
  return n;
}

}  // namespace ecodrive

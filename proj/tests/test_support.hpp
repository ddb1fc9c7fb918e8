#pragma once

#include <cmath>
#include <random>

#include "ecodrive/powertrain_io.hpp"
#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive::testing {

inline const VehiclePlant& bundled_plant() {
  static const VehiclePlant plant(VehicleParams{}, bundled_powertrain());
  return plant;
}

inline double relative_error(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// A plant state at `velocity` in `gear` with a consistent engine speed.
inline PlantState state_at(const VehiclePlant& plant, double velocity, int gear, double position = 0.0) {
  PlantState s;
  s.position = position;
  s.velocity = velocity;
  s.gear = gear;
  s.engine_speed = std::min(plant.engine_speed_for(velocity, gear), plant.engine().max_speed);
  return s;
}

/// Gears whose kinematic engine speed lies inside the engine envelope.
inline bool gear_in_envelope(const VehiclePlant& plant, double velocity, int gear) {
  const double w = plant.kinematic_engine_speed(velocity, gear);
  return w >= plant.engine().idle_speed && w <= plant.engine().max_speed;
}

}  // namespace ecodrive::testing

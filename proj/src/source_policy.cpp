#include "ecodrive/source_policy.hpp"

#include <algorithm>
#include <cmath>

namespace ecodrive {
namespace {

// g/s; dominates any real fuel rate so torque-capable gears always win.
constexpr double kTorqueInfeasibilityPenalty = 1e3;

}  // namespace

double source_torque(double desired_accel, const PlantState& state, const VehiclePlant& plant) {
  const Resistances r = plant.resistances(state.velocity, state.position);
  return plant.params().wheel_radius * (plant.params().effective_mass(state.gear) * desired_accel + r.total());
}

std::array<GearCandidate, 3> gear_candidates(const PlantState& state, double torque, const VehiclePlant& plant,
                                             double shift_cost) {
  std::array<GearCandidate, 3> out;
  const auto& trans = plant.transmission();
  for (int u = -1; u <= 1; ++u) {
    GearCandidate& c = out[u + 1];
    c.command = u;
    const int gear = state.gear + u;
    if (!plant.shift_allowed(state.gear, gear, state.velocity)) continue;
    const double w = std::min(plant.engine_speed_for(state.velocity, gear), plant.engine().max_speed);
    c.allowed = true;
    c.feasible = true;
    double engine_torque = 0.0;
    double shortfall = 0.0;
    if (torque > 0.0) {
      const double capacity = plant.max_wheel_torque(w, gear);
      if (torque > capacity) {
        c.feasible = false;
        shortfall = (torque - capacity) / torque;
      }
      engine_torque = std::min(torque, capacity) / (trans.overall_ratio(gear) * trans.driveline_efficiency);
    }
    c.fuel_rate = plant.fuel_rate(w, engine_torque);
    c.cost = c.fuel_rate + shift_cost * std::abs(u);
    if (!c.feasible) c.cost += kTorqueInfeasibilityPenalty * (1.0 + shortfall);
  }
  return out;
}

int source_gear(const PlantState& state, double torque, const VehiclePlant& plant, double shift_cost) {
  const auto candidates = gear_candidates(state, torque, plant, shift_cost);
  const GearCandidate* best = &candidates[1];
  for (int idx : {2, 0}) {
    if (candidates[idx].allowed && candidates[idx].cost < best->cost) best = &candidates[idx];
  }
  return best->command;
}

SourceAction source_action(double desired_accel, const PlantState& state, const VehiclePlant& plant,
                           double shift_cost) {
  SourceAction a;
  a.torque = source_torque(desired_accel, state, plant);
  a.gear_cmd = source_gear(state, a.torque, plant, shift_cost);
  return a;
}

}  // namespace ecodrive

#pragma once

#include <array>

#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive {

/// Default (OEM-equivalent) controller output.
struct SourceAction {
  double torque = 0.0;  // wheel-level N*m
  int gear_cmd = 0;     // -1, 0, +1

  bool operator==(const SourceAction&) const = default;
};

/// Inverse dynamics: the wheel torque that realizes `desired_accel` in the
/// current gear, r_w (M_eff A + R_r + R_a + R_g).
double source_torque(double desired_accel, const PlantState& state, const VehiclePlant& plant);

/// `allowed`: the shift respects gear bounds and engine speed limits.
/// `feasible`: the gear can also deliver the torque. Torque-infeasible
/// candidates carry a large penalty scaled by the shortfall, so they only win
/// when nothing can deliver, and then the least-short gear wins.
struct GearCandidate {
  int command = 0;
  bool allowed = false;
  bool feasible = false;
  double fuel_rate = 0.0;  // g/s at the operating point delivering the torque
  double cost = 0.0;       // fuel_rate + shift_cost * |command|
};

/// Operating point for each of {-1, 0, +1}. Index i holds command i - 1.
std::array<GearCandidate, 3> gear_candidates(const PlantState& state, double torque, const VehiclePlant& plant,
                                             double shift_cost);

/// Instantaneous fuel-optimal shift: argmin over allowed candidates of
/// fuel_rate + shift_cost * |u| (+ torque penalty). Ties go to 0, then to
/// upshift.
int source_gear(const PlantState& state, double torque, const VehiclePlant& plant, double shift_cost);

SourceAction source_action(double desired_accel, const PlantState& state, const VehiclePlant& plant,
                           double shift_cost);

}  // namespace ecodrive

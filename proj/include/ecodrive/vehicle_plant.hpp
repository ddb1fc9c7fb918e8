#pragma once

#include <array>
#include <stdexcept>

#include "ecodrive/interp.hpp"

namespace ecodrive {

inline constexpr int kNumGears = 10;

/// Thrown when the plant is asked to leave its physical envelope (e.g. a fuel
/// map query outside the engine speed range).
class PlantInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VehicleParams {
  double mass = 9070.0;                 // kg
  std::array<double, kNumGears> rotating_mass_factor = linear_mass_factors(1.60, 1.10);
  double frontal_area = 7.71;           // m^2
  double drag_coeff = 0.8;
  double rolling_coeff = 0.015;
  double wheel_radius = 0.498;          // m
  double air_density = 1.2;             // kg/m^3
  double gravity = 9.81;                // m/s^2
  double max_service_brake_torque = 40000.0;  // N*m at the wheels

  double weight() const { return mass * gravity; }
  double effective_mass(int gear) const { return rotating_mass_factor.at(gear - 1) * mass; }
  void validate() const;

  /// Factors linearly spaced from `first` (gear 1) down to `top` (gear 10).
  static std::array<double, kNumGears> linear_mass_factors(double first, double top);
};

/// Engine characteristics. Speeds in rad/s, torques in N*m, fuel in g/s.
struct EngineSpec {
  double idle_speed = 0.0;
  double max_speed = 0.0;
  PiecewiseLinear max_torque;        // speed -> N*m (>= 0)
  PiecewiseLinear max_brake_torque;  // speed -> N*m (<= 0)
  BilinearGrid fuel_map;             // (speed, torque) -> g/s
  double idle_fuel_rate = 0.0;

  void validate() const;
};

struct TransmissionSpec {
  std::array<double, kNumGears> gear_ratios{};
  double final_drive_ratio = 1.0;
  double driveline_efficiency = 1.0;

  double overall_ratio(int gear) const { return gear_ratios.at(gear - 1) * final_drive_ratio; }
  void validate() const;
};

struct Powertrain {
  EngineSpec engine;
  TransmissionSpec transmission;
};

/// Road grade as a function of position; flat unless a table is supplied.
class RoadProfile {
 public:
  RoadProfile() = default;
  explicit RoadProfile(PiecewiseLinear grade);

  static RoadProfile flat() { return {}; }
  double grade_at(double position) const { return grade_.empty() ? 0.0 : grade_(position); }

 private:
  PiecewiseLinear grade_;
};

struct PlantState {
  double position = 0.0;      // m
  double velocity = 0.0;      // m/s
  double acceleration = 0.0;  // m/s^2
  int gear = 1;
  double engine_speed = 0.0;  // rad/s
  double fuel_used = 0.0;     // g
  double time = 0.0;          // s

  bool operator==(const PlantState&) const = default;
};

/// Road loads in N. All are positive when they oppose forward motion.
struct Resistances {
  double rolling = 0.0;
  double aero = 0.0;
  double grade = 0.0;

  double total() const { return rolling + aero + grade; }
};

/// Wheel-level split of a negative torque request (both entries <= 0).
struct BrakeSplit {
  double engine_brake = 0.0;
  double service_brake = 0.0;

  double total() const { return engine_brake + service_brake; }
};

struct PowerReserve {
  double reserve = 0.0;      // W, unused engine power in the current gear
  double max_reserve = 0.0;  // W, best available power over feasible gears
};

struct StepResult {
  PlantState state;
  double fuel_rate = 0.0;      // g/s over the step
  double acceleration = 0.0;   // realized m/s^2
  double wheel_torque = 0.0;   // applied N*m after saturation
  double engine_torque = 0.0;  // N*m at the crank (negative when engine braking)
  BrakeSplit brakes;
  double engine_power = 0.0;   // W delivered by the engine (>= 0)
};

/// Longitudinal vehicle with engine, 10-speed transmission and brakes.
///
/// Dynamics: A = (T/r_w - R_r - R_a - R_g) / M_eff(gear), explicit Euler.
/// Engine speed follows the wheel through the driveline and is floored at
/// idle (torque-converter abstraction). Shifts are instantaneous.
class VehiclePlant {
 public:
  VehiclePlant(VehicleParams params, Powertrain powertrain, RoadProfile road = RoadProfile::flat());

  const VehicleParams& params() const { return params_; }
  const Powertrain& powertrain() const { return powertrain_; }
  const EngineSpec& engine() const { return powertrain_.engine; }
  const TransmissionSpec& transmission() const { return powertrain_.transmission; }
  const RoadProfile& road() const { return road_; }

  Resistances resistances(double velocity, double position) const;

  /// Wheel speed reflected to the crank, without the idle floor.
  double kinematic_engine_speed(double velocity, int gear) const;
  double engine_speed_for(double velocity, int gear) const;

  /// Fuel rate at an engine operating point. Non-positive torque cuts fuel
  /// unless the engine sits at idle, where it burns the idle rate.
  double fuel_rate(double engine_speed, double engine_torque) const;

  /// Largest positive wheel torque the engine can deliver in `gear`.
  double max_wheel_torque(double engine_speed, int gear) const;
  /// Magnitude of wheel-level engine braking available; zero at the idle floor.
  double engine_brake_capacity(double engine_speed, int gear) const;
  /// Splits a negative wheel request between engine braking and service
  /// brakes. The request is first clamped to the combined capacity.
  BrakeSplit split_negative_torque(double wheel_request, double engine_speed, int gear) const;

  bool shift_allowed(int from_gear, int to_gear, double velocity) const;
  /// Applies a (possibly summed) gear command: at most one step, within
  /// [1, 10], and only into a gear the engine speed limits accept.
  int apply_gear_command(int gear, int command, double velocity) const;

  PowerReserve power_reserve(double velocity, int gear, double delivered_power) const;

  StepResult step(const PlantState& state, double wheel_torque, int gear_command, double dt) const;

  /// Vehicle at `velocity` in the lowest gear the limits accept.
  PlantState initial_state(double velocity, double position = 0.0) const;

 private:
  VehicleParams params_;
  Powertrain powertrain_;
  RoadProfile road_;
};

}  // namespace ecodrive

#include "ecodrive/vehicle_plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ecodrive {
namespace {

constexpr double kSpeedTolerance = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

std::array<double, kNumGears> VehicleParams::linear_mass_factors(double first, double top) {
  std::array<double, kNumGears> factors{};
  for (int g = 0; g < kNumGears; ++g) {
    factors[g] = first + (top - first) * static_cast<double>(g) / (kNumGears - 1);
  }
  return factors;
}

void VehicleParams::validate() const {
  require(mass > 0 && frontal_area > 0 && drag_coeff > 0 && rolling_coeff > 0 &&
              wheel_radius > 0 && air_density > 0 && gravity > 0 && max_service_brake_torque > 0,
          "VehicleParams: all fields must be strictly positive");
  for (int g = 0; g < kNumGears; ++g) {
    require(rotating_mass_factor[g] >= 1.0, "VehicleParams: rotating mass factor must be >= 1");
    if (g > 0) {
      require(rotating_mass_factor[g] <= rotating_mass_factor[g - 1],
              "VehicleParams: rotating mass factors must not increase with gear");
    }
  }
}

void EngineSpec::validate() const {
  require(idle_speed > 0 && idle_speed < max_speed, "EngineSpec: need 0 < idle_speed < max_speed");
  require(!max_torque.empty() && !max_brake_torque.empty(), "EngineSpec: torque curves missing");
  for (double t : max_torque.ys()) require(t >= 0, "EngineSpec: max torque must be >= 0");
  for (double t : max_brake_torque.ys()) require(t <= 0, "EngineSpec: brake torque must be <= 0");
  const auto& xs = fuel_map.xs();
  const auto& ys = fuel_map.ys();
  require(!xs.empty() && xs.front() <= idle_speed + kSpeedTolerance &&
              xs.back() >= max_speed - kSpeedTolerance,
          "EngineSpec: fuel map must cover [idle_speed, max_speed]");
  double peak = 0.0;
  for (double t : max_torque.ys()) peak = std::max(peak, t);
  require(ys.front() <= 0.0 && ys.back() >= peak - 1e-9, "EngineSpec: fuel map must cover [0, max torque]");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      require(fuel_map.at(i, j) >= 0, "EngineSpec: fuel rate must be >= 0");
      if (j > 0) {
        require(fuel_map.at(i, j) >= fuel_map.at(i, j - 1),
                "EngineSpec: fuel rate must be non-decreasing in torque");
      }
    }
  }
  require(idle_fuel_rate >= 0, "EngineSpec: idle fuel rate must be >= 0");
}

void TransmissionSpec::validate() const {
  for (int g = 0; g < kNumGears; ++g) {
    require(gear_ratios[g] > 0, "TransmissionSpec: gear ratios must be positive");
    if (g > 0) require(gear_ratios[g] < gear_ratios[g - 1], "TransmissionSpec: ratios must strictly decrease");
  }
  require(final_drive_ratio > 0, "TransmissionSpec: final drive must be positive");
  require(driveline_efficiency > 0 && driveline_efficiency <= 1, "TransmissionSpec: efficiency must be in (0, 1]");
}

RoadProfile::RoadProfile(PiecewiseLinear grade) : grade_(std::move(grade)) {
  for (double psi : grade_.ys()) {
    require(std::abs(psi) < M_PI / 2, "RoadProfile: |grade| must be below pi/2");
  }
}

VehiclePlant::VehiclePlant(VehicleParams params, Powertrain powertrain, RoadProfile road)
    : params_(std::move(params)), powertrain_(std::move(powertrain)), road_(std::move(road)) {
  params_.validate();
  powertrain_.engine.validate();
  powertrain_.transmission.validate();
}

Resistances VehiclePlant::resistances(double velocity, double position) const {
  const double psi = road_.grade_at(position);
  Resistances r;
  r.rolling = params_.weight() * params_.rolling_coeff * std::cos(psi);
  r.aero = 0.5 * params_.air_density * params_.drag_coeff * params_.frontal_area * velocity * velocity;
  r.grade = params_.weight() * std::sin(psi);
  return r;
}

double VehiclePlant::kinematic_engine_speed(double velocity, int gear) const {
  return velocity / params_.wheel_radius * transmission().overall_ratio(gear);
}

double VehiclePlant::engine_speed_for(double velocity, int gear) const {
  return std::max(engine().idle_speed, kinematic_engine_speed(velocity, gear));
}

double VehiclePlant::fuel_rate(double engine_speed, double engine_torque) const {
  const EngineSpec& e = engine();
  if (!(engine_speed >= e.idle_speed * (1 - kSpeedTolerance) &&
        engine_speed <= e.max_speed * (1 + kSpeedTolerance))) {
    throw PlantInvariantError("fuel_rate: engine speed " + std::to_string(engine_speed) +
                              " rad/s outside [" + std::to_string(e.idle_speed) + ", " +
                              std::to_string(e.max_speed) + "]");
  }
  if (engine_torque <= 0.0) {
    return engine_speed <= e.idle_speed * (1 + kSpeedTolerance) ? e.idle_fuel_rate : 0.0;
  }
  return e.fuel_map(engine_speed, engine_torque);
}

double VehiclePlant::max_wheel_torque(double engine_speed, int gear) const {
  const auto& t = transmission();
  return engine().max_torque(engine_speed) * t.overall_ratio(gear) * t.driveline_efficiency;
}

double VehiclePlant::engine_brake_capacity(double engine_speed, int gear) const {
  if (engine_speed <= engine().idle_speed) return 0.0;
  return -engine().max_brake_torque(engine_speed) * transmission().overall_ratio(gear);
}

BrakeSplit VehiclePlant::split_negative_torque(double wheel_request, double engine_speed, int gear) const {
  const double engine_cap = engine_brake_capacity(engine_speed, gear);
  const double clamped = std::max(wheel_request, -(engine_cap + params_.max_service_brake_torque));
  BrakeSplit split;
  // Engine share is rounded toward zero onto the request's ulp grid so the
  // service share is an exact difference and the two add back exactly.
  const double ulp = std::ldexp(1.0, std::ilogb(clamped) - std::numeric_limits<double>::digits + 1);
  split.engine_brake = std::ceil(std::max(clamped, -engine_cap) / ulp) * ulp;
  split.service_brake = clamped - split.engine_brake;
  return split;
}

bool VehiclePlant::shift_allowed(int from_gear, int to_gear, double velocity) const {
  if (to_gear < 1 || to_gear > kNumGears) return false;
  if (to_gear == from_gear) return true;
  const double speed = kinematic_engine_speed(velocity, to_gear);
  if (to_gear > from_gear) return speed >= engine().idle_speed;
  return speed <= engine().max_speed;
}

int VehiclePlant::apply_gear_command(int gear, int command, double velocity) const {
  const int step = std::clamp(command, -1, 1);
  const int candidate = std::clamp(gear + step, 1, kNumGears);
  return shift_allowed(gear, candidate, velocity) ? candidate : gear;
}

PowerReserve VehiclePlant::power_reserve(double velocity, int gear, double delivered_power) const {
  auto available = [&](int g) {
    const double w = engine_speed_for(velocity, g);
    return engine().max_torque(w) * w;
  };
  PowerReserve out;
  out.reserve = std::max(0.0, available(gear) - delivered_power);
  out.max_reserve = available(gear);
  for (int g = 1; g <= kNumGears; ++g) {
    if (kinematic_engine_speed(velocity, g) <= engine().max_speed) {
      out.max_reserve = std::max(out.max_reserve, available(g));
    }
  }
  return out;
}

StepResult VehiclePlant::step(const PlantState& state, double wheel_torque, int gear_command, double dt) const {
  if (!std::isfinite(wheel_torque) || !std::isfinite(dt) || !(dt > 0) || !std::isfinite(state.velocity) ||
      !std::isfinite(state.position)) {
    throw std::invalid_argument("VehiclePlant::step: non-finite input or non-positive dt");
  }
  const double v = state.velocity;
  const auto& trans = transmission();

  StepResult out;
  const int gear = apply_gear_command(state.gear, gear_command, v);
  const double w = std::min(engine_speed_for(v, gear), engine().max_speed);
  const double ratio = trans.overall_ratio(gear);

  if (wheel_torque > 0.0) {
    out.wheel_torque = std::min(wheel_torque, max_wheel_torque(w, gear));
    out.engine_torque = out.wheel_torque / (ratio * trans.driveline_efficiency);
    out.engine_power = out.engine_torque * w;
  } else if (wheel_torque < 0.0) {
    out.brakes = split_negative_torque(wheel_torque, w, gear);
    out.wheel_torque = out.brakes.total();
    out.engine_torque = out.brakes.engine_brake / ratio;
  }
  out.fuel_rate = fuel_rate(w, out.engine_torque);

  const Resistances res = resistances(v, state.position);
  double accel = (out.wheel_torque / params_.wheel_radius - res.total()) / params_.effective_mass(gear);
  double v_next = v + accel * dt;
  const double v_governed = engine().max_speed * params_.wheel_radius / ratio;
  if (v_next < 0.0) {
    v_next = 0.0;
    accel = (v_next - v) / dt;
  } else if (v_next > v_governed) {
    v_next = std::max(v, v_governed);
    accel = (v_next - v) / dt;
  }
  out.acceleration = accel;

  PlantState& next = out.state;
  next.position = state.position + v * dt;
  next.velocity = v_next;
  next.acceleration = accel;
  next.gear = gear;
  next.engine_speed = std::min(engine_speed_for(v_next, gear), engine().max_speed);
  next.fuel_used = state.fuel_used + out.fuel_rate * dt;
  next.time = state.time + dt;
  return out;
}

PlantState VehiclePlant::initial_state(double velocity, double position) const {
  PlantState s;
  s.position = position;
  s.velocity = velocity;
  s.gear = kNumGears;
  for (int g = 1; g <= kNumGears; ++g) {
    if (kinematic_engine_speed(velocity, g) <= engine().max_speed) {
      s.gear = g;
      break;
    }
  }
  s.engine_speed = std::min(engine_speed_for(velocity, s.gear), engine().max_speed);
  return s;
}

}  // namespace ecodrive

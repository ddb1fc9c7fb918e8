#include <doctest.h>

#include <cmath>
#include <random>

#include "ecodrive/powertrain_io.hpp"
#include "ecodrive/vehicle_plant.hpp"
#include "test_support.hpp"

using namespace ecodrive;
using ecodrive::testing::bundled_plant;
using ecodrive::testing::gear_in_envelope;
using ecodrive::testing::state_at;

namespace {

VehiclePlant plant_with_final_drive(double overall_ratio_gear1) {
  Powertrain pt = bundled_powertrain();
  pt.transmission.final_drive_ratio = overall_ratio_gear1 / pt.transmission.gear_ratios[0];
  return VehiclePlant(VehicleParams{}, pt);
}

// Random state with a gear that is inside the engine envelope at its speed.
PlantState random_state(const VehiclePlant& plant, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> speed(0.5, 28.0);
  std::uniform_int_distribution<int> gear(1, kNumGears);
  for (;;) {
    const double v = speed(rng);
    const int g = gear(rng);
    if (gear_in_envelope(plant, v, g)) return state_at(plant, v, g, 100.0);
  }
}

}  // namespace

TEST_CASE("resistances: hand-evaluated road loads") {
  const VehiclePlant& plant = bundled_plant();
  const Resistances at_rest = plant.resistances(0.0, 0.0);
  CHECK(at_rest.aero == 0.0);
  CHECK(at_rest.grade == 0.0);
  CHECK(at_rest.rolling == doctest::Approx(9070.0 * 9.81 * 0.015).epsilon(1e-12));
  CHECK(at_rest.rolling == doctest::Approx(1334.65).epsilon(1e-5));

  const Resistances moving = plant.resistances(20.0, 0.0);
  CHECK(moving.aero == doctest::Approx(0.5 * 1.2 * 0.8 * 7.71 * 400.0).epsilon(1e-12));
  CHECK(moving.aero == doctest::Approx(1480.3).epsilon(1e-4));
}

TEST_CASE("resistances: grade splits weight into rolling and grade terms") {
  const double psi = 0.05;
  const VehiclePlant plant(VehicleParams{}, bundled_powertrain(), RoadProfile(PiecewiseLinear({0.0, 1000.0}, {psi, psi})));
  const Resistances r = plant.resistances(10.0, 500.0);
  const double weight = 9070.0 * 9.81;
  CHECK(r.rolling == doctest::Approx(weight * 0.015 * std::cos(psi)).epsilon(1e-12));
  CHECK(r.grade == doctest::Approx(weight * std::sin(psi)).epsilon(1e-12));
  CHECK_THROWS_AS(RoadProfile(PiecewiseLinear({0.0}, {1.6})), std::invalid_argument);
}

TEST_CASE("engine_speed_for: idle floor and unit kinematics") {
  const VehiclePlant& plant = bundled_plant();
  for (int g = 1; g <= kNumGears; ++g) CHECK(plant.engine_speed_for(0.0, g) == plant.engine().idle_speed);

  const VehiclePlant ten = plant_with_final_drive(10.0);
  CHECK(ten.engine_speed_for(0.498, 1) == doctest::Approx(std::max(ten.engine().idle_speed, 10.0)));
  CHECK(ten.kinematic_engine_speed(0.498, 1) == doctest::Approx(10.0).epsilon(1e-12));

  const VehiclePlant four = plant_with_final_drive(4.0);
  const double w = four.kinematic_engine_speed(15.0, 1);
  CHECK(w == doctest::Approx(120.48).epsilon(1e-4));
  CHECK(four.engine_speed_for(15.0, 1) == doctest::Approx(std::max(four.engine().idle_speed, w)));
}

TEST_CASE("fuel_rate: grid identity, bilinear midpoint, overrun and range") {
  const VehiclePlant& plant = bundled_plant();
  const auto& map = plant.engine().fuel_map;
  const auto& ws = map.xs();
  const auto& ts = map.ys();

  // Interior nodes within the engine envelope reproduce the stored value.
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws[i] < plant.engine().idle_speed || ws[i] > plant.engine().max_speed) continue;
    for (std::size_t j = 1; j < ts.size(); ++j) CHECK(plant.fuel_rate(ws[i], ts[j]) == map.at(i, j));
  }

  // Cell midpoints: bilinear interpolation gives the mean of the four corners.
  for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
    for (std::size_t j = 1; j + 1 < ts.size(); ++j) {
      const double w = 0.5 * (ws[i] + ws[i + 1]);
      const double t = 0.5 * (ts[j] + ts[j + 1]);
      const double corners = 0.25 * (map.at(i, j) + map.at(i + 1, j) + map.at(i, j + 1) + map.at(i + 1, j + 1));
      CHECK(plant.fuel_rate(w, t) == doctest::Approx(corners).epsilon(1e-12));
    }
  }

  const double above_idle = 0.5 * (plant.engine().idle_speed + plant.engine().max_speed);
  CHECK(plant.fuel_rate(above_idle, -10.0) == 0.0);
  CHECK(plant.fuel_rate(above_idle, 0.0) == 0.0);
  CHECK(plant.fuel_rate(plant.engine().idle_speed, -10.0) == plant.engine().idle_fuel_rate);
  CHECK(plant.engine().idle_fuel_rate > 0.0);

  CHECK_THROWS_AS(plant.fuel_rate(plant.engine().max_speed * 1.01, 100.0), PlantInvariantError);
  CHECK_THROWS_AS(plant.fuel_rate(plant.engine().idle_speed * 0.99, 100.0), PlantInvariantError);
}

TEST_CASE("fuel_rate: non-decreasing in torque at fixed speed") {
  const VehiclePlant& plant = bundled_plant();
  const auto& e = plant.engine();
  for (int i = 0; i <= 40; ++i) {
    const double w = e.idle_speed + (e.max_speed - e.idle_speed) * i / 40.0;
    double prev = plant.fuel_rate(w, 1e-9);
    for (int j = 1; j <= 200; ++j) {
      const double t = e.fuel_map.ys().back() * j / 200.0;
      const double f = plant.fuel_rate(w, t);
      CHECK(f >= prev);
      prev = f;
    }
  }
}

TEST_CASE("split_negative_torque: engine brake saturates first, contributions add up") {
  const VehiclePlant& plant = bundled_plant();
  const int gear = 4;
  const double w = 150.0;
  const double cap = plant.engine_brake_capacity(w, gear);
  REQUIRE(cap > 0.0);
  CHECK(cap == doctest::Approx(-plant.engine().max_brake_torque(w) * plant.transmission().overall_ratio(gear)));

  const BrakeSplit within = plant.split_negative_torque(-0.5 * cap, w, gear);
  CHECK(within.service_brake == 0.0);
  CHECK(within.engine_brake == -0.5 * cap);

  const BrakeSplit twice = plant.split_negative_torque(-2.0 * cap, w, gear);
  CHECK(twice.engine_brake == -cap);
  CHECK(twice.service_brake == doctest::Approx(-cap));
  CHECK(twice.total() == -2.0 * cap);

  // Beyond combined capacity the request is clamped first.
  const double limit = cap + plant.params().max_service_brake_torque;
  const BrakeSplit huge = plant.split_negative_torque(-10.0 * limit, w, gear);
  CHECK(huge.total() == doctest::Approx(-limit).epsilon(1e-15));

  CHECK(plant.engine_brake_capacity(plant.engine().idle_speed, gear) == 0.0);
}

TEST_CASE("split_negative_torque: additivity over random requests") {
  const VehiclePlant& plant = bundled_plant();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> speed(plant.engine().idle_speed, plant.engine().max_speed);
  std::uniform_int_distribution<int> gear(1, kNumGears);
  std::uniform_real_distribution<double> request(-60000.0, -1.0);
  for (int k = 0; k < 20000; ++k) {
    const double w = speed(rng);
    const int g = gear(rng);
    const double req = request(rng);
    const BrakeSplit s = plant.split_negative_torque(req, w, g);
    const double cap = plant.engine_brake_capacity(w, g);
    const double clamped = std::max(req, -(cap + plant.params().max_service_brake_torque));
    CHECK(s.engine_brake <= 0.0);
    CHECK(s.service_brake <= 0.0);
    CHECK(s.engine_brake >= -cap);
    CHECK(s.service_brake >= -plant.params().max_service_brake_torque * (1 + 1e-15));
    CHECK(s.engine_brake + s.service_brake == clamped);
  }
}

TEST_CASE("apply_gear_command: identity, bounds and engine-speed limits") {
  const VehiclePlant& plant = bundled_plant();
  CHECK(plant.apply_gear_command(5, 0, 10.0) == 5);
  CHECK(plant.apply_gear_command(10, 2, 25.0) == 10);
  CHECK(plant.apply_gear_command(1, -2, 1.0) == 1);
  CHECK(plant.apply_gear_command(5, 2, 5.0) == 6);
  CHECK(plant.apply_gear_command(5, -2, 5.0) == 4);

  // Speed where gear 3 is above idle but gear 4 would fall below it.
  const double idle = plant.engine().idle_speed;
  const double r_w = plant.params().wheel_radius;
  const double v = 1.02 * idle * r_w / plant.transmission().overall_ratio(3);
  REQUIRE(plant.kinematic_engine_speed(v, 3) >= idle);
  REQUIRE(plant.kinematic_engine_speed(v, 4) < idle);
  CHECK(plant.apply_gear_command(3, 1, v) == 3);

  // Downshift that would overspeed the engine is refused.
  const double v_fast = 0.98 * plant.engine().max_speed * r_w / plant.transmission().overall_ratio(5);
  REQUIRE(plant.kinematic_engine_speed(v_fast, 4) > plant.engine().max_speed);
  CHECK(plant.apply_gear_command(5, -1, v_fast) == 5);
}

TEST_CASE("power_reserve: zero, full and exhaustive-scan maximum") {
  const VehiclePlant& plant = bundled_plant();
  const auto& e = plant.engine();
  auto available = [&](double v, int g) {
    const double w = plant.engine_speed_for(v, g);
    return e.max_torque(w) * w;
  };

  const double v = 12.0;
  for (int g = 1; g <= kNumGears; ++g) {
    if (!gear_in_envelope(plant, v, g)) continue;
    const PowerReserve full_load = plant.power_reserve(v, g, available(v, g));
    CHECK(full_load.reserve == 0.0);

    double best = 0.0;
    for (int k = 1; k <= kNumGears; ++k) {
      if (plant.kinematic_engine_speed(v, k) <= e.max_speed) best = std::max(best, available(v, k));
    }
    const PowerReserve idle_load = plant.power_reserve(v, g, 0.0);
    CHECK(idle_load.max_reserve == best);
    CHECK(idle_load.reserve <= idle_load.max_reserve);
  }

  int argmax = 1;
  for (int g = 1; g <= kNumGears; ++g) {
    if (plant.kinematic_engine_speed(v, g) <= e.max_speed && available(v, g) > available(v, argmax)) argmax = g;
  }
  const PowerReserve at_best = plant.power_reserve(v, argmax, 0.0);
  CHECK(at_best.reserve == at_best.max_reserve);
}

TEST_CASE("step: force balance on flat road") {
  const VehiclePlant& plant = bundled_plant();
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int k = 0; k < 5000; ++k) {
    const PlantState s = random_state(plant, rng);
    const Resistances r = plant.resistances(s.velocity, s.position);
    const double torque = plant.params().wheel_radius * (r.rolling + r.aero);
    if (torque > plant.max_wheel_torque(s.engine_speed, s.gear)) continue;
    const StepResult out = plant.step(s, torque, 0, 0.2);
    CHECK(std::abs(out.acceleration) < 1e-9);
    CHECK(std::abs(out.state.velocity - s.velocity) < 1e-9);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("step: rest, saturation and non-finite input") {
  const VehiclePlant& plant = bundled_plant();
  const PlantState rest = plant.initial_state(0.0);
  const StepResult idle = plant.step(rest, 0.0, 0, 0.2);
  CHECK(idle.state.velocity == 0.0);
  CHECK(idle.state.position == 0.0);
  CHECK(idle.acceleration == 0.0);

  const PlantState s = state_at(plant, 4.0, 3);
  REQUIRE(gear_in_envelope(plant, 4.0, 3));
  const double cap = plant.max_wheel_torque(s.engine_speed, s.gear);
  const double request = 3.0 * cap;
  const StepResult out = plant.step(s, request, 0, 0.2);
  CHECK(out.wheel_torque == cap);
  const Resistances r = plant.resistances(s.velocity, s.position);
  const double unsaturated = (request / plant.params().wheel_radius - r.total()) / plant.params().effective_mass(3);
  CHECK(out.acceleration < unsaturated);
  CHECK(out.acceleration ==
        doctest::Approx((cap / plant.params().wheel_radius - r.total()) / plant.params().effective_mass(3)));

  CHECK_THROWS_AS(plant.step(s, std::nan(""), 0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(plant.step(s, 100.0, 0, 0.0), std::invalid_argument);
}

TEST_CASE("step: gear-step bound, envelope, non-negative speed and determinism over random drives") {
  const VehiclePlant& plant = bundled_plant();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> torque(-50000.0, 70000.0);
  std::uniform_int_distribution<int> command(-2, 2);
  const auto& e = plant.engine();
  for (int episode = 0; episode < 50; ++episode) {
    PlantState s = plant.initial_state(0.0);
    for (int t = 0; t < 400; ++t) {
      const double tq = torque(rng);
      const int u = command(rng);
      const StepResult a = plant.step(s, tq, u, 0.2);
      const StepResult b = plant.step(s, tq, u, 0.2);
      CHECK(a.state == b.state);
      CHECK(a.fuel_rate == b.fuel_rate);
      CHECK(std::abs(a.state.gear - s.gear) <= 1);
      CHECK(a.state.gear >= 1);
      CHECK(a.state.gear <= kNumGears);
      CHECK(a.state.engine_speed >= e.idle_speed);
      CHECK(a.state.engine_speed <= e.max_speed);
      CHECK(a.state.velocity >= 0.0);
      CHECK(a.fuel_rate >= 0.0);
      CHECK(a.state.fuel_used >= s.fuel_used);
      s = a.state;
    }
  }
}

TEST_CASE("powertrain data: bundled dataset satisfies its invariants") {
  const Powertrain pt = bundled_powertrain();
  CHECK_NOTHROW(pt.engine.validate());
  CHECK_NOTHROW(pt.transmission.validate());
  CHECK(pt.transmission.gear_ratios[0] == doctest::Approx(12.0));
  CHECK(pt.transmission.gear_ratios[9] == doctest::Approx(0.75));
  CHECK(pt.transmission.final_drive_ratio == doctest::Approx(3.9));
  double peak = 0.0;
  for (double t : pt.engine.max_torque.ys()) peak = std::max(peak, t);
  CHECK(peak == doctest::Approx(1600.0));

  VehicleParams bad;
  bad.rotating_mass_factor[3] = 1.7;
  CHECK_THROWS_AS(VehiclePlant(bad, pt), std::invalid_argument);
}

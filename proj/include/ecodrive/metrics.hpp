#pragma once

#include <stdexcept>
#include <vector>

namespace ecodrive {

inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kMillilitersPerGallon = 3785.41;

/// One simulation step t -> t + dt.
struct StepRecord {
  double time = 0.0;
  double lead_position = 0.0;
  double lead_speed = 0.0;
  double next_lead_position = 0.0;
  double position = 0.0;
  double next_position = 0.0;
  double speed = 0.0;
  double accel = 0.0;          // A_e(t)
  double desired_accel = 0.0;  // A_des(t)
  double next_accel = 0.0;     // A_e(t + dt)
  int gear = 1;
  int next_gear = 1;
  int gear_cmd = 0;            // command sent to the plant
  double torque = 0.0;         // applied wheel torque, N*m
  double source_torque = 0.0;
  int source_gear_cmd = 0;
  double engine_speed = 0.0;   // rad/s
  double fuel_rate = 0.0;      // g/s
  double fuel_used = 0.0;      // g, cumulative after the step
  double reward = 0.0;
  bool residual_applied = false;
};

struct Metrics {
  double mpg = 0.0;
  double accel_rmse = 0.0;
  int shift_count = 0;
  double travel_time = 0.0;  // s the ego needs to cover the lead's distance
  double fuel_used = 0.0;    // g
  double distance = 0.0;     // m
  double reward_sum = 0.0;
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// miles / gallons, with fuel mass converted by density (g/mL).
double miles_per_gallon(double distance_m, double fuel_g, double fuel_density);

/// MPG from distance and fuel; RMSE of A_des(t) against A_e(t + dt); shift
/// count as the summed absolute gear changes; travel time as the log
/// duration scaled by lead distance over ego distance.
Metrics compute_metrics(const std::vector<StepRecord>& log, double dt, double fuel_density);

}  // namespace ecodrive

#pragma once

#include <optional>
#include <stdexcept>

#include "ecodrive/drive_cycle.hpp"

namespace ecodrive {

/// Raised when the ego vehicle reaches the lead (gap <= 0).
class CollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Intelligent Driver Model parameters for a heavy vehicle.
struct IdmParams {
  double desired_speed = 30.0;   // v0, m/s
  double headway_time = 3.0;     // T_h, s
  double max_accel = 2.0;        // a, m/s^2
  double comfort_decel = 1.5;    // b, m/s^2
  double accel_exponent = 4.0;   // delta
  double jam_distance = 4.0;     // s0, m
  double max_decel = 3.0;        // lower clamp on the output, m/s^2

  void validate() const;
};

struct LeadState {
  double position = 0.0;
  double velocity = 0.0;
};

/// a = a_max [1 - (v/v0)^delta - (s*/gap)^2],
/// s* = s0 + v T_h + v (v - v_lead) / (2 sqrt(a_max b)),
/// clamped to [-max_decel, max_accel]. Throws CollisionError when gap <= 0.
double desired_acceleration(double ego_speed, double gap, double lead_speed, const IdmParams& p);

/// Spacing s0 + v T_h used to start an episode behind the lead.
double initial_gap(double ego_speed, const IdmParams& p);

/// Lead state at time t; nullopt once t passes the end of the cycle.
std::optional<LeadState> lead_trajectory(const DriveCycle& cycle, double t);

}  // namespace ecodrive

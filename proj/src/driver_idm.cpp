#include "ecodrive/driver_idm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ecodrive {

void IdmParams::validate() const {
  if (!(desired_speed > 0 && headway_time > 0 && max_accel > 0 && comfort_decel > 0 && jam_distance > 0 &&
        max_decel > 0 && accel_exponent >= 1)) {
    throw std::invalid_argument("IdmParams: parameters must be positive and the exponent >= 1");
  }
}

double desired_acceleration(double ego_speed, double gap, double lead_speed, const IdmParams& p) {
  if (!(gap > 0.0)) throw CollisionError("collision: gap " + std::to_string(gap) + " m");
  const double s_star = p.jam_distance + ego_speed * p.headway_time +
                        ego_speed * (ego_speed - lead_speed) / (2.0 * std::sqrt(p.max_accel * p.comfort_decel));
  const double free_road = std::pow(ego_speed / p.desired_speed, p.accel_exponent);
  const double interaction = (s_star / gap) * (s_star / gap);
  const double a = p.max_accel * (1.0 - free_road - interaction);
  return std::clamp(a, -p.max_decel, p.max_accel);
}

double initial_gap(double ego_speed, const IdmParams& p) { return p.jam_distance + ego_speed * p.headway_time; }

std::optional<LeadState> lead_trajectory(const DriveCycle& cycle, double t) {
  if (t < 0.0 || t > cycle.duration() + 1e-9) return std::nullopt;
  return LeadState{cycle.position_at(t), cycle.speed_at(t)};
}

}  // namespace ecodrive

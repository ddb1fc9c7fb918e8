#include "ecodrive/metrics.hpp"

#include <cmath>
#include <cstdlib>

namespace ecodrive {

double miles_per_gallon(double distance_m, double fuel_g, double fuel_density) {
  if (!(distance_m > 0)) throw MetricsError("distance must be positive for MPG");
  if (!(fuel_g > 0)) throw MetricsError("fuel used must be positive for MPG");
  return (distance_m / kMetersPerMile) / (fuel_g / fuel_density / kMillilitersPerGallon);
}

Metrics compute_metrics(const std::vector<StepRecord>& log, double dt, double fuel_density) {
  if (log.empty()) throw MetricsError("empty step log");
  Metrics m;
  const StepRecord& first = log.front();
  const StepRecord& last = log.back();
  m.distance = last.next_position - first.position;
  if (!(m.distance > 0)) throw MetricsError("ego distance is zero");
  double sq = 0.0;
  for (const StepRecord& s : log) {
    const double e = s.desired_accel - s.next_accel;
    sq += e * e;
    m.shift_count += std::abs(s.next_gear - s.gear);
    m.reward_sum += s.reward;
    m.fuel_used += s.fuel_rate * dt;
  }
  m.accel_rmse = std::sqrt(sq / static_cast<double>(log.size()));
  m.mpg = miles_per_gallon(m.distance, m.fuel_used, fuel_density);
  const double lead_distance = last.next_lead_position - first.lead_position;
  m.travel_time = static_cast<double>(log.size()) * dt * lead_distance / m.distance;
  return m;
}

}  // namespace ecodrive

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace ecodrive {

/// Lead-vehicle speed trace sampled at uniform 1 s spacing from t = 0.
/// Between samples the speed is linear; position is its exact integral.
class DriveCycle {
 public:
  DriveCycle() = default;
  /// Speeds at t = 0, 1, 2, ... s. Throws on negative or non-finite speeds.
  DriveCycle(std::string name, std::vector<double> speeds);

  const std::string& name() const { return name_; }
  const std::vector<double>& speeds() const { return speeds_; }
  std::size_t size() const { return speeds_.size(); }
  double duration() const { return speeds_.empty() ? 0.0 : static_cast<double>(speeds_.size() - 1); }

  /// Valid for t in [0, duration()]; clamped outside.
  double speed_at(double t) const;
  double position_at(double t) const;

  double mean_speed() const;
  double distance() const { return position_at(duration()); }

 private:
  std::string name_;
  std::vector<double> speeds_;
  std::vector<double> cumulative_;  // position at each sample time
};

struct NoisePolicy {
  double amplitude = 1.5;  // m/s
  double period = 60.0;    // s between resamples
};

/// Parses "time, speed" rows (s, m/s). Times must start at 0 and increase
/// strictly; traces not on a 1 s grid are resampled linearly onto one.
/// Errors name the offending line.
DriveCycle load_cycle(const std::filesystem::path& path);

/// Adds a piecewise-constant offset drawn uniformly from
/// [-amplitude, +amplitude] per period block, flooring speeds at zero.
/// Block count is ceil(duration / period); the final sample joins the last block.
DriveCycle perturb_cycle(const DriveCycle& cycle, const NoisePolicy& noise, std::mt19937_64& rng,
                         std::vector<double>* offsets = nullptr);

}  // namespace ecodrive

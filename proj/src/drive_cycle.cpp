#include "ecodrive/drive_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ecodrive/csv.hpp"

namespace ecodrive {

DriveCycle::DriveCycle(std::string name, std::vector<double> speeds)
    : name_(std::move(name)), speeds_(std::move(speeds)) {
  if (speeds_.empty()) throw std::invalid_argument("DriveCycle: no samples");
  for (double v : speeds_) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("DriveCycle: speeds must be finite and >= 0");
  }
  cumulative_.resize(speeds_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < speeds_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + 0.5 * (speeds_[i - 1] + speeds_[i]);
  }
}

double DriveCycle::speed_at(double t) const {
  t = std::clamp(t, 0.0, duration());
  const auto i = std::min(static_cast<std::size_t>(t), speeds_.size() - 1);
  if (i + 1 >= speeds_.size()) return speeds_.back();
  const double frac = t - static_cast<double>(i);
  return speeds_[i] + frac * (speeds_[i + 1] - speeds_[i]);
}

double DriveCycle::position_at(double t) const {
  t = std::clamp(t, 0.0, duration());
  const auto i = std::min(static_cast<std::size_t>(t), speeds_.size() - 1);
  if (i + 1 >= speeds_.size()) return cumulative_.back();
  const double frac = t - static_cast<double>(i);
  // Integral of the linear segment from its start to t, kept inside the
  // segment's endpoints so rounding cannot make position run backwards.
  const double x = cumulative_[i] + frac * speeds_[i] + 0.5 * frac * frac * (speeds_[i + 1] - speeds_[i]);
  return std::clamp(x, cumulative_[i], cumulative_[i + 1]);
}

double DriveCycle::mean_speed() const {
  return std::accumulate(speeds_.begin(), speeds_.end(), 0.0) / static_cast<double>(speeds_.size());
}

DriveCycle load_cycle(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::vector<double> times, speeds;
  for (const CsvRow& row : read_csv(path)) {
    if (times.empty() && speeds.empty() && !looks_numeric(row.fields[0])) continue;  // header
    if (row.fields.size() != 2) throw ParseError(name, row.line, "expected two columns (time, speed)");
    const double t = parse_number(row.fields[0], name, row.line);
    const double v = parse_number(row.fields[1], name, row.line);
    if (v < 0.0) throw ParseError(name, row.line, "negative speed");
    if (times.empty() && t != 0.0) throw ParseError(name, row.line, "cycle must start at t = 0");
    if (!times.empty() && !(t > times.back())) throw ParseError(name, row.line, "time must increase strictly");
    times.push_back(t);
    speeds.push_back(v);
  }
  if (times.empty()) throw ParseError(name, "no samples");

  bool uniform = true;
  for (std::size_t i = 0; i < times.size(); ++i) uniform = uniform && times[i] == static_cast<double>(i);
  if (!uniform) {
    std::vector<double> resampled;
    const auto last = static_cast<std::size_t>(std::floor(times.back()));
    std::size_t k = 0;
    for (std::size_t s = 0; s <= last; ++s) {
      const double t = static_cast<double>(s);
      while (k + 1 < times.size() && times[k + 1] < t) ++k;
      if (k + 1 >= times.size() || times[k] == t) {
        resampled.push_back(speeds[k]);
      } else {
        const double frac = (t - times[k]) / (times[k + 1] - times[k]);
        resampled.push_back(speeds[k] + frac * (speeds[k + 1] - speeds[k]));
      }
    }
    speeds = std::move(resampled);
  }
  return DriveCycle(path.stem().string(), std::move(speeds));
}

DriveCycle perturb_cycle(const DriveCycle& cycle, const NoisePolicy& noise, std::mt19937_64& rng,
                         std::vector<double>* offsets) {
  if (noise.amplitude < 0.0 || !(noise.period > 0.0)) throw std::invalid_argument("perturb_cycle: bad noise policy");
  const auto blocks = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cycle.duration() / noise.period)));
  std::vector<double> draws(blocks, 0.0);
  std::uniform_real_distribution<double> offset(-noise.amplitude, noise.amplitude);
  for (double& d : draws) d = noise.amplitude > 0.0 ? offset(rng) : 0.0;

  std::vector<double> speeds = cycle.speeds();
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    const auto block = std::min(blocks - 1, static_cast<std::size_t>(static_cast<double>(i) / noise.period));
    speeds[i] = std::max(0.0, speeds[i] + draws[block]);
  }
  if (offsets) *offsets = draws;
  return DriveCycle(cycle.name(), std::move(speeds));
}

}  // namespace ecodrive

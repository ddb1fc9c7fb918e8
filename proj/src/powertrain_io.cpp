#include "ecodrive/powertrain_io.hpp"

#include "ecodrive/csv.hpp"

namespace ecodrive {
namespace {

PiecewiseLinear load_curve(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::vector<double> xs, ys;
  for (const CsvRow& row : read_csv(path)) {
    if (row.fields.size() != 2) throw ParseError(name, row.line, "expected two columns (rpm, N*m)");
    xs.push_back(parse_number(row.fields[0], name, row.line) * kRpmToRadPerSec);
    ys.push_back(parse_number(row.fields[1], name, row.line));
    if (xs.size() > 1 && !(xs.back() > xs[xs.size() - 2])) {
      throw ParseError(name, row.line, "engine speeds must be strictly increasing");
    }
  }
  if (xs.size() < 2) throw ParseError(name, "need at least two rows");
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

BilinearGrid load_fuel_map(const std::filesystem::path& path) {
  const std::string name = path.string();
  const auto rows = read_csv(path);
  if (rows.size() < 3) throw ParseError(name, "fuel map needs a header and at least two rows");
  std::vector<double> torques;
  for (std::size_t j = 1; j < rows[0].fields.size(); ++j) {
    torques.push_back(parse_number(rows[0].fields[j], name, rows[0].line));
  }
  if (torques.size() < 2) throw ParseError(name, rows[0].line, "need at least two torque breakpoints");
  std::vector<double> speeds, values;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const CsvRow& row = rows[i];
    if (row.fields.size() != torques.size() + 1) {
      throw ParseError(name, row.line, "expected " + std::to_string(torques.size() + 1) + " columns");
    }
    speeds.push_back(parse_number(row.fields[0], name, row.line) * kRpmToRadPerSec);
    for (std::size_t j = 1; j < row.fields.size(); ++j) {
      values.push_back(parse_number(row.fields[j], name, row.line));
    }
  }
  try {
    return BilinearGrid(std::move(speeds), std::move(torques), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ParseError(name, e.what());
  }
}

TransmissionSpec load_gears(const std::filesystem::path& path) {
  const std::string name = path.string();
  const auto rows = read_csv(path);
  if (rows.size() != kNumGears + 2) {
    throw ParseError(name, "expected 10 gear ratios, final drive and efficiency (12 lines)");
  }
  TransmissionSpec t;
  for (int g = 0; g < kNumGears; ++g) t.gear_ratios[g] = parse_number(rows[g].fields.at(0), name, rows[g].line);
  t.final_drive_ratio = parse_number(rows[kNumGears].fields.at(0), name, rows[kNumGears].line);
  t.driveline_efficiency = parse_number(rows[kNumGears + 1].fields.at(0), name, rows[kNumGears + 1].line);
  return t;
}

}  // namespace

Powertrain load_powertrain(const std::filesystem::path& dir) {
  Powertrain p;
  EngineSpec& e = p.engine;
  e.max_torque = load_curve(dir / "torque_curve.csv");
  e.idle_speed = e.max_torque.x_min();
  e.max_speed = e.max_torque.x_max();
  const auto brake_path = dir / "engine_brake_curve.csv";
  if (std::filesystem::exists(brake_path)) {
    e.max_brake_torque = load_curve(brake_path);
  } else {
    std::vector<double> ys;
    for (double t : e.max_torque.ys()) ys.push_back(-0.1 * t);
    e.max_brake_torque = PiecewiseLinear(e.max_torque.xs(), std::move(ys));
  }
  e.fuel_map = load_fuel_map(dir / "fuel_map.csv");
  e.idle_fuel_rate = e.fuel_map(e.idle_speed, 0.0);
  p.transmission = load_gears(dir / "gears.csv");
  e.validate();
  p.transmission.validate();
  return p;
}

std::filesystem::path bundled_data_dir() { return ECODRIVE_DATA_DIR; }

Powertrain bundled_powertrain() { return load_powertrain(bundled_data_dir() / "powertrain"); }

}  // namespace ecodrive

#pragma once

#include <filesystem>

#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive {

inline constexpr double kRpmToRadPerSec = 3.14159265358979323846 / 30.0;

/// Loads a powertrain dataset directory:
///
///   fuel_map.csv           header row of torque breakpoints (N*m) after a
///                          label cell, then rows "rpm, g/s, g/s, ...".
///   torque_curve.csv       "rpm, N*m" rows. The first and last rpm define the
///                          idle and maximum engine speeds.
///   gears.csv              ten ratios, one per line, then the final drive,
///                          then the driveline efficiency.
///   engine_brake_curve.csv optional "rpm, N*m" rows (values <= 0). When
///                          absent, engine braking is 10% of max torque.
///
/// The idle fuel rate is the fuel map value at idle speed and zero torque.
Powertrain load_powertrain(const std::filesystem::path& dir);

/// The dataset shipped under data/powertrain.
Powertrain bundled_powertrain();

std::filesystem::path bundled_data_dir();

}  // namespace ecodrive

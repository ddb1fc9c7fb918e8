#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecodrive/evaluation.hpp"
#include "ecodrive/training.hpp"

namespace ecodrive {

/// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double v);

nlohmann::json metrics_json(const Metrics& m);
nlohmann::json train_metrics_json(const RunConfig& cfg, const TrainResult& result);
nlohmann::json evaluation_json(const RunConfig& cfg, const EvaluationResult& result);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string learning_curve_csv(const std::vector<CurveRow>& rows);
std::string steps_csv(const std::vector<StepRecord>& steps, const std::string& label);

/// Data rows of a CSV file with a header line; `header` receives the header.
std::vector<std::vector<std::string>> read_csv_table(const std::filesystem::path& path, std::vector<std::string>& header);

/// Moving average over the trailing `window` entries (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& v, int window);

/// Writes fig_learning_curve.csv (agent, cycle, mpg, mpg_ma5) and
/// fig_timeseries.csv (agent, time, velocity, gear, torque) from one or more
/// training run directories into `out`.
void write_plot_data(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out);

}  // namespace ecodrive

#include "ecodrive/outputs.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ecodrive/csv.hpp"

namespace ecodrive {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"mpg", m.mpg},
          {"accel_rmse", m.accel_rmse},
          {"shift_count", m.shift_count},
          {"travel_time", m.travel_time},
          {"fuel_used", m.fuel_used},
          {"distance", m.distance},
          {"reward_sum", m.reward_sum}};
}

nlohmann::json train_metrics_json(const RunConfig& cfg, const TrainResult& r) {
  nlohmann::json j;
  j["agent"] = to_string(cfg.agent);
  j["seed"] = cfg.seed;
  j["cycles_trained"] = static_cast<int>(r.curve.size());
  j["env_steps"] = r.env_steps;
  j["final_evaluation"] = metrics_json(r.final_eval.metrics);
  j["final_evaluation_collided"] = r.final_eval.collided;
  j["gate_active"] = r.agent.gate().active;
  j["gate_cycle"] = r.gate_cycle ? nlohmann::json(*r.gate_cycle) : nlohmann::json(nullptr);
  j["gate_step"] = r.gate_step ? nlohmann::json(*r.gate_step) : nlohmann::json(nullptr);
  int collisions = 0;
  for (const auto& row : r.curve) collisions += row.train_collided ? 1 : 0;
  j["training_collisions"] = collisions;
  return j;
}

nlohmann::json evaluation_json(const RunConfig& cfg, const EvaluationResult& r) {
  auto stat = [](const Stat& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  nlohmann::json j;
  j["agent"] = to_string(cfg.agent);
  j["seed"] = cfg.seed;
  j["cycles"] = nlohmann::json::array();
  for (const auto& c : r.cycles) {
    j["cycles"].push_back({{"cycle", c.cycle},
                           {"repetitions", c.repetitions},
                           {"collisions", c.collisions},
                           {"mpg", stat(c.mpg)},
                           {"accel_rmse", stat(c.accel_rmse)},
                           {"shift_count", stat(c.shift_count)},
                           {"travel_time", stat(c.travel_time)},
                           {"fuel_used", stat(c.fuel_used)},
                           {"distance", stat(c.distance)}});
  }
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string learning_curve_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream s;
  s << "cycle,mpg,accel_rmse,shift_count,travel_time,fuel_g,distance_m,reward_sum,gate_active,train_collided,"
       "eval_collided,critic_loss,policy_updates\n";
  for (const auto& r : rows) {
    const Metrics& m = r.metrics;
    s << r.cycle << ',' << format_number(m.mpg) << ',' << format_number(m.accel_rmse) << ',' << m.shift_count << ','
      << format_number(m.travel_time) << ',' << format_number(m.fuel_used) << ',' << format_number(m.distance) << ','
      << format_number(m.reward_sum) << ',' << (r.gate_active ? 1 : 0) << ',' << (r.train_collided ? 1 : 0) << ','
      << (r.eval_collided ? 1 : 0) << ',' << format_number(r.critic_loss) << ',' << r.policy_updates << '\n';
  }
  return s.str();
}

std::string steps_csv(const std::vector<StepRecord>& steps, const std::string& label) {
  std::ostringstream s;
  s << "label,time,velocity,accel,desired_accel,gear,gear_cmd,torque,source_torque,source_gear_cmd,engine_speed,"
       "fuel_rate,reward,position,lead_position,lead_speed,residual_applied\n";
  for (const auto& r : steps) {
    s << label << ',' << format_number(r.time) << ',' << format_number(r.speed) << ',' << format_number(r.accel) << ','
      << format_number(r.desired_accel) << ',' << r.gear << ',' << r.gear_cmd << ',' << format_number(r.torque) << ','
      << format_number(r.source_torque) << ',' << r.source_gear_cmd << ',' << format_number(r.engine_speed) << ','
      << format_number(r.fuel_rate) << ',' << format_number(r.reward) << ',' << format_number(r.position) << ','
      << format_number(r.lead_position) << ',' << format_number(r.lead_speed) << ',' << (r.residual_applied ? 1 : 0)
      << '\n';
  }
  return s.str();
}

std::vector<std::vector<std::string>> read_csv_table(const std::filesystem::path& path,
                                                     std::vector<std::string>& header) {
  const std::vector<CsvRow> rows = read_csv(path);
  if (rows.empty()) throw ParseError(path.string(), 0, "empty table");
  header = rows.front().fields;
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> f = rows[i].fields;
    f.resize(header.size());
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> moving_average(const std::vector<double>& v, int window) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t lo = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = lo; k <= i; ++k) sum += v[k];
    out[i] = sum / static_cast<double>(i + 1 - lo);
  }
  return out;
}

namespace {

std::size_t column(const std::vector<std::string>& header, const std::string& name, const std::filesystem::path& p) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError(p.string(), 1, "missing column '" + name + "'");
}

std::string agent_label(const std::filesystem::path& run) {
  std::ifstream in(run / "metrics.json");
  if (!in) return run.filename().string();
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("agent")) return run.filename().string();
  return j["agent"].get<std::string>();
}

}  // namespace

void write_plot_data(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out) {
  std::ostringstream curve;
  std::ostringstream series;
  curve << "agent,cycle,mpg,mpg_ma5\n";
  series << "agent,time,velocity,gear,torque\n";
  for (const auto& run : runs) {
    const std::string label = agent_label(run);
    std::vector<std::string> header;
    const auto lc_path = run / "learning_curve.csv";
    const auto rows = read_csv_table(lc_path, header);
    const std::size_t c_cycle = column(header, "cycle", lc_path);
    const std::size_t c_mpg = column(header, "mpg", lc_path);
    std::vector<double> mpg;
    for (const auto& r : rows) mpg.push_back(r[c_mpg].empty() ? std::nan("") : parse_number(r[c_mpg], lc_path.string(), 0));
    const std::vector<double> ma = moving_average(mpg, 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      curve << label << ',' << rows[i][c_cycle] << ',' << format_number(mpg[i]) << ',' << format_number(ma[i]) << '\n';
    }

    const auto st_path = run / "steps.csv";
    if (std::filesystem::exists(st_path)) {
      const auto steps = read_csv_table(st_path, header);
      const std::size_t c_t = column(header, "time", st_path);
      const std::size_t c_v = column(header, "velocity", st_path);
      const std::size_t c_g = column(header, "gear", st_path);
      const std::size_t c_q = column(header, "torque", st_path);
      for (const auto& r : steps) series << label << ',' << r[c_t] << ',' << r[c_v] << ',' << r[c_g] << ',' << r[c_q] << '\n';
    }
  }
  write_text(out / "fig_learning_curve.csv", curve.str());
  write_text(out / "fig_timeseries.csv", series.str());
}

}  // namespace ecodrive

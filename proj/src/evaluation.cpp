#include "ecodrive/evaluation.hpp"

#include <cmath>

namespace ecodrive {

Stat summarize(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return {std::nan(""), std::nan("")};
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(v.size() - 1));
  }
  return s;
}

EvaluationResult evaluate(const RunConfig& cfg, const Agent& agent, const std::vector<DriveCycle>& cycles, int reps) {
  if (reps < 1) throw std::invalid_argument("evaluate: repetitions must be >= 1");
  const Environment env = Environment::from_config(cfg);
  const NoisePolicy noise{cfg.noise_amplitude, cfg.noise_period};
  EvaluationResult out;
  for (std::size_t ci = 0; ci < cycles.size(); ++ci) {
    CycleSummary sum;
    sum.cycle = cycles[ci].name();
    sum.repetitions = reps;
    std::vector<double> mpg, rmse, shifts, time, fuel, dist;
    for (int r = 0; r < reps; ++r) {
      std::mt19937_64 rng = make_rng(cfg.seed, Stream::kEvaluation, (static_cast<std::uint64_t>(ci) << 32) | r);
      const DriveCycle noisy = perturb_cycle(cycles[ci], noise, rng);
      EpisodeResult ep = run_episode(env, agent, noisy, ActMode::kGreedy, rng);
      if (ep.collided || !ep.metrics_valid) {
        ++sum.collisions;
      } else {
        const Metrics& m = ep.metrics;
        sum.runs.push_back(m);
        mpg.push_back(m.mpg);
        rmse.push_back(m.accel_rmse);
        shifts.push_back(m.shift_count);
        time.push_back(m.travel_time);
        fuel.push_back(m.fuel_used);
        dist.push_back(m.distance);
      }
      if (r == 0) out.first_runs.push_back(std::move(ep));
    }
    sum.mpg = summarize(mpg);
    sum.accel_rmse = summarize(rmse);
    sum.shift_count = summarize(shifts);
    sum.travel_time = summarize(time);
    sum.fuel_used = summarize(fuel);
    sum.distance = summarize(dist);
    out.cycles.push_back(std::move(sum));
  }
  return out;
}

}  // namespace ecodrive

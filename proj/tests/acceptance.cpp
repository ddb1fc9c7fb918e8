#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "ecodrive/config.hpp"
#include "ecodrive/evaluation.hpp"
#include "ecodrive/outputs.hpp"
#include "ecodrive/training.hpp"

using namespace ecodrive;
namespace fs = std::filesystem;

namespace {

struct Options {
  fs::path config = fs::path(ECODRIVE_SOURCE_DIR) / "configs" / "desk.cfg";
  fs::path out = fs::temp_directory_path() / "ecodrive_acceptance";
  int train_cycles = 0;  // 0 keeps the config value
  int reps = 25;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

bool failed_any = false;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %d %-24s %s  %s\n", id, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) failed_any = true;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs the doctest cases from the given test sources; returns (ok, seconds).
std::pair<bool, double> run_suite(const char* source_files, const char* cases = "*") {
  doctest::Context ctx;
  ctx.setOption("source-file", source_files);
  ctx.setOption("test-case", cases);
  ctx.setOption("no-intro", true);
  ctx.setOption("no-version", true);
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = ctx.run();
  return {rc == 0 && !ctx.shouldExit(), seconds_since(t0)};
}

void write_run(const fs::path& dir, const RunConfig& cfg, const TrainResult& r) {
  fs::create_directories(dir);
  write_text(dir / "learning_curve.csv", learning_curve_csv(r.curve));
  write_text(dir / "metrics.json", train_metrics_json(cfg, r).dump(2) + "\n");
}

bool below_or_collided(const CurveRow& row, double baseline) { return row.eval_collided || row.metrics.mpg < baseline; }

// First 1-based cycle whose trailing 5-cycle MPG mean exceeds the baseline.
std::optional<int> first_average_crossing(const std::vector<CurveRow>& curve, double baseline) {
  std::vector<double> mpg;
  for (const auto& row : curve) mpg.push_back(row.eval_collided ? 0.0 : row.metrics.mpg);
  if (mpg.size() < 5) return std::nullopt;
  for (std::size_t i = 4; i < mpg.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = i - 4; k <= i; ++k) s += mpg[k];
    if (s / 5.0 > baseline) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::vector<StepRecord> concat_steps(const std::vector<EpisodeResult>& eps) {
  std::vector<StepRecord> all;
  for (const auto& e : eps) all.insert(all.end(), e.steps.begin(), e.steps.end());
  return all;
}

bool same_step(const StepRecord& x, const StepRecord& y) {
  return x.position == y.position && x.speed == y.speed && x.accel == y.accel && x.torque == y.torque &&
         x.gear == y.gear && x.next_gear == y.next_gear && x.fuel_rate == y.fuel_rate &&
         x.fuel_used == y.fuel_used && x.reward == y.reward;
}

void criterion_3(const RunConfig& base_cfg, const DriveCycle& cycle) {
  RunConfig rpl = base_cfg;
  rpl.agent = AgentKind::kRpl;
  rpl.beta = 0.1;
  rpl.seed = 7;
  rpl.checkpoint_every = 0;
  RunConfig base = rpl;
  base.agent = AgentKind::kBaseline;

  std::vector<EpisodeResult> rpl_eps, base_eps;
  std::optional<long> gate_step;
  TrainOptions ro;
  ro.on_training_episode = [&](int, const EpisodeResult& e) { rpl_eps.push_back(e); };
  rpl.train_cycles = std::min(rpl.train_cycles, 20);
  const TrainResult r = train(rpl, cycle, ro);
  gate_step = r.gate_step;
  base.train_cycles = rpl.train_cycles;
  TrainOptions bo;
  bo.on_training_episode = [&](int, const EpisodeResult& e) { base_eps.push_back(e); };
  train(base, cycle, bo);

  const auto a = concat_steps(rpl_eps);
  const auto b = concat_steps(base_eps);
  std::size_t limit = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < limit; ++k) {
    if (a[k].residual_applied) {
      limit = k;
      break;
    }
  }
  std::size_t first_diff = limit;
  for (std::size_t k = 0; k < limit; ++k) {
    if (!same_step(a[k], b[k])) {
      first_diff = k;
      break;
    }
  }
  const bool pass = limit > 0 && first_diff == limit;
  report(3, "pre-gate identity", pass,
         gate_step ? fmt("gate at step %.0f, residual first applied at step %.0f, %.0f identical steps before it",
                         double(*gate_step), double(limit), double(first_diff))
                   : fmt("gate never opened in %.0f cycles, %.0f identical steps", rpl.train_cycles, double(first_diff)));
}

struct SeedRuns {
  std::uint64_t seed;
  TrainResult rpl, rl;
};

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) throw std::invalid_argument(a + " needs a value");
      return argv[++i];
    };
    if (a == "--config") {
      opt.config = next();
    } else if (a == "--out") {
      opt.out = next();
    } else if (a == "--train-cycles") {
      opt.train_cycles = std::stoi(next());
    } else if (a == "--reps") {
      opt.reps = std::stoi(next());
    } else {
      std::cerr << "usage: acceptance [--config file] [--out dir] [--train-cycles n] [--reps n]\n";
      return 2;
    }
  }

  // 1. Physics oracles.
  {
    const auto [ok, secs] = run_suite("*test_plant.cpp,*test_source_reward.cpp", "step*,resistances*,engine_speed*,"
                                      "fuel_rate*,split_negative*,apply_gear*,power_reserve*,powertrain*,source_*");
    report(1, "physics oracles", ok && secs < 10.0, std::string(ok ? "suite ok" : "suite failed") + fmt(" in %.2f s (limit 10 s)", secs));
  }
  // 2. Numerical core.
  {
    const auto [ok, secs] = run_suite("*test_nn.cpp,*test_mpo.cpp", "backward*,retrace*,e_step*,m_step*");
    report(2, "numerical core", ok && secs < 300.0, std::string(ok ? "suite ok" : "suite failed") + fmt(" in %.1f s (limit 300 s)", secs));
  }

  RunConfig cfg = load_config(opt.config);
  if (opt.train_cycles > 0) cfg.train_cycles = opt.train_cycles;
  cfg.checkpoint_every = 0;
  const DriveCycle cycle = config_cycle(cfg);
  fs::create_directories(opt.out);

  // 3. Pre-gate identity.
  criterion_3(cfg, cycle);

  // Baseline reference: greedy noise-free MPG (learning-curve scale) and noisy evaluations.
  RunConfig base_cfg = cfg;
  base_cfg.agent = AgentKind::kBaseline;
  base_cfg.train_cycles = 1;
  const TrainResult baseline = train(base_cfg, cycle);
  const double base_mpg = baseline.final_eval.metrics.mpg;
  write_run(opt.out / "baseline", base_cfg, baseline);

  std::vector<SeedRuns> runs;
  for (std::uint64_t seed : opt.seeds) {
    std::vector<TrainResult> trained;
    for (AgentKind kind : {AgentKind::kRpl, AgentKind::kRl}) {
      RunConfig c = cfg;
      c.agent = kind;
      c.seed = seed;
      TrainOptions o;
      const auto t0 = std::chrono::steady_clock::now();
      o.on_cycle = [&](const CurveRow& row) {
        if (row.cycle % 25 == 0) {
          std::fprintf(stderr, "[%s seed %llu] cycle %d mpg %.4f gate %d (%.0f s)\n", to_string(kind).c_str(),
                       static_cast<unsigned long long>(seed), row.cycle, row.metrics.mpg, int(row.gate_active),
                       seconds_since(t0));
        }
      };
      trained.push_back(train(c, cycle, o));
      write_run(opt.out / (to_string(kind) + "_seed" + std::to_string(seed)), c, trained.back());
    }
    SeedRuns s{seed, std::move(trained[0]), std::move(trained[1])};
    runs.push_back(std::move(s));
  }

  // 4. Learning speed.
  {
    int a_pass = 0, b_pass = 0;
    std::string detail;
    for (const auto& s : runs) {
      bool a_ok = false;
      std::string a_note = "gate never opened";
      if (s.rpl.gate_cycle) {
        const int g = *s.rpl.gate_cycle;
        std::optional<int> hit;
        for (const auto& row : s.rpl.curve) {
          if (row.cycle >= g && row.cycle <= g + 50 && !below_or_collided(row, base_mpg) && row.metrics.mpg > base_mpg) {
            hit = row.cycle;
            break;
          }
        }
        if (hit) {
          int later = 0, kept = 0;
          for (const auto& row : s.rpl.curve) {
            if (row.cycle <= *hit) continue;
            ++later;
            if (!below_or_collided(row, base_mpg)) ++kept;
          }
          const double frac = later > 0 ? double(kept) / later : 1.0;
          a_ok = frac >= 0.8;
          a_note = fmt("gate %.0f, exceeds at %.0f, kept %.3f", g, *hit, frac);
        } else {
          double best = 0.0;
          for (const auto& row : s.rpl.curve) {
            if (row.cycle >= g && row.cycle <= g + 50 && !row.eval_collided) best = std::max(best, row.metrics.mpg);
          }
          a_note = fmt("gate %.0f, no exceedance within 50 cycles (best %.4f vs %.4f)", g, best, base_mpg);
        }
      }
      if (a_ok) ++a_pass;
      const auto xr = first_average_crossing(s.rpl.curve, base_mpg);
      const auto xl = first_average_crossing(s.rl.curve, base_mpg);
      const bool b_ok = xr && (!xl || *xr < *xl);
      if (b_ok) ++b_pass;
      detail += "seed " + std::to_string(s.seed) + ": (a) " + a_note + "; (b) rpl " +
                (xr ? std::to_string(*xr) : std::string("never")) + " rl " +
                (xl ? std::to_string(*xl) : std::string("never")) + ". ";
    }
    const bool pass = a_pass == static_cast<int>(runs.size()) && b_pass >= 2;
    report(4, "learning speed", pass, fmt("baseline %.4f mpg; ", base_mpg) + detail);
  }

  // 5 and 6. Noisy evaluation after the full budget.
  {
    double mpg_base = 0.0, mpg_rpl = 0.0, mpg_rl = 0.0;
    double rmse_base = 0.0, rmse_rpl = 0.0, rmse_rl = 0.0;
    double tt_base = 0.0, tt_rpl = 0.0, tt_rl = 0.0;
    int collisions = 0;
    nlohmann::json evals = nlohmann::json::object();
    for (const auto& s : runs) {
      RunConfig c = cfg;
      c.seed = s.seed;
      c.agent = AgentKind::kBaseline;
      const EvaluationResult eb = evaluate(c, baseline.agent, {cycle}, opt.reps);
      c.agent = AgentKind::kRpl;
      const EvaluationResult er = evaluate(c, s.rpl.agent, {cycle}, opt.reps);
      c.agent = AgentKind::kRl;
      const EvaluationResult el = evaluate(c, s.rl.agent, {cycle}, opt.reps);
      const std::string key = "seed" + std::to_string(s.seed);
      evals[key]["baseline"] = evaluation_json(c, eb);
      evals[key]["rpl"] = evaluation_json(c, er);
      evals[key]["rl"] = evaluation_json(c, el);
      for (const auto* e : {&eb, &er, &el}) collisions += e->cycles[0].collisions;
      mpg_base += eb.cycles[0].mpg.mean;
      mpg_rpl += er.cycles[0].mpg.mean;
      mpg_rl += el.cycles[0].mpg.mean;
      rmse_base += eb.cycles[0].accel_rmse.mean;
      rmse_rpl += er.cycles[0].accel_rmse.mean;
      rmse_rl += el.cycles[0].accel_rmse.mean;
      tt_base += eb.cycles[0].travel_time.mean;
      tt_rpl += er.cycles[0].travel_time.mean;
      tt_rl += el.cycles[0].travel_time.mean;
    }
    write_text(opt.out / "evaluation.json", evals.dump(2) + "\n");
    const double n = static_cast<double>(runs.size());
    mpg_base /= n, mpg_rpl /= n, mpg_rl /= n;
    rmse_base /= n, rmse_rpl /= n, rmse_rl /= n;
    tt_base /= n, tt_rpl /= n, tt_rl /= n;
    const bool finite = std::isfinite(mpg_rpl) && std::isfinite(mpg_rl);
    const bool order = finite && collisions == 0 && mpg_rl >= mpg_rpl && mpg_rpl >= 1.02 * mpg_base;
    const bool rmse = std::abs(rmse_rpl - rmse_base) <= 0.25 && std::abs(rmse_rl - rmse_base) <= 0.25;
    report(5, "improvement ordering", order && rmse,
           fmt("mpg base %.4f rpl %.4f rl %.4f (need rl >= rpl >= %.4f); ", mpg_base, mpg_rpl, mpg_rl, 1.02 * mpg_base) +
               fmt("rmse base %.3f rpl %.3f rl %.3f; collisions %.0f", rmse_base, rmse_rpl, rmse_rl, collisions));
    const double dr = std::abs(tt_rpl - tt_base) / tt_base;
    const double dl = std::abs(tt_rl - tt_base) / tt_base;
    report(6, "travel time", std::isfinite(dr) && std::isfinite(dl) && dr <= 0.02 && dl <= 0.02,
           fmt("base %.1f s, rpl %+.2f%%, rl %+.2f%% (limit 2%%)", tt_base, 100 * (tt_rpl - tt_base) / tt_base,
               100 * (tt_rl - tt_base) / tt_base));
  }

  // 7. Determinism of the written outputs.
  {
    RunConfig c = cfg;
    c.agent = AgentKind::kRpl;
    c.seed = 11;
    c.train_cycles = std::min(cfg.train_cycles, 5);
    const fs::path d1 = opt.out / "determinism_a", d2 = opt.out / "determinism_b";
    write_run(d1, c, train(c, cycle));
    write_run(d2, c, train(c, cycle));
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const bool m = slurp(d1 / "metrics.json") == slurp(d2 / "metrics.json");
    const bool l = slurp(d1 / "learning_curve.csv") == slurp(d2 / "learning_curve.csv");
    report(7, "determinism", m && l, std::string("metrics.json ") + (m ? "identical" : "differs") +
                                         ", learning_curve.csv " + (l ? "identical" : "differs"));
  }

  return failed_any ? 1 : 0;
}

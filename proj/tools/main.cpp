// oedda command-line driver.
//
//   oedda truth  --out DIR             truth trajectory, observations and free run
//   oedda run    --out DIR             one assimilation run
//   oedda sweep  --out DIR             penalty grid (or robustness grid with --robustness)
//   oedda lcurve --sweep DIR --time T  L-curve table and elbow from a penalty sweep
//   oedda bench  --out DIR             fixed inflation x radius grid
//
// Every subcommand accepts --config FILE, --seed N and one --<key> flag per
// configuration key (see `oedda run --help`). Exit codes: 0 success,
// 2 a run diverged, 3 configuration error, 1 any other failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oedda/artifact_io.hpp"
#include "oedda/config.hpp"
#include "oedda/errors.hpp"
#include "oedda/experiment.hpp"

namespace fs = std::filesystem;
using namespace oedda;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitConfig = 3;

struct CommonOptions {
  std::string config_file;
  std::optional<long long> seed;
  std::map<std::string, std::string> overrides;
  std::string out_dir = "oedda_out";
  int jobs = 0;
};

void add_common(CLI::App* app, CommonOptions& opts, bool with_out = true) {
  app->add_option("--config", opts.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", opts.seed, "base seed; sets seed_truth/obs/ensemble/filter to N, N+1, N+2, N+3");
  if (with_out) app->add_option("--out", opts.out_dir, "output directory");
  for (const std::string& key : config_keys()) {
    if (key == "seed") continue;
    app->add_option_function<std::string>(
           "--" + key, [&opts, key](const std::string& v) { opts.overrides[key] = v; }, "config key " + key)
        ->group("Configuration keys");
  }
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  ExperimentConfig cfg;
  if (!opts.config_file.empty()) cfg = load_config(opts.config_file);
  KeyValues kv(opts.overrides.begin(), opts.overrides.end());
  apply_key_values(cfg, kv);
  if (opts.seed) {
    if (*opts.seed < 0) throw ConfigError("--seed must be non-negative");
    cfg.set_seed(static_cast<std::uint64_t>(*opts.seed));
  }
  cfg.validate();
  return cfg;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::ofstream open_file(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

std::string fmt(double v) { return std::isnan(v) ? "nan" : format_double(v); }

int cmd_truth(const CommonOptions& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const TwinSetup twin = prepare_twin(cfg);
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);

  auto truth = open_file(dir / "truth.csv");
  truth << "time";
  for (int i = 1; i <= cfg.model.K; ++i) truth << ",x_" << i;
  truth << '\n';
  for (Eigen::Index k = 0; k < twin.truth.states.cols(); ++k) {
    truth << fmt(twin.truth.times[static_cast<std::size_t>(k)]);
    for (Eigen::Index i = 0; i < twin.truth.states.rows(); ++i) truth << ',' << fmt(twin.truth.states(i, k));
    truth << '\n';
  }

  const ObservationSet& obs = twin.observations;
  auto y = open_file(dir / "observations.csv");
  y << "time";
  for (int g : obs.h.grid_indices()) y << ",y_" << (g + 1);
  y << '\n';
  for (Eigen::Index k = 1; k < obs.values.cols(); ++k) {
    y << fmt(twin.truth.times[static_cast<std::size_t>(k)]);
    for (Eigen::Index i = 0; i < obs.values.rows(); ++i) y << ',' << fmt(obs.values(i, k));
    y << '\n';
  }

  auto fr = open_file(dir / "free_run.csv");
  fr << "time,rmse\n";
  for (std::size_t k = 0; k < twin.free_run_rmse.size(); ++k) {
    fr << fmt(twin.truth.times[k + 1]) << ',' << fmt(twin.free_run_rmse[k]) << '\n';
  }

  auto ic = open_file(dir / "initial_condition.csv");
  ic << "index,truth_large_scale,background_mean,b0_variance\n";
  for (int i = 0; i < cfg.model.K; ++i) {
    ic << (i + 1) << ',' << fmt(twin.truth.initial_condition[i]) << ',' << fmt(twin.prior.background_mean[i]) << ','
       << fmt(twin.prior.b0_variances[i]) << '\n';
  }

  nlohmann::json j;
  j["obs_error_variance"] = obs.r(0, 0);
  j["n_observations"] = obs.h.obs_size();
  j["cycles"] = twin.truth.states.cols() - 1;
  j["free_run_window_rmse"] = twin.free_run_window_rmse;
  auto meta = open_file(dir / "truth.json");
  meta << j.dump(2) << '\n';
  save_config((dir / "config.txt").string(), cfg);
  std::cout << "truth: " << twin.truth.states.cols() - 1 << " cycles, obs error sd " << fmt(std::sqrt(obs.r(0, 0)))
            << ", free-run window RMSE " << fmt(twin.free_run_window_rmse) << '\n';
  return kExitOk;
}

int cmd_run(const CommonOptions& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const RunArtifact art = run_assimilation(cfg);
  write_run_artifact(opts.out_dir, art);
  const RunSummary& s = art.summary;
  std::cout << to_string(cfg.mode) << ": cycles " << s.cycles_completed << ", window analysis RMSE "
            << fmt(s.window_analysis_rmse) << ", free run " << fmt(s.free_run_window_rmse) << ", mean iters "
            << fmt(s.mean_iters) << '\n';
  if (s.diverged) {
    std::cerr << "diverged: " << s.divergence_reason << '\n';
    return kExitDiverged;
  }
  return kExitOk;
}

std::vector<double> penalty_grid(const std::vector<double>& explicit_values, double lo, double hi, int count) {
  if (!explicit_values.empty()) return explicit_values;
  return linspace(lo, hi, count);
}

int cmd_sweep(const CommonOptions& opts, const std::vector<double>& penalties, double pmin, double pmax, int pcount,
              bool robustness, const std::vector<int>& sizes, const std::vector<double>& noises) {
  const ExperimentConfig cfg = resolve_config(opts);
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const int jobs = worker_count(opts.jobs);

  if (robustness) {
    const auto cells = robustness_sweep(cfg, sizes, noises, jobs);
    auto out = open_file(dir / "robustness.csv");
    write_robustness_csv(out, cells);
    bool diverged = false;
    for (const auto& c : cells) {
      std::cout << "Nens " << c.ensemble_size << " noise " << fmt(c.noise_fraction) << ": adaptive "
                << fmt(c.adaptive_rmse) << ", fixed " << fmt(c.fixed_rmse) << ", free run " << fmt(c.free_run_rmse)
                << '\n';
      diverged = diverged || c.adaptive_diverged || c.fixed_diverged;
    }
    return diverged ? kExitDiverged : kExitOk;
  }

  const SweepResult res = penalty_sweep(cfg, penalty_grid(penalties, pmin, pmax, pcount), jobs);
  bool diverged = false;
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", i);
    write_run_artifact(dir / name, res.runs[i]);
    const SweepRow& r = res.rows[i];
    std::cout << "penalty " << fmt(r.penalty) << ": RMSE " << fmt(r.window_rmse) << ", iters " << fmt(r.mean_iters)
              << (r.diverged ? " (diverged)" : "") << '\n';
    diverged = diverged || r.diverged;
  }
  auto out = open_file(dir / "sweep.csv");
  write_sweep_csv(out, res.rows);
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_lcurve(const std::string& sweep_dir, double time, const std::string& out_file) {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(sweep_dir)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("run_", 0) == 0) dirs.push_back(entry.path());
  }
  if (dirs.empty()) throw ConfigError("no run_* directories under '" + sweep_dir + "'");
  std::sort(dirs.begin(), dirs.end());
  std::vector<RunArtifact> runs;
  for (const auto& d : dirs) runs.push_back(read_run_artifact(d));
  std::sort(runs.begin(), runs.end(),
            [](const RunArtifact& a, const RunArtifact& b) { return a.config.penalty < b.config.penalty; });

  const auto points = lcurve_extract(runs, time);
  const std::size_t elbow = lcurve_elbow(points);
  const fs::path out_path = out_file.empty() ? fs::path(sweep_dir) / "lcurve.csv" : fs::path(out_file);
  auto out = open_file(out_path);
  write_lcurve_csv(out, points);

  nlohmann::json j;
  j["time"] = time;
  j["elbow_index"] = elbow;
  j["elbow_penalty"] = points[elbow].penalty;
  auto ej = open_file(out_path.parent_path().empty() ? fs::path("elbow.json") : out_path.parent_path() / "elbow.json");
  ej << j.dump(2) << '\n';
  std::cout << "L-curve at t = " << fmt(time) << ": " << points.size() << " points, elbow penalty "
            << fmt(points[elbow].penalty) << '\n';
  return kExitOk;
}

int cmd_bench(const CommonOptions& opts, int n_inflation, double lo, double hi, const std::vector<double>& radii) {
  ExperimentConfig cfg = resolve_config(opts);
  cfg.mode = RunMode::Fixed;
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const TwinSetup twin = prepare_twin(cfg);
  const std::vector<double> infl = linspace(lo, hi, n_inflation);

  struct Cell {
    double inflation;
    double radius;
    double rmse = 0.0;
    bool diverged = false;
  };
  std::vector<Cell> cells;
  for (double r : radii) {
    for (double l : infl) cells.push_back({l, r});
  }
  const int jobs = worker_count(opts.jobs);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < std::min<int>(jobs, static_cast<int>(cells.size())); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        ExperimentConfig c = cfg;
        c.inflation = cells[i].inflation;
        c.localization_radius = cells[i].radius;
        const RunArtifact art = run_assimilation(c, twin);
        cells[i].rmse = art.summary.window_analysis_rmse;
        cells[i].diverged = art.summary.diverged;
      }
    });
  }
  for (auto& t : pool) t.join();

  auto out = open_file(dir / "bench.csv");
  out << "inflation,radius,window_rmse,diverged\n";
  const Cell* best = nullptr;
  for (const auto& c : cells) {
    out << fmt(c.inflation) << ',' << fmt(c.radius) << ',' << fmt(c.rmse) << ',' << (c.diverged ? 1 : 0) << '\n';
    if (!c.diverged && std::isfinite(c.rmse) && (!best || c.rmse < best->rmse)) best = &c;
  }
  if (best) {
    std::cout << "best: inflation " << fmt(best->inflation) << ", radius " << fmt(best->radius) << ", RMSE "
              << fmt(best->rmse) << " (free run " << fmt(twin.free_run_window_rmse) << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble Kalman filter twin experiments with OED-tuned inflation and localization"};
  app.require_subcommand(1);

  CommonOptions truth_opts, run_opts, sweep_opts, bench_opts;

  auto* truth = app.add_subcommand("truth", "generate truth, observations and the free run");
  add_common(truth, truth_opts);

  auto* run = app.add_subcommand("run", "single assimilation run");
  add_common(run, run_opts);

  auto* sweep = app.add_subcommand("sweep", "penalty sweep or robustness grid");
  add_common(sweep, sweep_opts);
  std::vector<double> penalties;
  double pmin = 0.0, pmax = 0.01;
  int pcount = 21;
  bool robustness = false;
  std::vector<int> sizes{5, 10, 15, 20, 25};
  std::vector<double> noises{0.025, 0.05, 0.1, 0.2, 0.4};
  sweep->add_option("--penalties", penalties, "explicit penalty values")->delimiter(',');
  sweep->add_option("--penalty-min", pmin, "grid start");
  sweep->add_option("--penalty-max", pmax, "grid end");
  sweep->add_option("--penalty-count", pcount, "grid size")->check(CLI::PositiveNumber);
  sweep->add_flag("--robustness", robustness, "ensemble-size x noise-level grid instead of a penalty grid");
  sweep->add_option("--ensemble-sizes", sizes, "robustness grid sizes")->delimiter(',');
  sweep->add_option("--noise-levels", noises, "robustness grid noise fractions")->delimiter(',');
  sweep->add_option("--jobs", sweep_opts.jobs, "worker threads (0 = hardware concurrency)");

  auto* lcurve = app.add_subcommand("lcurve", "L-curve table from a penalty sweep directory");
  std::string sweep_dir, lcurve_out;
  double lcurve_time = 70.0;
  lcurve->add_option("--sweep", sweep_dir, "directory written by `oedda sweep`")->required()->check(CLI::ExistingDirectory);
  lcurve->add_option("--time", lcurve_time, "cycle time");
  lcurve->add_option("--out", lcurve_out, "output CSV (default <sweep>/lcurve.csv)");

  auto* bench = app.add_subcommand("bench", "fixed inflation x localization radius grid");
  add_common(bench, bench_opts);
  int n_inflation = 51;
  double infl_lo = 1.0, infl_hi = 1.5;
  std::vector<double> radii{0.5, 1.0, 2.0, 4.0, 8.0, 1000.0};
  bench->add_option("--inflation-count", n_inflation, "number of inflation values")->check(CLI::PositiveNumber);
  bench->add_option("--inflation-min", infl_lo, "smallest inflation factor");
  bench->add_option("--inflation-max", infl_hi, "largest inflation factor");
  bench->add_option("--radii", radii, "localization radii (a large value stands in for no localization)")
      ->delimiter(',');
  bench->add_option("--jobs", bench_opts.jobs, "worker threads (0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*truth) return cmd_truth(truth_opts);
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, penalties, pmin, pmax, pcount, robustness, sizes, noises);
    if (*lcurve) return cmd_lcurve(sweep_dir, lcurve_time, lcurve_out);
    if (*bench) return cmd_bench(bench_opts, n_inflation, infl_lo, infl_hi, radii);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

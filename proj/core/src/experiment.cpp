#include "oedda/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "oedda/errors.hpp"
#include "oedda/oed.hpp"

namespace oedda {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vector standard_normal(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Vector ensemble_stdev(const Ensemble& ens) {
  const Matrix x = AnomalyMatrix::from_ensemble(ens).columns();
  return (x.rowwise().squaredNorm() / static_cast<double>(ens.size() - 1)).cwiseSqrt();
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

LocalizationSettings fixed_localization(const ExperimentConfig& cfg, const ObservationOperator& h) {
  LocalizationSettings loc;
  loc.space = cfg.localization_space;
  loc.family = cfg.kernel;
  const int n = cfg.localization_space == LocalizationSpace::State ? h.state_size() : h.obs_size();
  loc.radii = Vector::Constant(n, cfg.localization_radius);
  return loc;
}

double design_norm(RunMode mode, const Vector& design) {
  if (mode == RunMode::AdaptiveInflation) return (design.array() - 1.0).abs().sum();
  return design.cwiseAbs().sum();
}

}  // namespace

RunMode parse_run_mode(std::string_view name) {
  if (name == "fixed") return RunMode::Fixed;
  if (name == "adaptive-inflation" || name == "inflation") return RunMode::AdaptiveInflation;
  if (name == "adaptive-localization" || name == "localization") return RunMode::AdaptiveLocalization;
  throw ConfigError("unknown run mode '" + std::string(name) +
                    "' (expected fixed, adaptive-inflation or adaptive-localization)");
}

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Fixed:
      return "fixed";
    case RunMode::AdaptiveInflation:
      return "adaptive-inflation";
    case RunMode::AdaptiveLocalization:
      return "adaptive-localization";
  }
  return "fixed";
}

void ExperimentConfig::set_seed(std::uint64_t base) {
  seed_truth = base;
  seed_obs = base + 1;
  seed_ensemble = base + 2;
  seed_filter = base + 3;
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(total_steps >= 0, "total_steps must be non-negative");
  require(obs_frequency >= 1, "obs_frequency must be >= 1");
  require(spinup_steps >= 0, "spinup_steps must be non-negative");
  require(spinup_perturbation >= 0.0, "spinup_perturbation must be non-negative");
  require(obs_stride >= 1 && obs_stride <= model.K, "obs_stride must lie in [1, K]");
  require(obs_noise_fraction > 0.0, "obs_noise_fraction must be positive");
  require(background_noise_fraction > 0.0, "background_noise_fraction must be positive");
  require(ensemble_size >= 2, "ensemble_size must be >= 2");
  require(inflation >= 1.0 && std::isfinite(inflation), "inflation must be >= 1");
  require(std::isfinite(localization_radius), "localization_radius must be finite (use <= 0 to disable)");
  require(inflation_lower >= 1.0 && inflation_lower <= inflation_upper, "need 1 <= inflation_lower <= inflation_upper");
  require(radius_lower > 0.0 && radius_lower <= radius_upper, "need 0 < radius_lower <= radius_upper");
  require(penalty >= 0.0 && std::isfinite(penalty), "penalty must be finite and >= 0");
  require(infeasible_penalty > 0.0, "infeasible_penalty must be positive");
  require(test_window_start <= test_window_end, "test window start must not exceed its end");
  require(divergence_factor > 0.0, "divergence_factor must be positive");
  for (int idx : trajectory_indices) {
    require(idx >= 1 && idx <= model.K, "trajectory index " + std::to_string(idx) + " outside [1, K]");
  }
  try {
    optimizer.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

double rmse(const Vector& x, const Vector& truth) {
  if (x.size() != truth.size()) throw DimensionError("rmse: length mismatch");
  if (x.size() == 0) throw DimensionError("rmse: empty vectors");
  return std::sqrt((x - truth).squaredNorm() / static_cast<double>(x.size()));
}

Vector reference_initial_condition(const ExperimentConfig& cfg) {
  const TwoLayerParams& p = cfg.model;
  Vector state = Vector::Zero(p.state_size());
  std::mt19937_64 rng(cfg.seed_truth);
  state.head(p.K) = Vector::Constant(p.K, p.F) + cfg.spinup_perturbation * standard_normal(rng, p.K);
  const Tendency rhs = make_two_layer_tendency(p);
  for (int s = 0; s < cfg.spinup_steps; ++s) state = rk4_step(rhs, state, cfg.dt);
  return state;
}

TruthTrajectory generate_truth(const ExperimentConfig& cfg) {
  cfg.validate();
  const int k_large = cfg.model.K;
  const int cycles = cfg.cycles();
  TruthTrajectory out;
  out.initial_condition = reference_initial_condition(cfg);
  out.states.resize(k_large, cycles + 1);
  out.times.resize(static_cast<std::size_t>(cycles) + 1);

  const Tendency rhs = make_two_layer_tendency(cfg.model);
  const IntegratorConfig integ{cfg.dt, cfg.obs_frequency};
  Vector state = out.initial_condition;
  out.states.col(0) = state.head(k_large);
  out.times[0] = 0.0;
  for (int k = 1; k <= cycles; ++k) {
    state = propagate(rhs, std::move(state), integ);
    out.states.col(k) = state.head(k_large);
    out.times[static_cast<std::size_t>(k)] = cfg.cycle_time(k);
  }
  return out;
}

ObservationOperator make_observation_operator(const ExperimentConfig& cfg) {
  std::vector<int> idx;
  for (int i = 0; i < cfg.model.K; i += cfg.obs_stride) idx.push_back(i);
  return ObservationOperator::selection(std::move(idx), cfg.model.K);
}

ObservationSet synthesize_observations(const TruthTrajectory& truth, const ObservationOperator& h,
                                       double noise_fraction, std::uint64_t seed) {
  if (!(noise_fraction > 0.0)) throw DomainError("observation noise fraction must be positive");
  if (truth.states.rows() != h.state_size()) throw DimensionError("truth and observation operator disagree");
  const Eigen::Index cols = truth.states.cols();
  const Matrix observed = h.apply(truth.states);

  // Average magnitude over the observation times; fall back to t_0 when there are none.
  const double mean_abs =
      cols > 1 ? observed.rightCols(cols - 1).cwiseAbs().mean() : observed.col(0).cwiseAbs().mean();
  const double sd = noise_fraction * mean_abs;
  if (!(sd > 0.0)) throw DomainError("observed truth has zero magnitude; observation noise would vanish");

  ObservationSet out{h, Matrix::Identity(h.obs_size(), h.obs_size()) * (sd * sd), Matrix(h.obs_size(), cols)};
  std::mt19937_64 rng(seed);
  for (Eigen::Index k = 0; k < cols; ++k) out.values.col(k) = observed.col(k) + sd * standard_normal(rng, h.obs_size());
  return out;
}

InitialEnsemble build_initial_ensemble(const Vector& truth_ic, double background_fraction, int ensemble_size,
                                       std::uint64_t seed) {
  if (ensemble_size < 2) throw DomainError("ensemble needs at least two members");
  if (!(background_fraction >= 0.0)) throw DomainError("background noise fraction must be non-negative");
  const Eigen::Index n = truth_ic.size();
  const Vector var = background_fraction * background_fraction * truth_ic.cwiseAbs();
  const Vector sd = var.cwiseSqrt();
  std::mt19937_64 rng(seed);
  const Vector mean = truth_ic + sd.cwiseProduct(standard_normal(rng, n));
  Matrix members(n, ensemble_size);
  for (int e = 0; e < ensemble_size; ++e) members.col(e) = mean + sd.cwiseProduct(standard_normal(rng, n));
  return InitialEnsemble{var, mean, Ensemble(std::move(members))};
}

std::vector<double> free_run(const ExperimentConfig& cfg, const TruthTrajectory& truth, const Vector& start) {
  const Tendency rhs = make_single_layer_tendency(cfg.forecast_forcing);
  const IntegratorConfig integ{cfg.dt, cfg.obs_frequency};
  std::vector<double> out;
  Vector state = start;
  for (Eigen::Index k = 1; k < truth.states.cols(); ++k) {
    state = propagate(rhs, std::move(state), integ);
    out.push_back(rmse(state, truth.states.col(k)));
  }
  return out;
}

double window_average(const std::vector<double>& times, const std::vector<double>& values, double start, double end) {
  if (times.size() != values.size()) throw DimensionError("window_average: length mismatch");
  constexpr double slack = 1e-9;
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= start - slack && times[i] <= end + slack) {
      sum += values[i];
      ++count;
    }
  }
  return count > 0 ? sum / count : kNaN;
}

TwinSetup prepare_twin(const ExperimentConfig& cfg) {
  cfg.validate();
  TruthTrajectory truth = generate_truth(cfg);
  ObservationSet obs =
      synthesize_observations(truth, make_observation_operator(cfg), cfg.obs_noise_fraction, cfg.seed_obs);
  InitialEnsemble prior = build_initial_ensemble(truth.initial_condition.head(cfg.model.K),
                                                 cfg.background_noise_fraction, cfg.ensemble_size, cfg.seed_ensemble);
  TwinSetup twin{std::move(truth), std::move(obs), std::move(prior), {}, 0.0};
  twin.free_run_rmse = free_run(cfg, twin.truth, twin.prior.background_mean);
  const std::vector<double> times(twin.truth.times.begin() + 1, twin.truth.times.end());
  twin.free_run_window_rmse = window_average(times, twin.free_run_rmse, cfg.test_window_start, cfg.test_window_end);
  return twin;
}

RunArtifact run_assimilation(const ExperimentConfig& cfg) { return run_assimilation(cfg, prepare_twin(cfg)); }

RunArtifact run_assimilation(const ExperimentConfig& cfg, const TwinSetup& twin) {
  cfg.validate();
  const int n = cfg.model.K;
  const ObservationOperator& h = twin.observations.h;
  const Matrix& r = twin.observations.r;
  if (twin.prior.ensemble.state_size() != n || twin.prior.ensemble.size() != cfg.ensemble_size) {
    throw ConfigError("twin setup does not match the experiment configuration");
  }
  const int cycles = static_cast<int>(twin.truth.states.cols()) - 1;

  RunArtifact art;
  art.config = cfg;
  for (int idx : cfg.trajectory_indices) art.trajectories.push_back(TrajectoryRecord{idx, {}, {}, {}, {}, {}, {}});

  AnalysisConfig fixed;
  fixed.scheme = cfg.scheme;
  fixed.seed = cfg.seed_filter;
  if (cfg.inflation != 1.0) fixed.inflation = Vector::Constant(n, cfg.inflation);
  if (cfg.localization_radius > 0.0) fixed.localization = fixed_localization(cfg, h);

  const DistanceMetric metric(n);
  const bool loc_in_state = cfg.localization_space == LocalizationSpace::State;
  const int design_size =
      cfg.mode == RunMode::AdaptiveLocalization && !loc_in_state ? h.obs_size() : n;
  const Box bounds = cfg.mode == RunMode::AdaptiveInflation
                         ? Box::uniform(design_size, cfg.inflation_lower, cfg.inflation_upper)
                         : Box::uniform(design_size, cfg.radius_lower, cfg.radius_upper);
  // Fixed B-localization taper reused inside the inflation objective.
  std::optional<Matrix> state_taper;
  if (cfg.mode == RunMode::AdaptiveInflation && fixed.localization && loc_in_state) {
    state_taper = assemble_state_kernel(metric, cfg.kernel, fixed.localization->radii);
  }

  double climatology = twin.free_run_window_rmse;
  if (!std::isfinite(climatology) || climatology <= 0.0) {
    double s = 0.0;
    for (double v : twin.free_run_rmse) s += v;
    climatology = twin.free_run_rmse.empty() ? kNaN : s / static_cast<double>(twin.free_run_rmse.size());
  }
  const double blowup = cfg.divergence_factor * climatology;

  const Tendency rhs = make_single_layer_tendency(cfg.forecast_forcing);
  const IntegratorConfig integ{cfg.dt, cfg.obs_frequency};
  std::mt19937_64 filter_rng(cfg.seed_filter);
  Ensemble ens = twin.prior.ensemble;
  Vector warm;

  for (int k = 1; k <= cycles; ++k) {
    CycleDiagnostics row;
    row.time = twin.truth.times[static_cast<std::size_t>(k)];
    row.objective = kNaN;
    const Vector truth = twin.truth.states.col(k);
    try {
      Matrix members(n, ens.size());
      for (int e = 0; e < ens.size(); ++e) members.col(e) = propagate(rhs, ens.member(e), integ);
      const Ensemble forecast(std::move(members));
      const Vector f_mean = ensemble_mean(forecast);
      row.forecast_rmse = rmse(f_mean, truth);
      row.forecast_stdev = ensemble_stdev(forecast);

      AnalysisConfig acfg = fixed;
      if (cfg.mode != RunMode::Fixed) {
        const AnomalyMatrix x = AnomalyMatrix::from_ensemble(forecast);
        const Vector x0 = cfg.warm_start && warm.size() == design_size ? warm : bounds.midpoint();
        OptimizerResult opt;
        if (cfg.mode == RunMode::AdaptiveInflation) {
          Matrix b = x.covariance();
          if (state_taper) b = b.cwiseProduct(*state_taper);
          InflationDesign design{x0, bounds, cfg.penalty};
          opt = minimize(
              [&](const Vector& lam, Vector& grad) {
                design.lambda = lam;
                ObjectiveEvaluation ev = inflation_objective(design, b, h, r);
                grad = std::move(ev.gradient);
                return ev.value;
              },
              x0, bounds, cfg.optimizer);
          acfg.inflation = opt.x_opt;
        } else {
          const Matrix b = fixed.inflation ? inflate_covariance(x.covariance(), *fixed.inflation) : x.covariance();
          LocalizationDesign design{x0, bounds, cfg.penalty, cfg.localization_space};
          opt = minimize(
              [&](const Vector& radii, Vector& grad) {
                design.radii = radii;
                ObjectiveEvaluation ev = localization_objective(design, b, h, r, metric, cfg.kernel);
                grad = std::move(ev.gradient);
                return ev.feasible ? ev.value : ev.value + cfg.infeasible_penalty;
              },
              x0, bounds, cfg.optimizer);
          LocalizationSettings loc;
          loc.space = cfg.localization_space;
          loc.family = cfg.kernel;
          loc.radii = opt.x_opt;
          acfg.localization = loc;
        }
        row.objective = opt.f_opt;
        row.n_iters = opt.n_iters;
        row.n_feval = opt.n_feval;
        row.design = opt.x_opt;
        warm = opt.x_opt;
      }

      const Ensemble analysis =
          cfg.scheme == AnalysisScheme::DEnKF
              ? denkf_analysis(forecast, twin.observations.values.col(k), h, r, acfg)
              : stochastic_enkf_analysis(forecast, twin.observations.values.col(k), h, r, filter_rng, acfg);
      const Vector a_mean = ensemble_mean(analysis);
      row.analysis_rmse = rmse(a_mean, truth);
      row.analysis_stdev = ensemble_stdev(analysis);
      row.trace = row.analysis_stdev.squaredNorm();

      for (auto& tr : art.trajectories) {
        const int i = tr.index - 1;
        tr.time.push_back(row.time);
        tr.truth.push_back(truth[i]);
        tr.forecast.push_back(f_mean[i]);
        tr.analysis.push_back(a_mean[i]);
        tr.forecast_stdev.push_back(row.forecast_stdev[i]);
        tr.analysis_stdev.push_back(row.analysis_stdev[i]);
      }
      ens = analysis;
      art.diagnostics.push_back(row);
    } catch (const Error& e) {
      art.summary.diverged = true;
      art.summary.divergence_reason = std::string("cycle ") + std::to_string(k) + ": " + e.what();
      break;
    }
    if (!(row.analysis_rmse <= blowup)) {
      art.summary.diverged = true;
      art.summary.divergence_reason = "cycle " + std::to_string(k) + ": analysis RMSE " +
                                      std::to_string(row.analysis_rmse) + " exceeds blow-up threshold " +
                                      std::to_string(blowup);
      break;
    }
  }

  RunSummary& s = art.summary;
  s.cycles_completed = static_cast<int>(art.diagnostics.size());
  s.free_run_window_rmse = twin.free_run_window_rmse;
  std::vector<double> times, a_rmse, f_rmse, iters, fevals;
  for (const auto& d : art.diagnostics) {
    times.push_back(d.time);
    a_rmse.push_back(d.analysis_rmse);
    f_rmse.push_back(d.forecast_rmse);
    iters.push_back(d.n_iters);
    fevals.push_back(d.n_feval);
  }
  s.window_analysis_rmse = window_average(times, a_rmse, cfg.test_window_start, cfg.test_window_end);
  s.window_forecast_rmse = window_average(times, f_rmse, cfg.test_window_start, cfg.test_window_end);
  s.mean_iters = window_average(times, iters, cfg.test_window_start, cfg.test_window_end);
  s.mean_feval = window_average(times, fevals, cfg.test_window_start, cfg.test_window_end);
  s.window_cycles = static_cast<int>(std::count_if(times.begin(), times.end(), [&](double t) {
    return t >= cfg.test_window_start - 1e-9 && t <= cfg.test_window_end + 1e-9;
  }));
  return art;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw DomainError("linspace needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

SweepResult penalty_sweep(const ExperimentConfig& cfg, const std::vector<double>& penalties, int jobs) {
  if (penalties.empty()) throw ConfigError("penalty sweep needs at least one penalty value");
  const TwinSetup twin = prepare_twin(cfg);
  SweepResult out;
  out.runs.resize(penalties.size());
  parallel_for(penalties.size(), jobs, [&](std::size_t i) {
    ExperimentConfig c = cfg;
    c.penalty = penalties[i];
    out.runs[i] = run_assimilation(c, twin);
  });
  for (std::size_t i = 0; i < penalties.size(); ++i) {
    const RunSummary& s = out.runs[i].summary;
    out.rows.push_back({penalties[i], s.window_analysis_rmse, s.mean_iters, s.mean_feval, s.diverged});
  }
  return out;
}

std::vector<LCurvePoint> lcurve_extract(const std::vector<RunArtifact>& runs, double cycle_time) {
  std::vector<LCurvePoint> out;
  for (const RunArtifact& run : runs) {
    const RunMode mode = run.config.mode;
    if (mode == RunMode::Fixed) throw DomainError("L-curve extraction needs adaptive runs");
    const double tol = 0.5 * run.config.obs_frequency * run.config.dt;
    const CycleDiagnostics* hit = nullptr;
    for (const auto& d : run.diagnostics) {
      if (std::abs(d.time - cycle_time) <= tol && (!hit || std::abs(d.time - cycle_time) < std::abs(hit->time - cycle_time))) {
        hit = &d;
      }
    }
    if (!hit) {
      throw DomainError("no assimilation cycle near t = " + std::to_string(cycle_time) + " in run with penalty " +
                        std::to_string(run.config.penalty));
    }
    LCurvePoint p;
    p.penalty = run.config.penalty;
    p.design_norm = design_norm(mode, hit->design);
    const double phi =
        mode == RunMode::AdaptiveInflation ? (hit->design.array() - 1.0).sum() : hit->design.sum();
    p.criterion = mode == RunMode::AdaptiveInflation ? hit->objective + p.penalty * phi : hit->objective - p.penalty * phi;
    p.ensemble_trace = hit->trace;
    p.analysis_rmse = hit->analysis_rmse;
    out.push_back(p);
  }
  return out;
}

std::size_t lcurve_elbow(const std::vector<LCurvePoint>& points) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!idx.empty()) {
      const LCurvePoint& prev = points[idx.back()];
      if (prev.design_norm == points[i].design_norm && prev.criterion == points[i].criterion) continue;
    }
    idx.push_back(i);
  }
  if (idx.size() < 3) return 0;
  double xlo = points[idx[0]].design_norm, xhi = xlo;
  double ylo = points[idx[0]].criterion, yhi = ylo;
  for (std::size_t i : idx) {
    xlo = std::min(xlo, points[i].design_norm);
    xhi = std::max(xhi, points[i].design_norm);
    ylo = std::min(ylo, points[i].criterion);
    yhi = std::max(yhi, points[i].criterion);
  }
  const double xr = xhi - xlo, yr = yhi - ylo;
  auto nx = [&](std::size_t i) { return xr > 0.0 ? (points[i].design_norm - xlo) / xr : 0.0; };
  auto ny = [&](std::size_t i) { return yr > 0.0 ? (points[i].criterion - ylo) / yr : 0.0; };

  std::size_t best = idx[1];
  double best_kappa = -1.0;
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    const double ax = nx(idx[k - 1]), ay = ny(idx[k - 1]);
    const double bx = nx(idx[k]), by = ny(idx[k]);
    const double cx = nx(idx[k + 1]), cy = ny(idx[k + 1]);
    const double area2 = std::abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
    const double denom = std::hypot(bx - ax, by - ay) * std::hypot(cx - bx, cy - by) * std::hypot(ax - cx, ay - cy);
    const double kappa = denom > 0.0 ? 2.0 * area2 / denom : 0.0;
    if (kappa > best_kappa) {
      best_kappa = kappa;
      best = idx[k];
    }
  }
  return best;
}

std::vector<RobustnessCell> robustness_sweep(const ExperimentConfig& cfg, const std::vector<int>& ensemble_sizes,
                                             const std::vector<double>& noise_levels, int jobs) {
  if (ensemble_sizes.empty() || noise_levels.empty()) throw ConfigError("robustness sweep needs a non-empty grid");
  std::vector<RobustnessCell> cells;
  for (int ne : ensemble_sizes) {
    for (double noise : noise_levels) cells.push_back(RobustnessCell{ne, noise, 0, 0, 0, false, false});
  }
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    ExperimentConfig c = cfg;
    c.ensemble_size = cells[i].ensemble_size;
    c.obs_noise_fraction = cells[i].noise_fraction;
    const TwinSetup twin = prepare_twin(c);
    const RunArtifact adaptive = run_assimilation(c, twin);
    ExperimentConfig base = c;
    base.mode = RunMode::Fixed;
    const RunArtifact fixed = run_assimilation(base, twin);
    cells[i].adaptive_rmse = adaptive.summary.window_analysis_rmse;
    cells[i].adaptive_diverged = adaptive.summary.diverged;
    cells[i].fixed_rmse = fixed.summary.window_analysis_rmse;
    cells[i].fixed_diverged = fixed.summary.diverged;
    cells[i].free_run_rmse = twin.free_run_window_rmse;
  });
  return cells;
}

}  // namespace oedda

/**
 * @file experiment.hpp
 * @brief Twin-experiment harness: truth generation from the two-layer model,
 * synthetic observations, initial ensemble, sequential DEnKF cycling with
 * fixed or OED-tuned inflation/localization, and parameter sweeps.
 *
 * Time bookkeeping: the reference initial condition sits at t = 0 and the
 * k-th assimilation cycle (k = 1..total_steps/obs_frequency) analyzes the
 * observation taken at t_k = k * obs_frequency * dt.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oedda/enkf.hpp"
#include "oedda/ensemble.hpp"
#include "oedda/localization.hpp"
#include "oedda/lorenz.hpp"
#include "oedda/optimizer.hpp"
#include "oedda/types.hpp"

namespace oedda {

enum class RunMode { Fixed, AdaptiveInflation, AdaptiveLocalization };

RunMode parse_run_mode(std::string_view name);
std::string_view to_string(RunMode mode);

struct ExperimentConfig {
  // Truth model and time stepping.
  TwoLayerParams model;
  double forecast_forcing = 8.0;
  double dt = 0.005;
  int total_steps = 20000;
  int obs_frequency = 20;
  int spinup_steps = 1000;
  double spinup_perturbation = 0.01;

  // Observations and prior.
  int obs_stride = 1;  ///< observe every obs_stride-th large-scale variable
  double obs_noise_fraction = 0.05;
  double background_noise_fraction = 0.08;
  int ensemble_size = 25;

  // Filter.
  AnalysisScheme scheme = AnalysisScheme::DEnKF;
  RunMode mode = RunMode::Fixed;
  KernelFamily kernel = KernelFamily::GaspariCohn;
  LocalizationSpace localization_space = LocalizationSpace::State;
  double inflation = 1.5;           ///< fixed inflation factor (1 disables)
  double localization_radius = 0.5; ///< fixed radius; <= 0 disables localization

  // OED design problem.
  double inflation_lower = 1.0;
  double inflation_upper = 1.5;
  double radius_lower = 0.5;
  double radius_upper = 0.75;  ///< 1.5x the benchmark radius, like the inflation box
  double penalty = 0.0;  ///< alpha for inflation, gamma for localization
  bool warm_start = true;
  double infeasible_penalty = 1e6;
  OptimizerConfig optimizer;

  // Seeds.
  std::uint64_t seed_truth = 1;
  std::uint64_t seed_obs = 2;
  std::uint64_t seed_ensemble = 3;
  std::uint64_t seed_filter = 4;

  // Reporting.
  double test_window_start = 66.7;
  double test_window_end = 100.0;
  double divergence_factor = 10.0;
  std::vector<int> trajectory_indices{8, 32};  ///< 1-based

  int cycles() const { return total_steps / obs_frequency; }
  double cycle_time(int k) const { return k * obs_frequency * dt; }
  /// Sets all four seeds from one base value.
  void set_seed(std::uint64_t base);
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

struct TruthTrajectory {
  Vector initial_condition;  ///< full two-layer reference initial condition
  std::vector<double> times;  ///< t_0 = 0, t_1, ..., t_cycles
  Matrix states;              ///< K x (cycles + 1), large-scale block only
};

struct ObservationSet {
  ObservationOperator h;
  Matrix r;
  Matrix values;  ///< Nobs x (cycles + 1); column 0 is unused
};

struct InitialEnsemble {
  Vector b0_variances;
  Vector background_mean;
  Ensemble ensemble;
};

struct TwinSetup {
  TruthTrajectory truth;
  ObservationSet observations;
  InitialEnsemble prior;
  std::vector<double> free_run_rmse;  ///< per cycle (index k - 1), prior mean propagated without data
  double free_run_window_rmse = 0.0;
};

struct CycleDiagnostics {
  double time = 0.0;
  double forecast_rmse = 0.0;
  double analysis_rmse = 0.0;
  double objective = 0.0;  ///< optimal design objective, NaN without a design problem
  double trace = 0.0;      ///< trace of the analysis ensemble covariance
  int n_iters = 0;
  int n_feval = 0;
  Vector design;  ///< lambda (inflation), radii (localization), empty for fixed runs
  Vector forecast_stdev;
  Vector analysis_stdev;
};

struct TrajectoryRecord {
  int index = 0;  ///< 1-based state index
  std::vector<double> time;
  std::vector<double> truth;
  std::vector<double> forecast;
  std::vector<double> analysis;
  std::vector<double> forecast_stdev;
  std::vector<double> analysis_stdev;
};

struct RunSummary {
  int cycles_completed = 0;
  bool diverged = false;
  std::string divergence_reason;
  double window_analysis_rmse = 0.0;
  double window_forecast_rmse = 0.0;
  double free_run_window_rmse = 0.0;
  double mean_iters = 0.0;
  double mean_feval = 0.0;
  int window_cycles = 0;
};

struct RunArtifact {
  ExperimentConfig config;
  std::vector<CycleDiagnostics> diagnostics;
  std::vector<TrajectoryRecord> trajectories;
  RunSummary summary;
};

double rmse(const Vector& x, const Vector& truth);

/// Spin-up of the two-layer model from x = F (plus a seeded perturbation), z = 0.
Vector reference_initial_condition(const ExperimentConfig& cfg);
TruthTrajectory generate_truth(const ExperimentConfig& cfg);
ObservationOperator make_observation_operator(const ExperimentConfig& cfg);
ObservationSet synthesize_observations(const TruthTrajectory& truth, const ObservationOperator& h,
                                       double noise_fraction, std::uint64_t seed);
InitialEnsemble build_initial_ensemble(const Vector& truth_ic, double background_fraction, int ensemble_size,
                                       std::uint64_t seed);
/// Prior mean propagated with the forecast model, RMSE against truth per cycle.
std::vector<double> free_run(const ExperimentConfig& cfg, const TruthTrajectory& truth, const Vector& start);
TwinSetup prepare_twin(const ExperimentConfig& cfg);

/// Mean of `values` over the cycles whose time lies in [start, end].
double window_average(const std::vector<double>& times, const std::vector<double>& values, double start, double end);

RunArtifact run_assimilation(const ExperimentConfig& cfg, const TwinSetup& twin);
RunArtifact run_assimilation(const ExperimentConfig& cfg);

struct SweepRow {
  double penalty = 0.0;
  double window_rmse = 0.0;
  double mean_iters = 0.0;
  double mean_feval = 0.0;
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RunArtifact> runs;
};

/// Evenly spaced values lo, ..., hi (count >= 1; count == 1 gives lo).
std::vector<double> linspace(double lo, double hi, int count);

/// One run per penalty, sharing the twin setup; `jobs` worker threads.
SweepResult penalty_sweep(const ExperimentConfig& cfg, const std::vector<double>& penalties, int jobs = 1);

struct LCurvePoint {
  double penalty = 0.0;
  double design_norm = 0.0;  ///< ||lambda - 1||_1 or ||l||_1
  double criterion = 0.0;    ///< posterior trace part of the optimal objective
  double ensemble_trace = 0.0;
  double analysis_rmse = 0.0;
};

/// Rows at the cycle whose time is closest to `cycle_time`; throws DomainError
/// if no run has a cycle within half an observation interval of it.
std::vector<LCurvePoint> lcurve_extract(const std::vector<RunArtifact>& runs, double cycle_time);

/// Index of the interior point of maximum Menger curvature on axes rescaled to
/// [0, 1]; points are taken in the given order. A point equal to its predecessor
/// (saturated design) is skipped so the first penalty of a run of repeats is
/// kept. Fewer than three distinct points gives 0.
std::size_t lcurve_elbow(const std::vector<LCurvePoint>& points);

struct RobustnessCell {
  int ensemble_size = 0;
  double noise_fraction = 0.0;
  double adaptive_rmse = 0.0;
  double fixed_rmse = 0.0;
  double free_run_rmse = 0.0;
  bool adaptive_diverged = false;
  bool fixed_diverged = false;
};

/// Adaptive runs (cfg.mode) and fixed-parameter baselines for every
/// (ensemble size, noise level) pair.
std::vector<RobustnessCell> robustness_sweep(const ExperimentConfig& cfg, const std::vector<int>& ensemble_sizes,
                                             const std::vector<double>& noise_levels, int jobs = 1);

}  // namespace oedda

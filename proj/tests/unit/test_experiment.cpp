#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "oedda/artifact_io.hpp"
#include "oedda/config.hpp"
#include "oedda/errors.hpp"
#include "oedda/experiment.hpp"

using namespace oedda;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.model.K = 12;
  c.model.J = 4;
  c.total_steps = 600;
  c.spinup_steps = 200;
  c.ensemble_size = 8;
  c.test_window_start = 2.0;
  c.test_window_end = 3.0;
  c.trajectory_indices = {2, 7};
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oedda_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Experiment, RmseFrozen) {
  Vector a(2), b = Vector::Zero(2);
  a << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(rmse(a, b), std::sqrt(2.5));
}

TEST(Experiment, WindowAverage) {
  EXPECT_DOUBLE_EQ(window_average({1, 2, 3, 4}, {10, 20, 30, 40}, 2, 3), 25.0);
  EXPECT_TRUE(std::isnan(window_average({1, 2}, {1, 2}, 5, 6)));
}

TEST(Experiment, CycleTimes) {
  ExperimentConfig c;
  EXPECT_EQ(c.cycles(), 1000);
  EXPECT_DOUBLE_EQ(c.cycle_time(1), 0.1);
  EXPECT_DOUBLE_EQ(c.cycle_time(1000), 100.0);
}

TEST(Experiment, SeedFanOut) {
  ExperimentConfig c;
  c.set_seed(10);
  EXPECT_EQ(c.seed_truth, 10u);
  EXPECT_EQ(c.seed_obs, 11u);
  EXPECT_EQ(c.seed_ensemble, 12u);
  EXPECT_EQ(c.seed_filter, 13u);
}

TEST(Experiment, TruthAndObservations) {
  const ExperimentConfig c = small_config();
  const TwinSetup twin = prepare_twin(c);
  EXPECT_EQ(twin.truth.states.rows(), 12);
  EXPECT_EQ(twin.truth.states.cols(), c.cycles() + 1);
  EXPECT_EQ(twin.truth.times.size(), std::size_t(c.cycles() + 1));
  EXPECT_EQ(twin.observations.values.rows(), 12);
  EXPECT_TRUE(twin.truth.states.allFinite());
  // Observation errors are consistent with R.
  const Matrix err = twin.observations.values.rightCols(c.cycles()) - twin.truth.states.rightCols(c.cycles());
  const double var = err.array().square().mean();
  EXPECT_GT(var, 0.5 * twin.observations.r(0, 0));
  EXPECT_LT(var, 1.5 * twin.observations.r(0, 0));
  EXPECT_EQ(twin.free_run_rmse.size(), std::size_t(c.cycles()));
}

TEST(Experiment, ObservationStride) {
  ExperimentConfig c = small_config();
  c.obs_stride = 3;
  const auto h = make_observation_operator(c);
  EXPECT_EQ(h.obs_size(), 4);
  EXPECT_EQ(h.grid_indices(), (std::vector<int>{0, 3, 6, 9}));
}

TEST(Experiment, FixedRunShapes) {
  const ExperimentConfig c = small_config();
  const RunArtifact art = run_assimilation(c);
  ASSERT_EQ(art.diagnostics.size(), std::size_t(c.cycles()));
  EXPECT_FALSE(art.summary.diverged);
  EXPECT_TRUE(std::isnan(art.diagnostics[0].objective));
  EXPECT_EQ(art.diagnostics[0].design.size(), 0);
  EXPECT_EQ(art.trajectories.size(), 2u);
  EXPECT_EQ(art.trajectories[1].index, 7);
  EXPECT_GT(art.summary.window_cycles, 0);
}

TEST(Experiment, AdaptiveRunsStayInBounds) {
  for (RunMode mode : {RunMode::AdaptiveInflation, RunMode::AdaptiveLocalization}) {
    ExperimentConfig c = small_config();
    c.total_steps = 200;
    c.mode = mode;
    c.penalty = 0.001;
    const RunArtifact art = run_assimilation(c);
    const double lo = mode == RunMode::AdaptiveInflation ? c.inflation_lower : c.radius_lower;
    const double hi = mode == RunMode::AdaptiveInflation ? c.inflation_upper : c.radius_upper;
    for (const auto& d : art.diagnostics) {
      ASSERT_EQ(d.design.size(), 12);
      EXPECT_GE(d.design.minCoeff(), lo);
      EXPECT_LE(d.design.maxCoeff(), hi);
      EXPECT_TRUE(std::isfinite(d.objective));
      EXPECT_GE(d.n_feval, d.n_iters);
    }
  }
}

TEST(Experiment, DeterministicDiagnostics) {
  ExperimentConfig c = small_config();
  c.mode = RunMode::AdaptiveInflation;
  c.penalty = 0.002;
  std::ostringstream a, b;
  write_diagnostics_csv(a, run_assimilation(c).diagnostics);
  write_diagnostics_csv(b, run_assimilation(c).diagnostics);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Experiment, ArtifactRoundTrip) {
  ExperimentConfig c = small_config();
  c.mode = RunMode::AdaptiveInflation;
  c.total_steps = 200;
  const RunArtifact art = run_assimilation(c);
  const fs::path dir = scratch("artifact");
  write_run_artifact(dir, art);
  for (const char* f : {"diagnostics.csv", "summary.json", "forecast_stdev.csv", "analysis_stdev.csv",
                        "trajectory_x2.csv", "trajectory_x7.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const RunArtifact back = read_run_artifact(dir);
  EXPECT_TRUE(same_artifact(art, back));
  fs::remove_all(dir);
}

TEST(Experiment, DiagnosticsHeader) {
  CycleDiagnostics row;
  row.time = 0.1;
  row.objective = std::nan("");
  row.design = Vector::Constant(2, 1.25);
  std::ostringstream out;
  write_diagnostics_csv(out, {row});
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "time,forecast_rmse,analysis_rmse,objective,trace,n_iters,n_feval,design_1,design_2");
  std::istringstream in(text);
  const auto back = read_diagnostics_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(std::isnan(back[0].objective));
  EXPECT_EQ(back[0].design, row.design);
}

TEST(Experiment, LCurveElbow) {
  std::vector<LCurvePoint> pts;
  // An L shape: steep drop then a flat tail, corner at index 2.
  const double xs[] = {0.0, 0.1, 0.2, 1.0, 2.0};
  const double ys[] = {10.0, 5.0, 1.0, 0.8, 0.6};
  for (int i = 0; i < 5; ++i) pts.push_back({0.1 * i, xs[i], ys[i], 0.0, 0.0});
  EXPECT_EQ(lcurve_elbow(pts), 2u);
  // Saturated repeats at the end carry no shape information.
  for (int i = 0; i < 4; ++i) pts.push_back({0.6 + 0.1 * i, 2.0, 0.6, 0.0, 0.0});
  EXPECT_EQ(lcurve_elbow(pts), 2u);
  EXPECT_EQ(lcurve_elbow({pts[0], pts[1]}), 0u);
}

TEST(Experiment, LCurveExtract) {
  ExperimentConfig c = small_config();
  c.mode = RunMode::AdaptiveInflation;
  c.total_steps = 200;
  const SweepResult sweep = penalty_sweep(c, {0.0, 0.01}, 2);
  ASSERT_EQ(sweep.rows.size(), 2u);
  const auto pts = lcurve_extract(sweep.runs, 0.5);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].penalty, 0.01);
  const auto& d = sweep.runs[1].diagnostics[4];
  EXPECT_DOUBLE_EQ(d.time, 0.5);
  EXPECT_NEAR(pts[1].design_norm, (d.design.array() - 1.0).abs().sum(), 1e-12);
  EXPECT_THROW(lcurve_extract(sweep.runs, 50.0), DomainError);
}

TEST(Experiment, Linspace) {
  const auto v = linspace(0.0, 0.01, 21);
  ASSERT_EQ(v.size(), 21u);
  EXPECT_DOUBLE_EQ(v.front(), 0.0);
  EXPECT_DOUBLE_EQ(v.back(), 0.01);
  EXPECT_EQ(linspace(3.0, 4.0, 1), std::vector<double>{3.0});
}

TEST(Config, RoundTrip) {
  ExperimentConfig c = small_config();
  c.mode = RunMode::AdaptiveLocalization;
  c.kernel = KernelFamily::Gauss;
  c.penalty = 0.1 + 0.2;
  c.optimizer.ftol = 1e-7;
  std::istringstream in(format_config(c));
  ExperimentConfig back;
  apply_key_values(back, parse_key_values(in));
  EXPECT_EQ(to_key_values(back), to_key_values(c));
  EXPECT_EQ(back.penalty, c.penalty);
}

TEST(Config, ParsesCommentsAndSeed) {
  std::istringstream in("# header\nmodel.K = 20  # trailing\n\nseed = 7\ntrajectory_indices = 1, 3\n");
  ExperimentConfig c;
  apply_key_values(c, parse_key_values(in));
  EXPECT_EQ(c.model.K, 20);
  EXPECT_EQ(c.seed_filter, 10u);
  EXPECT_EQ(c.trajectory_indices, (std::vector<int>{1, 3}));
}

TEST(Config, Errors) {
  ExperimentConfig c;
  EXPECT_THROW(apply_key_values(c, {{"nope", "1"}}), ConfigError);
  EXPECT_THROW(apply_key_values(c, {{"dt", "fast"}}), ConfigError);
  EXPECT_THROW(apply_key_values(c, {{"mode", "sometimes"}}), ConfigError);
  std::istringstream bad("just words\n");
  EXPECT_THROW(parse_key_values(bad), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/oedda.cfg"), ConfigError);
  c.inflation_lower = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

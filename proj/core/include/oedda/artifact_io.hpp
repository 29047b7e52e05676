/**
 * @file artifact_io.hpp
 * @brief Reading and writing run artifacts.
 *
 * A run directory holds
 *   diagnostics.csv       time, forecast_rmse, analysis_rmse, objective, trace,
 *                         n_iters, n_feval, design_1..design_m
 *   summary.json          config snapshot and test-window averages
 *   forecast_stdev.csv    time, s_1..s_K
 *   analysis_stdev.csv    time, s_1..s_K
 *   trajectory_x<i>.csv   time, truth, forecast, analysis, forecast_stdev, analysis_stdev
 *
 * Doubles are printed with 17 significant digits so a write/read cycle is exact.
 * NaN is written as "nan" in CSV and null in JSON.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "oedda/experiment.hpp"

namespace oedda {

void write_diagnostics_csv(std::ostream& out, const std::vector<CycleDiagnostics>& rows);
/// Reads rows back; stdev vectors are left empty.
std::vector<CycleDiagnostics> read_diagnostics_csv(std::istream& in);

void write_stdev_csv(std::ostream& out, const std::vector<CycleDiagnostics>& rows, bool analysis);
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& tr);
TrajectoryRecord read_trajectory_csv(std::istream& in, int index);

std::string summary_json(const RunArtifact& art);

void write_run_artifact(const std::filesystem::path& dir, const RunArtifact& art);
RunArtifact read_run_artifact(const std::filesystem::path& dir);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_lcurve_csv(std::ostream& out, const std::vector<LCurvePoint>& points);
void write_robustness_csv(std::ostream& out, const std::vector<RobustnessCell>& cells);

/// Field-by-field comparison where NaN equals NaN.
bool same_artifact(const RunArtifact& a, const RunArtifact& b);

}  // namespace oedda

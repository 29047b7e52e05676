#include "oedda/artifact_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "oedda/config.hpp"
#include "oedda/errors.hpp"

namespace oedda {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kDiagnosticsHeader = "time,forecast_rmse,analysis_rmse,objective,trace,n_iters,n_feval";
constexpr int kFixedColumns = 7;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<double>> read_numeric_table(std::istream& in, std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  header = split_csv(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error("table row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, "table cell"));
    rows.push_back(std::move(row));
  }
  return rows;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_json_number(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_vector(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!same_double(a[i], b[i])) return false;
  }
  return true;
}

bool same_series(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_double(a[i], b[i])) return false;
  }
  return true;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read '" + p.string() + "'");
  return in;
}

}  // namespace

void write_diagnostics_csv(std::ostream& out, const std::vector<CycleDiagnostics>& rows) {
  const Eigen::Index m = rows.empty() ? 0 : rows.front().design.size();
  out << kDiagnosticsHeader;
  for (Eigen::Index i = 0; i < m; ++i) out << ",design_" << (i + 1);
  out << '\n';
  for (const auto& r : rows) {
    if (r.design.size() != m) throw DimensionError("design length changes between cycles");
    out << num(r.time) << ',' << num(r.forecast_rmse) << ',' << num(r.analysis_rmse) << ',' << num(r.objective) << ','
        << num(r.trace) << ',' << r.n_iters << ',' << r.n_feval;
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << num(r.design[i]);
    out << '\n';
  }
}

std::vector<CycleDiagnostics> read_diagnostics_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto table = read_numeric_table(in, header);
  if (header.size() < static_cast<std::size_t>(kFixedColumns)) throw Error("diagnostics table has too few columns");
  std::string joined;
  for (int i = 0; i < kFixedColumns; ++i) joined += (i ? "," : "") + header[static_cast<std::size_t>(i)];
  if (joined != kDiagnosticsHeader) throw Error("unexpected diagnostics header '" + joined + "'");
  const Eigen::Index m = static_cast<Eigen::Index>(header.size()) - kFixedColumns;
  std::vector<CycleDiagnostics> out;
  for (const auto& row : table) {
    CycleDiagnostics d;
    d.time = row[0];
    d.forecast_rmse = row[1];
    d.analysis_rmse = row[2];
    d.objective = row[3];
    d.trace = row[4];
    d.n_iters = static_cast<int>(row[5]);
    d.n_feval = static_cast<int>(row[6]);
    d.design.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) d.design[i] = row[static_cast<std::size_t>(kFixedColumns + i)];
    out.push_back(std::move(d));
  }
  return out;
}

void write_stdev_csv(std::ostream& out, const std::vector<CycleDiagnostics>& rows, bool analysis) {
  const Eigen::Index n = rows.empty() ? 0 : (analysis ? rows.front().analysis_stdev : rows.front().forecast_stdev).size();
  out << "time";
  for (Eigen::Index i = 0; i < n; ++i) out << ",s_" << (i + 1);
  out << '\n';
  for (const auto& r : rows) {
    const Vector& s = analysis ? r.analysis_stdev : r.forecast_stdev;
    out << num(r.time);
    for (Eigen::Index i = 0; i < s.size(); ++i) out << ',' << num(s[i]);
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& tr) {
  out << "time,truth,forecast,analysis,forecast_stdev,analysis_stdev\n";
  for (std::size_t k = 0; k < tr.time.size(); ++k) {
    out << num(tr.time[k]) << ',' << num(tr.truth[k]) << ',' << num(tr.forecast[k]) << ',' << num(tr.analysis[k])
        << ',' << num(tr.forecast_stdev[k]) << ',' << num(tr.analysis_stdev[k]) << '\n';
  }
}

TrajectoryRecord read_trajectory_csv(std::istream& in, int index) {
  std::vector<std::string> header;
  const auto table = read_numeric_table(in, header);
  if (header.size() != 6) throw Error("trajectory table must have 6 columns");
  TrajectoryRecord tr;
  tr.index = index;
  for (const auto& row : table) {
    tr.time.push_back(row[0]);
    tr.truth.push_back(row[1]);
    tr.forecast.push_back(row[2]);
    tr.analysis.push_back(row[3]);
    tr.forecast_stdev.push_back(row[4]);
    tr.analysis_stdev.push_back(row[5]);
  }
  return tr;
}

std::string summary_json(const RunArtifact& art) {
  json cfg = json::object();
  for (const auto& [k, v] : to_key_values(art.config)) cfg[k] = v;
  const RunSummary& s = art.summary;
  json j;
  j["config"] = cfg;
  j["summary"] = {
      {"cycles_completed", s.cycles_completed},
      {"diverged", s.diverged},
      {"divergence_reason", s.divergence_reason},
      {"window_analysis_rmse", number_or_null(s.window_analysis_rmse)},
      {"window_forecast_rmse", number_or_null(s.window_forecast_rmse)},
      {"free_run_window_rmse", number_or_null(s.free_run_window_rmse)},
      {"mean_iters", number_or_null(s.mean_iters)},
      {"mean_feval", number_or_null(s.mean_feval)},
      {"window_cycles", s.window_cycles},
  };
  j["test_window"] = {art.config.test_window_start, art.config.test_window_end};
  return j.dump(2) + "\n";
}

void write_run_artifact(const fs::path& dir, const RunArtifact& art) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "diagnostics.csv");
    write_diagnostics_csv(out, art.diagnostics);
  }
  {
    auto out = open_out(dir / "forecast_stdev.csv");
    write_stdev_csv(out, art.diagnostics, false);
  }
  {
    auto out = open_out(dir / "analysis_stdev.csv");
    write_stdev_csv(out, art.diagnostics, true);
  }
  for (const auto& tr : art.trajectories) {
    auto out = open_out(dir / ("trajectory_x" + std::to_string(tr.index) + ".csv"));
    write_trajectory_csv(out, tr);
  }
  auto out = open_out(dir / "summary.json");
  out << summary_json(art);
}

RunArtifact read_run_artifact(const fs::path& dir) {
  RunArtifact art;
  json j;
  {
    auto in = open_in(dir / "summary.json");
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("malformed summary.json: " + std::string(e.what()));
    }
  }
  KeyValues kv;
  for (const auto& [k, v] : j.at("config").items()) kv.emplace_back(k, v.get<std::string>());
  apply_key_values(art.config, kv);

  const json& s = j.at("summary");
  art.summary.cycles_completed = s.at("cycles_completed").get<int>();
  art.summary.diverged = s.at("diverged").get<bool>();
  art.summary.divergence_reason = s.at("divergence_reason").get<std::string>();
  art.summary.window_analysis_rmse = from_json_number(s.at("window_analysis_rmse"));
  art.summary.window_forecast_rmse = from_json_number(s.at("window_forecast_rmse"));
  art.summary.free_run_window_rmse = from_json_number(s.at("free_run_window_rmse"));
  art.summary.mean_iters = from_json_number(s.at("mean_iters"));
  art.summary.mean_feval = from_json_number(s.at("mean_feval"));
  art.summary.window_cycles = s.at("window_cycles").get<int>();

  {
    auto in = open_in(dir / "diagnostics.csv");
    art.diagnostics = read_diagnostics_csv(in);
  }
  for (bool analysis : {false, true}) {
    auto in = open_in(dir / (analysis ? "analysis_stdev.csv" : "forecast_stdev.csv"));
    std::vector<std::string> header;
    const auto table = read_numeric_table(in, header);
    if (table.size() != art.diagnostics.size()) throw Error("stdev table and diagnostics differ in length");
    for (std::size_t k = 0; k < table.size(); ++k) {
      Vector v(static_cast<Eigen::Index>(table[k].size()) - 1);
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = table[k][static_cast<std::size_t>(i) + 1];
      (analysis ? art.diagnostics[k].analysis_stdev : art.diagnostics[k].forecast_stdev) = std::move(v);
    }
  }
  for (int idx : art.config.trajectory_indices) {
    auto in = open_in(dir / ("trajectory_x" + std::to_string(idx) + ".csv"));
    art.trajectories.push_back(read_trajectory_csv(in, idx));
  }
  return art;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "penalty,window_rmse,mean_iters,mean_feval,diverged\n";
  for (const auto& r : rows) {
    out << num(r.penalty) << ',' << num(r.window_rmse) << ',' << num(r.mean_iters) << ',' << num(r.mean_feval) << ','
        << (r.diverged ? 1 : 0) << '\n';
  }
}

void write_lcurve_csv(std::ostream& out, const std::vector<LCurvePoint>& points) {
  out << "penalty,design_norm,criterion,ensemble_trace,analysis_rmse\n";
  for (const auto& p : points) {
    out << num(p.penalty) << ',' << num(p.design_norm) << ',' << num(p.criterion) << ',' << num(p.ensemble_trace) << ','
        << num(p.analysis_rmse) << '\n';
  }
}

void write_robustness_csv(std::ostream& out, const std::vector<RobustnessCell>& cells) {
  out << "ensemble_size,noise_fraction,adaptive_rmse,fixed_rmse,free_run_rmse,adaptive_diverged,fixed_diverged\n";
  for (const auto& c : cells) {
    out << c.ensemble_size << ',' << num(c.noise_fraction) << ',' << num(c.adaptive_rmse) << ',' << num(c.fixed_rmse)
        << ',' << num(c.free_run_rmse) << ',' << (c.adaptive_diverged ? 1 : 0) << ',' << (c.fixed_diverged ? 1 : 0)
        << '\n';
  }
}

bool same_artifact(const RunArtifact& a, const RunArtifact& b) {
  if (to_key_values(a.config) != to_key_values(b.config)) return false;
  const RunSummary& sa = a.summary;
  const RunSummary& sb = b.summary;
  if (sa.cycles_completed != sb.cycles_completed || sa.diverged != sb.diverged ||
      sa.divergence_reason != sb.divergence_reason || sa.window_cycles != sb.window_cycles ||
      !same_double(sa.window_analysis_rmse, sb.window_analysis_rmse) ||
      !same_double(sa.window_forecast_rmse, sb.window_forecast_rmse) ||
      !same_double(sa.free_run_window_rmse, sb.free_run_window_rmse) || !same_double(sa.mean_iters, sb.mean_iters) ||
      !same_double(sa.mean_feval, sb.mean_feval)) {
    return false;
  }
  if (a.diagnostics.size() != b.diagnostics.size()) return false;
  for (std::size_t k = 0; k < a.diagnostics.size(); ++k) {
    const auto& x = a.diagnostics[k];
    const auto& y = b.diagnostics[k];
    if (!same_double(x.time, y.time) || !same_double(x.forecast_rmse, y.forecast_rmse) ||
        !same_double(x.analysis_rmse, y.analysis_rmse) || !same_double(x.objective, y.objective) ||
        !same_double(x.trace, y.trace) || x.n_iters != y.n_iters || x.n_feval != y.n_feval ||
        !same_vector(x.design, y.design) || !same_vector(x.forecast_stdev, y.forecast_stdev) ||
        !same_vector(x.analysis_stdev, y.analysis_stdev)) {
      return false;
    }
  }
  if (a.trajectories.size() != b.trajectories.size()) return false;
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    const auto& x = a.trajectories[i];
    const auto& y = b.trajectories[i];
    if (x.index != y.index || !same_series(x.time, y.time) || !same_series(x.truth, y.truth) ||
        !same_series(x.forecast, y.forecast) || !same_series(x.analysis, y.analysis) ||
        !same_series(x.forecast_stdev, y.forecast_stdev) || !same_series(x.analysis_stdev, y.analysis_stdev)) {
      return false;
    }
  }
  return true;
}

}  // namespace oedda

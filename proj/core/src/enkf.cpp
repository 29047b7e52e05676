#include "oedda/enkf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oedda/errors.hpp"

namespace oedda {

// ---------------------------------------------------------------------------
// ObservationOperator

ObservationOperator ObservationOperator::selection(std::vector<int> indices, int state_size) {
  if (state_size < 1) throw DomainError("observation operator needs a positive state size");
  if (indices.empty()) throw DomainError("selection observation operator needs at least one index");
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("selection indices must be unique");
  }
  if (sorted.front() < 0 || sorted.back() >= state_size) throw DomainError("selection index out of range");

  ObservationOperator h;
  h.kind_ = Kind::Selection;
  h.obs_size_ = static_cast<int>(indices.size());
  h.state_size_ = state_size;
  h.grid_index_ = std::move(indices);
  return h;
}

ObservationOperator ObservationOperator::identity(int state_size) {
  std::vector<int> idx(static_cast<std::size_t>(state_size));
  for (int i = 0; i < state_size; ++i) idx[static_cast<std::size_t>(i)] = i;
  return selection(std::move(idx), state_size);
}

ObservationOperator ObservationOperator::dense(Matrix hm) {
  if (hm.rows() < 1 || hm.cols() < 1) throw DimensionError("dense observation operator must be non-empty");
  if (!hm.allFinite()) throw NumericalError("dense observation operator has non-finite entries");
  ObservationOperator h;
  h.kind_ = Kind::Dense;
  h.obs_size_ = static_cast<int>(hm.rows());
  h.state_size_ = static_cast<int>(hm.cols());
  h.grid_index_.resize(static_cast<std::size_t>(hm.rows()));
  for (Eigen::Index i = 0; i < hm.rows(); ++i) {
    Eigen::Index col = -1;
    const double peak = hm.row(i).cwiseAbs().maxCoeff(&col);
    h.grid_index_[static_cast<std::size_t>(i)] = peak > 0.0 ? static_cast<int>(col) : -1;
  }
  h.dense_ = std::move(hm);
  return h;
}

Vector ObservationOperator::apply(const Vector& x) const {
  if (x.size() != state_size_) throw DimensionError("observation operator: state length mismatch");
  if (kind_ == Kind::Dense) return dense_ * x;
  Vector out(obs_size_);
  for (int i = 0; i < obs_size_; ++i) out[i] = x[grid_index_[static_cast<std::size_t>(i)]];
  return out;
}

Matrix ObservationOperator::apply(const Matrix& m) const {
  if (m.rows() != state_size_) throw DimensionError("observation operator: row count mismatch");
  if (kind_ == Kind::Dense) return dense_ * m;
  Matrix out(obs_size_, m.cols());
  for (int i = 0; i < obs_size_; ++i) out.row(i) = m.row(grid_index_[static_cast<std::size_t>(i)]);
  return out;
}

Matrix ObservationOperator::apply_transpose_right(const Matrix& m) const {
  if (m.cols() != state_size_) throw DimensionError("observation operator: column count mismatch");
  if (kind_ == Kind::Dense) return m * dense_.transpose();
  Matrix out(m.rows(), obs_size_);
  for (int i = 0; i < obs_size_; ++i) out.col(i) = m.col(grid_index_[static_cast<std::size_t>(i)]);
  return out;
}

Matrix ObservationOperator::project(const Matrix& m) const { return apply_transpose_right(apply(m)); }

Matrix ObservationOperator::adjoint(const Matrix& m) const {
  if (m.rows() != obs_size_) throw DimensionError("observation operator adjoint: row count mismatch");
  if (kind_ == Kind::Dense) return dense_.transpose() * m;
  Matrix out = Matrix::Zero(state_size_, m.cols());
  for (int i = 0; i < obs_size_; ++i) out.row(grid_index_[static_cast<std::size_t>(i)]) += m.row(i);
  return out;
}

Matrix ObservationOperator::to_dense() const {
  if (kind_ == Kind::Dense) return dense_;
  Matrix out = Matrix::Zero(obs_size_, state_size_);
  for (int i = 0; i < obs_size_; ++i) out(i, grid_index_[static_cast<std::size_t>(i)]) = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Names

AnalysisScheme parse_analysis_scheme(std::string_view name) {
  if (name == "denkf") return AnalysisScheme::DEnKF;
  if (name == "stochastic" || name == "enkf") return AnalysisScheme::StochasticEnKF;
  throw ConfigError("unknown analysis scheme '" + std::string(name) + "' (expected denkf or stochastic)");
}

LocalizationSpace parse_localization_space(std::string_view name) {
  if (name == "B" || name == "b" || name == "state") return LocalizationSpace::State;
  if (name == "R-HB" || name == "r-hb") return LocalizationSpace::ObservationHB;
  if (name == "R-HB-HBHt" || name == "r-hb-hbht") return LocalizationSpace::ObservationHBHt;
  throw ConfigError("unknown localization space '" + std::string(name) + "' (expected B, R-HB or R-HB-HBHt)");
}

std::string_view to_string(AnalysisScheme scheme) {
  return scheme == AnalysisScheme::DEnKF ? "denkf" : "stochastic";
}

std::string_view to_string(LocalizationSpace space) {
  switch (space) {
    case LocalizationSpace::State:
      return "B";
    case LocalizationSpace::ObservationHB:
      return "R-HB";
    case LocalizationSpace::ObservationHBHt:
      return "R-HB-HBHt";
  }
  return "B";
}

// ---------------------------------------------------------------------------
// Linear algebra

Matrix symmetric_solve(const Matrix& s, const Matrix& m) {
  if (s.rows() != s.cols() || s.rows() != m.rows()) throw DimensionError("symmetric_solve: shape mismatch");
  if (!s.allFinite()) throw NumericalError("symmetric_solve: non-finite matrix");
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) {
    const double dmin = llt.matrixLLT().diagonal().minCoeff();
    const double dmax = llt.matrixLLT().diagonal().maxCoeff();
    if (dmin > 1e-8 * dmax) return llt.solve(m);
  }
  Eigen::PartialPivLU<Matrix> lu(s);
  if (!(lu.rcond() > 1e-14)) throw SingularMatrixError("innovation covariance is numerically singular");
  return lu.solve(m);
}

Matrix kalman_gain(const Matrix& b, const ObservationOperator& h, const Matrix& r) {
  if (b.rows() != h.state_size() || b.cols() != h.state_size()) throw DimensionError("kalman_gain: B shape mismatch");
  if (r.rows() != h.obs_size() || r.cols() != h.obs_size()) throw DimensionError("kalman_gain: R shape mismatch");
  const Matrix hb = h.apply(b);
  const Matrix s = h.apply_transpose_right(hb) + r;
  return symmetric_solve(0.5 * (s + s.transpose()), hb).transpose();
}

namespace {

AnomalyMatrix maybe_inflate(const AnomalyMatrix& x, const AnalysisConfig& cfg) {
  if (!cfg.inflation) return x;
  return inflate_anomalies(x, *cfg.inflation);
}

}  // namespace

Matrix analysis_gain(const AnomalyMatrix& anomalies, const ObservationOperator& h, const Matrix& r,
                     const AnalysisConfig& cfg) {
  if (anomalies.state_size() != h.state_size()) throw DimensionError("analysis: ensemble/operator state mismatch");
  const Matrix b = maybe_inflate(anomalies, cfg).covariance();
  if (!cfg.localization) return kalman_gain(b, h, r);

  const LocalizationSettings& loc = *cfg.localization;
  const DistanceMetric metric(h.state_size(), loc.spacing);
  switch (loc.space) {
    case LocalizationSpace::State: {
      const Matrix c = assemble_state_kernel(metric, loc.family, loc.radii);
      return kalman_gain(localize_covariance(b, c), h, r);
    }
    case LocalizationSpace::ObservationHB:
    case LocalizationSpace::ObservationHBHt: {
      const ObservationKernels k = assemble_obs_kernels(metric, loc.family, loc.radii, h.grid_indices());
      const Matrix hb = h.apply(b);
      const Matrix hb_loc = k.obs_state.cwiseProduct(hb);
      Matrix hbht = h.apply_transpose_right(hb);
      if (loc.space == LocalizationSpace::ObservationHBHt) hbht = k.obs_obs.cwiseProduct(hbht);
      const Matrix s = hbht + r;
      return symmetric_solve(0.5 * (s + s.transpose()), hb_loc).transpose();
    }
  }
  throw DomainError("unsupported localization space");
}

Ensemble denkf_analysis(const Ensemble& forecast, const Vector& y, const ObservationOperator& h, const Matrix& r,
                        const AnalysisConfig& cfg) {
  if (y.size() != h.obs_size()) throw DimensionError("denkf_analysis: observation length mismatch");
  const Vector mean = ensemble_mean(forecast);
  const AnomalyMatrix x = AnomalyMatrix::from_ensemble(forecast);
  const Matrix k = analysis_gain(x, h, r, cfg);
  const Matrix xb = maybe_inflate(x, cfg).columns();

  const Vector mean_a = mean + k * (y - h.apply(mean));
  const Matrix xa = xb - 0.5 * k * h.apply(xb);
  if (!mean_a.allFinite() || !xa.allFinite()) throw NumericalError("denkf_analysis produced non-finite values");
  return Ensemble::from_mean_and_anomalies(mean_a, xa);
}

Ensemble stochastic_enkf_analysis(const Ensemble& forecast, const Vector& y, const ObservationOperator& h,
                                  const Matrix& r, std::mt19937_64& rng, const AnalysisConfig& cfg) {
  if (y.size() != h.obs_size()) throw DimensionError("stochastic_enkf_analysis: observation length mismatch");
  const Vector mean = ensemble_mean(forecast);
  const AnomalyMatrix x = AnomalyMatrix::from_ensemble(forecast);
  const Matrix k = analysis_gain(x, h, r, cfg);
  const Matrix xb = maybe_inflate(x, cfg).columns().colwise() + mean;

  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("observation error covariance is not positive definite");
  const Matrix lower = llt.matrixL();

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix zeta(h.obs_size(), forecast.size());
  for (Eigen::Index e = 0; e < zeta.cols(); ++e) {
    for (Eigen::Index i = 0; i < zeta.rows(); ++i) zeta(i, e) = normal(rng);
  }
  zeta = lower * zeta;

  const Matrix innovations = (zeta.colwise() + y) - h.apply(xb);
  Matrix xa = xb + k * innovations;
  if (!xa.allFinite()) throw NumericalError("stochastic_enkf_analysis produced non-finite values");
  return Ensemble(std::move(xa));
}

Ensemble analyze(const Ensemble& forecast, const Vector& y, const ObservationOperator& h, const Matrix& r,
                 const AnalysisConfig& cfg) {
  if (cfg.scheme == AnalysisScheme::DEnKF) return denkf_analysis(forecast, y, h, r, cfg);
  std::mt19937_64 rng(cfg.seed);
  return stochastic_enkf_analysis(forecast, y, h, r, rng, cfg);
}

Matrix posterior_covariance_exact(const Matrix& b, const ObservationOperator& h, const Matrix& r) {
  const Matrix k = kalman_gain(b, h, r);
  Matrix a = b - k * h.apply(b);
  return 0.5 * (a + a.transpose());
}

Matrix posterior_covariance_information_form(const Matrix& b, const ObservationOperator& h, const Matrix& r) {
  Eigen::LLT<Matrix> b_llt(b);
  Eigen::LLT<Matrix> r_llt(r);
  if (b_llt.info() != Eigen::Success || r_llt.info() != Eigen::Success) return posterior_covariance_exact(b, h, r);
  const Eigen::Index n = b.rows();
  const Matrix b_inv = b_llt.solve(Matrix::Identity(n, n));
  const Matrix hdense = h.to_dense();
  const Matrix info = b_inv + hdense.transpose() * r_llt.solve(hdense);
  Matrix a = Eigen::LLT<Matrix>(0.5 * (info + info.transpose())).solve(Matrix::Identity(n, n));
  return 0.5 * (a + a.transpose());
}

}  // namespace oedda

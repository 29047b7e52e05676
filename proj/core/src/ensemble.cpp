#include "oedda/ensemble.hpp"

#include <cmath>
#include <string>

#include "oedda/errors.hpp"

namespace oedda {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Ensemble::Ensemble(Matrix members) : members_(std::move(members)) {
  if (members_.cols() < 2) throw DomainError("an ensemble needs at least 2 members");
  if (members_.rows() < 1) throw DomainError("ensemble members must be non-empty");
  if (!members_.allFinite()) throw NumericalError("ensemble contains non-finite entries");
}

Ensemble Ensemble::from_mean_and_anomalies(const Vector& mean, const Matrix& anomalies) {
  if (mean.size() != anomalies.rows()) throw DimensionError("mean and anomalies have different state sizes");
  return Ensemble(anomalies.colwise() + mean);
}

AnomalyMatrix::AnomalyMatrix(Matrix columns, double scale) : columns_(std::move(columns)), scale_(scale) {
  if (!(scale_ > 0.0)) throw DomainError("anomaly covariance scale must be positive");
}

AnomalyMatrix AnomalyMatrix::from_ensemble(const Ensemble& ens) {
  const Vector mean = ensemble_mean(ens);
  return AnomalyMatrix(ens.members().colwise() - mean, 1.0 / (ens.size() - 1));
}

Matrix AnomalyMatrix::covariance() const {
  Matrix b = scale_ * (columns_ * columns_.transpose());
  // Symmetrize away round-off so downstream Cholesky/trace identities see an exactly symmetric input.
  return 0.5 * (b + b.transpose());
}

Vector ensemble_mean(const Ensemble& ens) { return ens.members().rowwise().mean(); }

Matrix ensemble_covariance(const Ensemble& ens) { return AnomalyMatrix::from_ensemble(ens).covariance(); }

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  return a.cwiseProduct(b);
}

AnomalyMatrix inflate_anomalies(const AnomalyMatrix& x, const Vector& lambda) {
  if (lambda.size() != x.state_size()) throw DimensionError("inflation vector length must equal the state size");
  if ((lambda.array() < 0.0).any() || !lambda.allFinite()) {
    throw DomainError("inflation factors must be finite and non-negative");
  }
  return AnomalyMatrix(lambda.array().sqrt().matrix().asDiagonal() * x.columns(), x.scale());
}

Matrix inflate_covariance(const Matrix& b, const Vector& lambda) {
  if (b.rows() != b.cols() || lambda.size() != b.rows()) {
    throw DimensionError("inflate_covariance: lambda length must match the square covariance");
  }
  if ((lambda.array() < 0.0).any() || !lambda.allFinite()) {
    throw DomainError("inflation factors must be finite and non-negative");
  }
  const Vector s = lambda.array().sqrt();
  return s.asDiagonal() * b * s.asDiagonal();
}

Matrix localize_covariance(const Matrix& b, const Matrix& c) {
  require_same_shape(b, c, "localize_covariance");
  if (c.rows() != c.cols()) throw DimensionError("localize_covariance: decorrelation matrix must be square");
  return b.cwiseProduct(c);
}

CovarianceModel CovarianceModel::diagonal(Vector variances) {
  if ((variances.array() < 0.0).any() || !variances.allFinite()) {
    throw DomainError("covariance variances must be finite and non-negative");
  }
  return CovarianceModel(std::move(variances));
}

CovarianceModel CovarianceModel::dense(Matrix cov) {
  if (cov.rows() != cov.cols()) throw DimensionError("dense covariance must be square");
  if (!cov.allFinite()) throw NumericalError("dense covariance has non-finite entries");
  const double tol = 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tol) throw DomainError("dense covariance must be symmetric");
  if ((cov.diagonal().array() < 0.0).any()) throw DomainError("covariance diagonal must be non-negative");
  return CovarianceModel(std::move(cov));
}

int CovarianceModel::size() const {
  return std::visit([](const auto& d) { return static_cast<int>(d.rows()); }, data_);
}

Matrix CovarianceModel::to_dense() const {
  if (const auto* v = std::get_if<Vector>(&data_)) return v->asDiagonal();
  return std::get<Matrix>(data_);
}

Vector CovarianceModel::variances() const {
  if (const auto* v = std::get_if<Vector>(&data_)) return *v;
  return std::get<Matrix>(data_).diagonal();
}

}  // namespace oedda

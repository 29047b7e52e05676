/**
 * @file ensemble.hpp
 * @brief Ensemble statistics and covariance algebra.
 *
 * Conventions: an ensemble stores its members as the columns of an
 * Nstate x Nens matrix. Anomalies are deviations from the ensemble mean and the
 * ensemble covariance is B = X X^T / (Nens - 1).
 */
#pragma once

#include <variant>

#include "oedda/types.hpp"

namespace oedda {

class Ensemble {
 public:
  /// `members` is Nstate x Nens. Throws if Nens < 2 or any entry is non-finite.
  explicit Ensemble(Matrix members);

  int size() const { return static_cast<int>(members_.cols()); }
  int state_size() const { return static_cast<int>(members_.rows()); }

  const Matrix& members() const { return members_; }
  Vector member(int e) const { return members_.col(e); }

  /// Builds an ensemble from a mean and anomaly columns (mean + X(:, e)).
  static Ensemble from_mean_and_anomalies(const Vector& mean, const Matrix& anomalies);

 private:
  Matrix members_;
};

/// Ensemble anomalies together with the covariance scaling they imply.
class AnomalyMatrix {
 public:
  /// Takes already-centred columns; `scale` multiplies X X^T to give B.
  AnomalyMatrix(Matrix columns, double scale);

  static AnomalyMatrix from_ensemble(const Ensemble& ens);

  const Matrix& columns() const { return columns_; }
  double scale() const { return scale_; }
  int state_size() const { return static_cast<int>(columns_.rows()); }
  int ensemble_size() const { return static_cast<int>(columns_.cols()); }

  /// scale * X X^T
  Matrix covariance() const;

 private:
  Matrix columns_;
  double scale_;
};

Vector ensemble_mean(const Ensemble& ens);

Matrix ensemble_covariance(const Ensemble& ens);

Matrix hadamard(const Matrix& a, const Matrix& b);

/// Scales row i of the anomalies by sqrt(lambda_i); the implied covariance is
/// D^{1/2} B D^{1/2} with D = diag(lambda).
AnomalyMatrix inflate_anomalies(const AnomalyMatrix& x, const Vector& lambda);

/// D^{1/2} B D^{1/2} for a dense covariance.
Matrix inflate_covariance(const Matrix& b, const Vector& lambda);

/// B o C, requiring equal shapes and unit diagonal of C.
Matrix localize_covariance(const Matrix& b, const Matrix& c);

/// Diagonal or dense symmetric positive semidefinite covariance.
class CovarianceModel {
 public:
  enum class Kind { Diagonal, Dense };

  static CovarianceModel diagonal(Vector variances);
  static CovarianceModel dense(Matrix cov);

  Kind kind() const { return std::holds_alternative<Vector>(data_) ? Kind::Diagonal : Kind::Dense; }
  int size() const;
  Matrix to_dense() const;
  Vector variances() const;

 private:
  explicit CovarianceModel(std::variant<Vector, Matrix> data) : data_(std::move(data)) {}
  std::variant<Vector, Matrix> data_;
};

}  // namespace oedda

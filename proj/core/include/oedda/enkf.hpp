/**
 * @file enkf.hpp
 * @brief EnKF analysis step: deterministic EnKF (DEnKF) and the stochastic
 * perturbed-observations EnKF, with optional multiplicative inflation and
 * state- or observation-space localization.
 *
 * DEnKF update (Sakov & Oke, 2008):
 *   x^a  = x^b + K (y - H x^b)
 *   X^a  = X^b - 1/2 K H X^b
 *
 * Gain variants:
 *   none / B-localization:  K = B H^T (H B H^T + R)^{-1}     (B possibly B o C)
 *   R-localization (HB):    K = (C1 o HB)^T (H B H^T + R)^{-1}
 *   R-localization (HBH^T): K = (C1 o HB)^T (C2 o H B H^T + R)^{-1}
 */
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "oedda/ensemble.hpp"
#include "oedda/localization.hpp"
#include "oedda/types.hpp"

namespace oedda {

/// Linear observation operator, either a selection of state entries or a dense matrix.
class ObservationOperator {
 public:
  enum class Kind { Selection, Dense };

  /// Observes state entries `indices` (unique, in range) of a length-`state_size` state.
  static ObservationOperator selection(std::vector<int> indices, int state_size);
  static ObservationOperator identity(int state_size);
  static ObservationOperator dense(Matrix h);

  Kind kind() const { return kind_; }
  int obs_size() const { return obs_size_; }
  int state_size() const { return state_size_; }

  /// H x for a single state.
  Vector apply(const Vector& x) const;
  /// H M (M has Nstate rows).
  Matrix apply(const Matrix& m) const;
  /// M H^T (M has Nstate columns).
  Matrix apply_transpose_right(const Matrix& m) const;
  /// H M H^T
  Matrix project(const Matrix& m) const;
  /// H^T M (M has Nobs rows).
  Matrix adjoint(const Matrix& m) const;
  Matrix to_dense() const;

  /// Grid point attached to each observation: the selected index, or for a dense
  /// row the column of largest magnitude (nearest-grid-point rule).
  const std::vector<int>& grid_indices() const { return grid_index_; }

 private:
  ObservationOperator() = default;

  Kind kind_ = Kind::Selection;
  int obs_size_ = 0;
  int state_size_ = 0;
  std::vector<int> grid_index_;
  Matrix dense_;
};

enum class AnalysisScheme { DEnKF, StochasticEnKF };

enum class LocalizationSpace {
  State,            ///< B-localization, radii per grid point
  ObservationHB,    ///< R-localization of HB only, radii per observation
  ObservationHBHt,  ///< R-localization of HB and HBH^T, radii per observation
};

AnalysisScheme parse_analysis_scheme(std::string_view name);
LocalizationSpace parse_localization_space(std::string_view name);
std::string_view to_string(AnalysisScheme scheme);
std::string_view to_string(LocalizationSpace space);

struct LocalizationSettings {
  LocalizationSpace space = LocalizationSpace::State;
  KernelFamily family = KernelFamily::GaspariCohn;
  double spacing = 1.0;
  Vector radii;  ///< length Nstate for State, Nobs otherwise
};

struct AnalysisConfig {
  AnalysisScheme scheme = AnalysisScheme::DEnKF;
  std::optional<Vector> inflation;
  std::optional<LocalizationSettings> localization;
  std::uint64_t seed = 0;
};

/// K = B H^T (H B H^T + R)^{-1} via a symmetric factorization of the innovation covariance.
Matrix kalman_gain(const Matrix& b, const ObservationOperator& h, const Matrix& r);

/// Gain after applying the inflation and localization requested by `cfg` to the
/// covariance of `anomalies`.
Matrix analysis_gain(const AnomalyMatrix& anomalies, const ObservationOperator& h, const Matrix& r,
                     const AnalysisConfig& cfg);

Ensemble denkf_analysis(const Ensemble& forecast, const Vector& y, const ObservationOperator& h, const Matrix& r,
                        const AnalysisConfig& cfg);

Ensemble stochastic_enkf_analysis(const Ensemble& forecast, const Vector& y, const ObservationOperator& h,
                                  const Matrix& r, std::mt19937_64& rng, const AnalysisConfig& cfg);

/// Dispatches on cfg.scheme; the stochastic scheme seeds its own generator from cfg.seed.
Ensemble analyze(const Ensemble& forecast, const Vector& y, const ObservationOperator& h, const Matrix& r,
                 const AnalysisConfig& cfg);

/// A = (I - K H) B. Valid for any PSD B.
Matrix posterior_covariance_exact(const Matrix& b, const ObservationOperator& h, const Matrix& r);

/// A = (B^{-1} + H^T R^{-1} H)^{-1}. Falls back to the gain form when B is not
/// positive definite.
Matrix posterior_covariance_information_form(const Matrix& b, const ObservationOperator& h, const Matrix& r);

/// Returns S^{-1} M for a symmetric S. Uses a Cholesky factorization when S is
/// positive definite and pivoted LU otherwise; throws SingularMatrixError when S
/// is numerically singular.
Matrix symmetric_solve(const Matrix& s, const Matrix& m);

}  // namespace oedda

/**
 * @file oed.hpp
 * @brief A-optimal design criteria for adaptive inflation and localization.
 *
 * Each objective is the trace of the posterior covariance obtained with the
 * tuned prior, plus a regularization term:
 *
 *   inflation:          tr(B~) - tr(G^{-1} H B~ B~ H^T) - alpha * sum(lambda_i - 1),
 *                       B~ = D^{1/2} B D^{1/2},  G = R + H B~ H^T
 *   B-localization:     tr(B^) - tr((R + H B^ H^T)^{-1} H B^ B^ H^T) + gamma * sum(l_i),
 *                       B^ = B o C(l)
 *   R-localization HB:  tr(B) - tr(HB^ HB^^T (R + H B H^T)^{-1}) + gamma * sum(l_i)
 *   R-localization HBH^T: as above with R + C2 o (H B H^T) in the inverse
 *
 * The inflation gradient uses the z1..z4 form
 *   dPsi/dlambda_i = lambda_i^{-1} e_i^T (z1 - z2 - z3 + z4),
 * which only involves B~, H, R and G^{-1} and is therefore well defined for a
 * rank-deficient ensemble covariance.
 *
 * All functions accept the prior covariance B directly (possibly already
 * inflated or localized) or the anomaly matrix it comes from.
 */
#pragma once

#include "oedda/box.hpp"
#include "oedda/enkf.hpp"
#include "oedda/ensemble.hpp"
#include "oedda/localization.hpp"
#include "oedda/types.hpp"

namespace oedda {

struct InflationDesign {
  Vector lambda;
  Box bounds;
  double alpha = 0.0;

  /// Default bounds [1, 1.5] on every entry, lambda at the box midpoint.
  static InflationDesign with_defaults(int n, double alpha = 0.0, double lower = 1.0, double upper = 1.5);
  /// Throws unless 1 <= lower <= lambda <= upper and alpha >= 0.
  void validate() const;
};

struct LocalizationDesign {
  Vector radii;
  Box bounds;
  double gamma = 0.0;
  LocalizationSpace variant = LocalizationSpace::State;

  /// Throws unless 0 < lower <= radii <= upper and gamma >= 0.
  void validate() const;
};

struct ObjectiveEvaluation {
  double value = 0.0;      ///< criterion + regularization term
  Vector gradient;         ///< d value / d design
  double criterion = 0.0;  ///< posterior trace part (Psi)
  double regularization = 0.0;  ///< Phi(design), before multiplying by alpha/gamma
  bool feasible = true;    ///< false when the observation-space criterion is <= 0
};

ObjectiveEvaluation inflation_objective(const InflationDesign& design, const Matrix& b, const ObservationOperator& h,
                                        const Matrix& r);
ObjectiveEvaluation inflation_objective(const InflationDesign& design, const AnomalyMatrix& x,
                                        const ObservationOperator& h, const Matrix& r);

ObjectiveEvaluation b_localization_objective(const LocalizationDesign& design, const Matrix& b,
                                             const ObservationOperator& h, const Matrix& r,
                                             const DistanceMetric& metric, KernelFamily family);
ObjectiveEvaluation b_localization_objective(const LocalizationDesign& design, const AnomalyMatrix& x,
                                             const ObservationOperator& h, const Matrix& r,
                                             const DistanceMetric& metric, KernelFamily family);

ObjectiveEvaluation r_localization_objective_hb(const LocalizationDesign& design, const Matrix& b,
                                                const ObservationOperator& h, const Matrix& r,
                                                const DistanceMetric& metric, KernelFamily family);
ObjectiveEvaluation r_localization_objective_hb(const LocalizationDesign& design, const AnomalyMatrix& x,
                                                const ObservationOperator& h, const Matrix& r,
                                                const DistanceMetric& metric, KernelFamily family);

ObjectiveEvaluation r_localization_objective_hbht(const LocalizationDesign& design, const Matrix& b,
                                                  const ObservationOperator& h, const Matrix& r,
                                                  const DistanceMetric& metric, KernelFamily family);
ObjectiveEvaluation r_localization_objective_hbht(const LocalizationDesign& design, const AnomalyMatrix& x,
                                                  const ObservationOperator& h, const Matrix& r,
                                                  const DistanceMetric& metric, KernelFamily family);

/// Dispatches on design.variant.
ObjectiveEvaluation localization_objective(const LocalizationDesign& design, const Matrix& b,
                                           const ObservationOperator& h, const Matrix& r,
                                           const DistanceMetric& metric, KernelFamily family);

/// tr((B^{-1} + H^T R^{-1} H)^{-1}) by explicit dense inversion. Reference
/// value for the trace expansions above; requires B and R invertible.
double posterior_trace_oracle(const Matrix& b, const ObservationOperator& h, const Matrix& r);

}  // namespace oedda

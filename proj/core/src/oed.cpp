#include "oedda/oed.hpp"

#include <cmath>
#include <string>

#include "oedda/errors.hpp"

namespace oedda {

namespace {

void check_problem(const Matrix& b, const ObservationOperator& h, const Matrix& r) {
  if (b.rows() != b.cols()) throw DimensionError("prior covariance must be square");
  if (b.rows() != h.state_size()) throw DimensionError("prior covariance and observation operator disagree on Nstate");
  if (r.rows() != h.obs_size() || r.cols() != h.obs_size()) {
    throw DimensionError("observation error covariance must be Nobs x Nobs");
  }
  if (!b.allFinite() || !r.allFinite()) throw NumericalError("non-finite covariance passed to design objective");
}

void check_box_and_point(const Vector& x, const Box& box, const char* what) {
  box.validate();
  if (x.size() != box.size()) throw DimensionError(std::string(what) + " and its bounds differ in length");
  if (!x.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

// Sum of elementwise products, i.e. tr(A^T B).
double frobenius_dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

void check_localization_problem(const LocalizationDesign& design, const Matrix& b, const ObservationOperator& h,
                                const Matrix& r, const DistanceMetric& metric, LocalizationSpace expected) {
  check_problem(b, h, r);
  design.validate();
  if (design.variant != expected) throw ConfigError("localization design variant does not match the objective");
  if (metric.grid_size() != h.state_size()) throw DimensionError("distance metric and state size disagree");
  const int expected_size = expected == LocalizationSpace::State ? h.state_size() : h.obs_size();
  if (design.radii.size() != expected_size) {
    throw DimensionError("localization design has " + std::to_string(design.radii.size()) + " radii, expected " +
                         std::to_string(expected_size));
  }
}

}  // namespace

InflationDesign InflationDesign::with_defaults(int n, double alpha, double lower, double upper) {
  InflationDesign d{Vector(), Box::uniform(n, lower, upper), alpha};
  d.lambda = d.bounds.midpoint();
  d.validate();
  return d;
}

void InflationDesign::validate() const {
  check_box_and_point(lambda, bounds, "inflation design");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("inflation penalty alpha must be finite and >= 0");
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(bounds.lower[i] >= 1.0)) throw DomainError("inflation lower bound must be >= 1");
    if (lambda[i] < bounds.lower[i] || lambda[i] > bounds.upper[i]) {
      throw DomainError("inflation factor " + std::to_string(i) + " lies outside its bounds");
    }
  }
}

void LocalizationDesign::validate() const {
  check_box_and_point(radii, bounds, "localization design");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("localization penalty gamma must be finite and >= 0");
  validate_radii(radii, bounds.lower, bounds.upper);
}

ObjectiveEvaluation inflation_objective(const InflationDesign& design, const Matrix& b, const ObservationOperator& h,
                                        const Matrix& r) {
  check_problem(b, h, r);
  design.validate();
  if (design.lambda.size() != b.rows()) throw DimensionError("inflation design must have one factor per state entry");

  const Matrix bt = inflate_covariance(b, design.lambda);
  const Matrix hbt = h.apply(bt);
  const Matrix g = h.project(bt) + r;
  const Matrix w = symmetric_solve(g, hbt);  // G^{-1} H B~
  const Matrix p = h.adjoint(w);             // H^T G^{-1} H B~

  ObjectiveEvaluation out;
  out.criterion = bt.trace() - frobenius_dot(w, hbt);
  out.regularization = (design.lambda.array() - 1.0).sum();
  out.value = out.criterion - design.alpha * out.regularization;

  // e_i^T (z1 - z2 - z3 + z4) is the diagonal of (I - P) B~ (I - P).
  const Matrix t = bt - bt * p;
  out.gradient.resize(design.lambda.size());
  for (Eigen::Index i = 0; i < design.lambda.size(); ++i) {
    const double m_ii = t(i, i) - p.row(i).dot(t.col(i));
    out.gradient[i] = m_ii / design.lambda[i] - design.alpha;
  }
  if (!std::isfinite(out.value) || !out.gradient.allFinite()) throw NumericalError("inflation objective is not finite");
  return out;
}

ObjectiveEvaluation inflation_objective(const InflationDesign& design, const AnomalyMatrix& x,
                                        const ObservationOperator& h, const Matrix& r) {
  return inflation_objective(design, x.covariance(), h, r);
}

ObjectiveEvaluation b_localization_objective(const LocalizationDesign& design, const Matrix& b,
                                             const ObservationOperator& h, const Matrix& r,
                                             const DistanceMetric& metric, KernelFamily family) {
  check_localization_problem(design, b, h, r, metric, LocalizationSpace::State);

  const Matrix c = assemble_state_kernel(metric, family, design.radii);
  const Matrix bh = b.cwiseProduct(c);
  const Matrix hbh = h.apply(bh);
  const Matrix g = h.project(bh) + r;
  const Matrix w = symmetric_solve(g, hbh);
  const Matrix p = h.adjoint(w);

  ObjectiveEvaluation out;
  out.criterion = bh.trace() - frobenius_dot(w, hbh);
  out.regularization = design.radii.sum();
  out.value = out.criterion + design.gamma * out.regularization;

  // dPsi = tr(N dB^) with N = (I - P)(I - P)^T; dB^/dl_i is supported on row and
  // column i and both halves contribute equally because B and N are symmetric.
  const Eigen::Index n = b.rows();
  const Matrix imp = Matrix::Identity(n, n) - p;
  const Matrix nmat = imp * imp.transpose();
  const Matrix dl = state_kernel_radius_derivatives(metric, family, design.radii);
  out.gradient.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lb_dot_n = dl.row(i).cwiseProduct(b.row(i)).dot(nmat.col(i));
    out.gradient[i] = lb_dot_n + design.gamma;
  }
  if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
    throw NumericalError("B-localization objective is not finite");
  }
  return out;
}

ObjectiveEvaluation b_localization_objective(const LocalizationDesign& design, const AnomalyMatrix& x,
                                             const ObservationOperator& h, const Matrix& r,
                                             const DistanceMetric& metric, KernelFamily family) {
  return b_localization_objective(design, x.covariance(), h, r, metric, family);
}

namespace {

ObjectiveEvaluation r_localization_impl(const LocalizationDesign& design, const Matrix& b,
                                        const ObservationOperator& h, const Matrix& r, const DistanceMetric& metric,
                                        KernelFamily family, bool localize_hbht) {
  const Matrix hb = h.apply(b);
  const Matrix hbht = h.apply_transpose_right(hb);
  const auto& grid = h.grid_indices();
  const ObservationKernels k = assemble_obs_kernels(metric, family, design.radii, grid);
  const ObservationKernelDerivatives dk = obs_kernel_radius_derivatives(metric, family, design.radii, grid);

  const Matrix hb_loc = k.obs_state.cwiseProduct(hb);
  const Matrix s = (localize_hbht ? Matrix(k.obs_obs.cwiseProduct(hbht)) : hbht) + r;
  const Matrix w = symmetric_solve(s, hb_loc);  // row i is psi_i^T

  ObjectiveEvaluation out;
  out.criterion = b.trace() - frobenius_dot(hb_loc, w);
  out.regularization = design.radii.sum();
  out.value = out.criterion + design.gamma * out.regularization;
  out.feasible = out.criterion > 0.0;

  const Eigen::Index m = design.radii.size();
  out.gradient.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::RowVectorXd coeff = -2.0 * dk.obs_state.row(i).cwiseProduct(hb.row(i));
    if (localize_hbht) coeff += dk.obs_obs.row(i).cwiseProduct(hbht.row(i)) * w;
    out.gradient[i] = coeff.dot(w.row(i)) + design.gamma;
  }
  if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
    throw NumericalError("R-localization objective is not finite");
  }
  return out;
}

}  // namespace

ObjectiveEvaluation r_localization_objective_hb(const LocalizationDesign& design, const Matrix& b,
                                                const ObservationOperator& h, const Matrix& r,
                                                const DistanceMetric& metric, KernelFamily family) {
  check_localization_problem(design, b, h, r, metric, LocalizationSpace::ObservationHB);
  return r_localization_impl(design, b, h, r, metric, family, false);
}

ObjectiveEvaluation r_localization_objective_hb(const LocalizationDesign& design, const AnomalyMatrix& x,
                                                const ObservationOperator& h, const Matrix& r,
                                                const DistanceMetric& metric, KernelFamily family) {
  return r_localization_objective_hb(design, x.covariance(), h, r, metric, family);
}

ObjectiveEvaluation r_localization_objective_hbht(const LocalizationDesign& design, const Matrix& b,
                                                  const ObservationOperator& h, const Matrix& r,
                                                  const DistanceMetric& metric, KernelFamily family) {
  check_localization_problem(design, b, h, r, metric, LocalizationSpace::ObservationHBHt);
  return r_localization_impl(design, b, h, r, metric, family, true);
}

ObjectiveEvaluation r_localization_objective_hbht(const LocalizationDesign& design, const AnomalyMatrix& x,
                                                  const ObservationOperator& h, const Matrix& r,
                                                  const DistanceMetric& metric, KernelFamily family) {
  return r_localization_objective_hbht(design, x.covariance(), h, r, metric, family);
}

ObjectiveEvaluation localization_objective(const LocalizationDesign& design, const Matrix& b,
                                           const ObservationOperator& h, const Matrix& r,
                                           const DistanceMetric& metric, KernelFamily family) {
  switch (design.variant) {
    case LocalizationSpace::State:
      return b_localization_objective(design, b, h, r, metric, family);
    case LocalizationSpace::ObservationHB:
      return r_localization_objective_hb(design, b, h, r, metric, family);
    case LocalizationSpace::ObservationHBHt:
      return r_localization_objective_hbht(design, b, h, r, metric, family);
  }
  throw ConfigError("unknown localization variant");
}

double posterior_trace_oracle(const Matrix& b, const ObservationOperator& h, const Matrix& r) {
  check_problem(b, h, r);
  Eigen::FullPivLU<Matrix> blu(b);
  Eigen::FullPivLU<Matrix> rlu(r);
  if (!blu.isInvertible() || !rlu.isInvertible()) throw SingularMatrixError("posterior trace oracle needs invertible B and R");
  const Matrix hd = h.to_dense();
  const Matrix info = blu.inverse() + hd.transpose() * rlu.inverse() * hd;
  Eigen::FullPivLU<Matrix> ilu(info);
  if (!ilu.isInvertible()) throw SingularMatrixError("posterior information matrix is singular");
  return ilu.inverse().trace();
}

}  // namespace oedda

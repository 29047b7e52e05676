/**
 * @file optimizer.hpp
 * @brief Bound-constrained minimizer: projected gradient with an L-BFGS
 * direction on the free variables and Armijo backtracking along the
 * projection arc.
 */
#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "oedda/box.hpp"
#include "oedda/types.hpp"

namespace oedda {

struct OptimizerConfig {
  double ftol = 1e-6;       ///< stop when |f_k - f_{k-1}| <= ftol * max(1, |f_k|)
  int max_iters = 10000;
  double initial_step = 1.0;  ///< length of the first (steepest-descent) trial step
  bool record_history = false;
  double pgtol = 1e-10;     ///< stop when the projected gradient inf-norm drops below this
  int memory = 8;           ///< number of stored L-BFGS pairs
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;

  void validate() const;
};

enum class Termination { FunctionTolerance, ProjectedGradient, MaxIterations, LineSearchFailed };

std::string_view to_string(Termination t);

struct OptimizerResult {
  Vector x_opt;
  double f_opt = 0.0;
  int n_iters = 0;
  int n_feval = 0;
  bool converged = false;
  Termination reason = Termination::MaxIterations;
  bool x0_clipped = false;
  std::vector<double> f_history;  ///< accepted objective values, starting with f(x0)
  std::vector<Vector> x_history;  ///< accepted iterates, starting with x0
};

/// Returns f(x) and writes the gradient into `grad` (resized by the callee).
using ObjectiveFn = std::function<double(const Vector& x, Vector& grad)>;

/// ||P_box(x - g) - x||_inf
double projected_gradient_norm(const Vector& x, const Vector& g, const Box& box);

/// Minimizes f over the box starting from x0 (clipped into the box if needed).
/// Throws NumericalError if f or its gradient is non-finite at a feasible point.
OptimizerResult minimize(const ObjectiveFn& f, const Vector& x0, const Box& box, const OptimizerConfig& cfg = {});

}  // namespace oedda

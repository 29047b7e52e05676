#include "oedda/optimizer.hpp"

#include <cmath>
#include <deque>

#include "oedda/errors.hpp"

namespace oedda {

namespace {

struct CorrectionPair {
  Vector s;
  Vector y;
  double rho;
};

// A variable is free unless it sits on a bound and the gradient pushes it outward.
Vector free_mask(const Vector& x, const Vector& g, const Box& box) {
  Vector mask = Vector::Ones(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= box.lower[i] && g[i] > 0.0) || (x[i] >= box.upper[i] && g[i] < 0.0)) mask[i] = 0.0;
  }
  return mask;
}

Vector lbfgs_direction(const Vector& g, const Vector& mask, const std::deque<CorrectionPair>& pairs) {
  Vector q = g.cwiseProduct(mask);
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    const auto& p = pairs[k];
    alpha[k] = p.rho * p.s.cwiseProduct(mask).dot(q);
    q -= alpha[k] * p.y.cwiseProduct(mask);
  }
  const auto& last = pairs.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    const double beta = p.rho * p.y.cwiseProduct(mask).dot(q);
    q += (alpha[k] - beta) * p.s.cwiseProduct(mask);
  }
  return -q.cwiseProduct(mask);
}

double evaluate(const ObjectiveFn& f, const Vector& x, Vector& g, int& n_feval) {
  ++n_feval;
  const double v = f(x, g);
  if (!std::isfinite(v)) throw NumericalError("objective is not finite at a feasible point");
  if (g.size() != x.size()) throw DimensionError("objective gradient has the wrong length");
  if (!g.allFinite()) throw NumericalError("objective gradient is not finite at a feasible point");
  return v;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(ftol > 0.0)) throw ConfigError("optimizer ftol must be positive");
  if (max_iters < 1) throw ConfigError("optimizer max_iters must be positive");
  if (!(initial_step > 0.0)) throw ConfigError("optimizer initial_step must be positive");
  if (!(pgtol >= 0.0)) throw ConfigError("optimizer pgtol must be non-negative");
  if (memory < 0) throw ConfigError("optimizer memory must be non-negative");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw ConfigError("Armijo constant must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtracking factor must lie in (0, 1)");
  if (max_backtracks < 1) throw ConfigError("max_backtracks must be positive");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::FunctionTolerance:
      return "ftol";
    case Termination::ProjectedGradient:
      return "pgtol";
    case Termination::MaxIterations:
      return "max_iters";
    case Termination::LineSearchFailed:
      return "line_search_failed";
  }
  return "unknown";
}

double projected_gradient_norm(const Vector& x, const Vector& g, const Box& box) {
  return (box.clip(x - g) - x).lpNorm<Eigen::Infinity>();
}

OptimizerResult minimize(const ObjectiveFn& f, const Vector& x0, const Box& box, const OptimizerConfig& cfg) {
  cfg.validate();
  box.validate();
  if (x0.size() != box.size()) throw DimensionError("initial point and bounds differ in length");
  if (!x0.allFinite()) throw DomainError("initial point has non-finite entries");

  OptimizerResult res;
  Vector x = box.clip(x0);
  res.x0_clipped = (x.array() != x0.array()).any();

  Vector g;
  double fx = evaluate(f, x, g, res.n_feval);
  if (cfg.record_history) {
    res.f_history.push_back(fx);
    res.x_history.push_back(x);
  }

  std::deque<CorrectionPair> pairs;
  Vector g_new;
  while (true) {
    if (projected_gradient_norm(x, g, box) <= cfg.pgtol) {
      res.converged = true;
      res.reason = Termination::ProjectedGradient;
      break;
    }
    if (res.n_iters >= cfg.max_iters) {
      res.reason = Termination::MaxIterations;
      break;
    }

    const Vector mask = free_mask(x, g, box);
    bool accepted = false;
    Vector x_new;
    double f_new = fx;
    // First try the quasi-Newton direction, then fall back to steepest descent.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool quasi_newton = attempt == 0 && !pairs.empty();
      if (attempt == 0 && pairs.empty()) attempt = 1;
      Vector d;
      if (quasi_newton) {
        d = lbfgs_direction(g, mask, pairs);
      } else {
        const Vector gf = g.cwiseProduct(mask);
        const double gn = gf.norm();
        if (gn == 0.0) break;
        d = -gf * (cfg.initial_step / gn);
      }
      if (d.dot(g) >= 0.0) continue;

      double t = 1.0;
      for (int bt = 0; bt <= cfg.max_backtracks; ++bt, t *= cfg.backtrack) {
        Vector trial = box.clip(x + t * d);
        const double decrease = g.dot(trial - x);
        if (!(decrease < 0.0)) break;
        Vector g_trial;
        const double f_trial = evaluate(f, trial, g_trial, res.n_feval);
        if (f_trial <= fx + cfg.armijo_c1 * decrease) {
          x_new = std::move(trial);
          g_new = std::move(g_trial);
          f_new = f_trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) pairs.clear();
    }

    if (!accepted) {
      res.reason = Termination::LineSearchFailed;
      break;
    }

    ++res.n_iters;
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (cfg.memory > 0 && sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      pairs.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(pairs.size()) > cfg.memory) pairs.pop_front();
    }

    const double f_prev = fx;
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
    if (cfg.record_history) {
      res.f_history.push_back(fx);
      res.x_history.push_back(x);
    }
    if (std::abs(fx - f_prev) <= cfg.ftol * std::max(1.0, std::abs(fx))) {
      res.converged = true;
      res.reason = Termination::FunctionTolerance;
      break;
    }
  }

  res.x_opt = x;
  res.f_opt = fx;
  return res;
}

}  // namespace oedda

/**
 * @file lorenz.hpp
 * @brief Lorenz-96 forward models and a fixed-step RK4 integrator.
 *
 * The two-layer model couples K large-scale variables x_k to J*K small-scale
 * variables z_j:
 *
 *   dx_k/dt = x_{k-1}(x_{k+1} - x_{k-2}) - x_k + F - (hc/b) sum_{j in block k} z_j
 *   dz_j/dt = -cb z_{j+1}(z_{j+2} - z_{j-1}) - c z_j + (hc/b) x_{floor((j-1)/J)+1}
 *
 * with periodic indices in both layers. The state is stored flat as
 * [x_1..x_K, z_1..z_{JK}]. The single-layer model is the large-scale equation
 * with h = 0.
 */
#pragma once

#include <functional>

#include "oedda/types.hpp"

namespace oedda {

struct TwoLayerParams {
  int K = 40;
  int J = 32;
  double F = 8.0;
  double h = 1.0;
  double c = 10.0;
  double b = 10.0;

  int state_size() const { return K + J * K; }
  /// Throws DomainError unless K >= 4 and J >= 1.
  void validate() const;
};

struct IntegratorConfig {
  double dt = 0.005;
  int steps_per_window = 20;

  void validate() const;
};

/// Pure tendency function dx/dt = f(x).
using Tendency = std::function<Vector(const Vector&)>;

Vector two_layer_rhs(const Vector& state, const TwoLayerParams& p);

Vector single_layer_rhs(const Vector& state, double forcing);

/// One classical fourth-order Runge-Kutta step. Throws NumericalError if the
/// result contains a non-finite entry.
Vector rk4_step(const Tendency& rhs, const Vector& state, double dt);

/// Applies `cfg.steps_per_window` RK4 steps.
Vector propagate(const Tendency& rhs, Vector state, const IntegratorConfig& cfg);

/// Convenience wrappers binding the model parameters.
Tendency make_two_layer_tendency(const TwoLayerParams& p);
Tendency make_single_layer_tendency(double forcing);

}  // namespace oedda

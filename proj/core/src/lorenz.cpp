#include "oedda/lorenz.hpp"

#include <cmath>
#include <string>

#include "oedda/errors.hpp"

namespace oedda {

namespace {

inline int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace

void TwoLayerParams::validate() const {
  if (K < 4) throw DomainError("two-layer Lorenz-96 needs K >= 4, got " + std::to_string(K));
  if (J < 1) throw DomainError("two-layer Lorenz-96 needs J >= 1, got " + std::to_string(J));
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrator time step must be finite and positive");
  if (steps_per_window < 0) throw DomainError("steps_per_window must be non-negative");
}

Vector two_layer_rhs(const Vector& state, const TwoLayerParams& p) {
  p.validate();
  const int K = p.K;
  const int JK = p.J * p.K;
  if (state.size() != K + JK) {
    throw DimensionError("two_layer_rhs: state has length " + std::to_string(state.size()) + ", expected " +
                         std::to_string(K + JK));
  }
  const double coupling = p.h * p.c / p.b;
  const double* x = state.data();
  const double* z = state.data() + K;

  Vector out(K + JK);
  double* dx = out.data();
  double* dz = out.data() + K;

  for (int k = 0; k < K; ++k) {
    double block = 0.0;
    for (int j = k * p.J; j < (k + 1) * p.J; ++j) block += z[j];
    dx[k] = x[wrap(k - 1, K)] * (x[wrap(k + 1, K)] - x[wrap(k - 2, K)]) - x[k] + p.F - coupling * block;
  }
  for (int j = 0; j < JK; ++j) {
    dz[j] = -p.c * p.b * z[wrap(j + 1, JK)] * (z[wrap(j + 2, JK)] - z[wrap(j - 1, JK)]) - p.c * z[j] +
            coupling * x[j / p.J];
  }
  return out;
}

Vector single_layer_rhs(const Vector& state, double forcing) {
  const int K = static_cast<int>(state.size());
  if (K < 4) throw DomainError("single_layer_rhs needs at least 4 variables, got " + std::to_string(K));
  Vector out(K);
  for (int k = 0; k < K; ++k) {
    out[k] = state[wrap(k - 1, K)] * (state[wrap(k + 1, K)] - state[wrap(k - 2, K)]) - state[k] + forcing;
  }
  return out;
}

Vector rk4_step(const Tendency& rhs, const Vector& state, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");
  const Vector k1 = rhs(state);
  const Vector k2 = rhs(state + 0.5 * dt * k1);
  const Vector k3 = rhs(state + 0.5 * dt * k2);
  const Vector k4 = rhs(state + dt * k3);
  Vector next = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericalError("rk4_step: model state blew up (non-finite entries)");
  return next;
}

Vector propagate(const Tendency& rhs, Vector state, const IntegratorConfig& cfg) {
  cfg.validate();
  for (int s = 0; s < cfg.steps_per_window; ++s) state = rk4_step(rhs, state, cfg.dt);
  return state;
}

Tendency make_two_layer_tendency(const TwoLayerParams& p) {
  p.validate();
  return [p](const Vector& s) { return two_layer_rhs(s, p); };
}

Tendency make_single_layer_tendency(double forcing) {
  return [forcing](const Vector& s) { return single_layer_rhs(s, forcing); };
}

}  // namespace oedda

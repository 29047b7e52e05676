#include <gtest/gtest.h>

#include <cmath>

#include "oedda/errors.hpp"
#include "oedda/lorenz.hpp"
#include "support.hpp"

using namespace oedda;
using testing_support::ring;

namespace {

// Straight loop transcription of the two-layer equations.
Vector two_layer_oracle(const Vector& s, const TwoLayerParams& p) {
  const int K = p.K, J = p.J, N = J * K;
  Vector out(K + N);
  const double coup = p.h * p.c / p.b;
  for (int k = 0; k < K; ++k) {
    double zsum = 0.0;
    for (int j = k * J; j < (k + 1) * J; ++j) zsum += s(K + j);
    out(k) = s(ring(k - 1, K)) * (s(ring(k + 1, K)) - s(ring(k - 2, K))) - s(k) + p.F - coup * zsum;
  }
  for (int j = 0; j < N; ++j) {
    const double zp1 = s(K + ring(j + 1, N)), zp2 = s(K + ring(j + 2, N)), zm1 = s(K + ring(j - 1, N));
    out(K + j) = -p.c * p.b * zp1 * (zp2 - zm1) - p.c * s(K + j) + coup * s(j / J);
  }
  return out;
}

}  // namespace

TEST(Lorenz, TwoLayerMatchesLoopOracle) {
  std::mt19937_64 rng(11);
  TwoLayerParams p;
  p.K = 6;
  p.J = 3;
  const Vector s = testing_support::random_matrix(p.state_size(), 1, rng).col(0);
  EXPECT_LT((two_layer_rhs(s, p) - two_layer_oracle(s, p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lorenz, DefaultTwoLayerMatchesOracle) {
  std::mt19937_64 rng(12);
  TwoLayerParams p;
  const Vector s = testing_support::random_matrix(p.state_size(), 1, rng).col(0);
  EXPECT_LT((two_layer_rhs(s, p) - two_layer_oracle(s, p)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lorenz, SingleLayerIsTwoLayerWithoutCoupling) {
  std::mt19937_64 rng(13);
  TwoLayerParams p;
  p.K = 10;
  p.J = 2;
  p.h = 0.0;
  const Vector s = testing_support::random_matrix(p.state_size(), 1, rng).col(0);
  const Vector full = two_layer_rhs(s, p);
  EXPECT_LT((single_layer_rhs(s.head(p.K), p.F) - full.head(p.K)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Lorenz, HomogeneousStateIsFixedPoint) {
  const Vector x = Vector::Constant(40, 8.0);
  EXPECT_LT(single_layer_rhs(x, 8.0).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Lorenz, PeriodicShiftEquivariance) {
  std::mt19937_64 rng(14);
  const int K = 12;
  const Vector x = testing_support::random_matrix(K, 1, rng).col(0);
  Vector shifted(K);
  for (int k = 0; k < K; ++k) shifted(k) = x(ring(k - 3, K));
  const Vector f = single_layer_rhs(x, 8.0), fs = single_layer_rhs(shifted, 8.0);
  for (int k = 0; k < K; ++k) EXPECT_NEAR(fs(k), f(ring(k - 3, K)), 1e-13);
}

TEST(Lorenz, Rk4OnLinearDecay) {
  const Tendency decay = [](const Vector& x) { return Vector(-x); };
  const double h = 0.1;
  const double expected = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
  EXPECT_NEAR(rk4_step(decay, Vector::Ones(1), h)(0), expected, 1e-15);
  EXPECT_NEAR(expected, 0.9048375, 1e-15);
}

TEST(Lorenz, Rk4LocalErrorIsFifthOrder) {
  std::mt19937_64 rng(15);
  const Tendency f = make_single_layer_tendency(8.0);
  const Vector x0 = Vector::Constant(40, 8.0) + testing_support::random_matrix(40, 1, rng).col(0);
  auto reference = [&](double h) {
    Vector x = x0;
    for (int i = 0; i < 256; ++i) x = rk4_step(f, x, h / 256.0);
    return x;
  };
  const double h = 0.02;
  const double e1 = (rk4_step(f, x0, h) - reference(h)).norm();
  const double e2 = (rk4_step(f, x0, h / 2) - reference(h / 2)).norm();
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 28.0);
  EXPECT_LT(ratio, 36.0);
}

TEST(Lorenz, PropagateEqualsRepeatedSteps) {
  const Tendency f = make_single_layer_tendency(8.0);
  Vector x = Vector::Constant(8, 8.0);
  x(0) += 0.1;
  IntegratorConfig cfg;
  cfg.steps_per_window = 7;
  Vector y = x;
  for (int i = 0; i < 7; ++i) y = rk4_step(f, y, cfg.dt);
  EXPECT_EQ(propagate(f, x, cfg), y);
}

TEST(Lorenz, NonFiniteStepThrows) {
  const Tendency blow = [](const Vector& x) { return Vector(x.array().square() * 1e300); };
  EXPECT_THROW(rk4_step(blow, Vector::Constant(2, 1e10), 1.0), NumericalError);
}

TEST(Lorenz, ParamsValidation) {
  TwoLayerParams p;
  p.K = 3;
  EXPECT_THROW(p.validate(), DomainError);
  p.K = 4;
  p.J = 0;
  EXPECT_THROW(p.validate(), DomainError);
}

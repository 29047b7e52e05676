#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oedda/errors.hpp"
#include "oedda/localization.hpp"
#include "support.hpp"

using namespace oedda;
using testing_support::gc_oracle;

TEST(Localization, RingDistance) {
  const DistanceMetric d(10, 0.5);
  EXPECT_DOUBLE_EQ(d(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(d(0, 3), 1.5);
  EXPECT_DOUBLE_EQ(d(0, 9), 0.5);
  EXPECT_DOUBLE_EQ(d(2, 7), 2.5);
  EXPECT_DOUBLE_EQ(d(7, 2), d(2, 7));
}

TEST(Localization, GcFrozenValues) {
  const double L = 1.7;
  EXPECT_DOUBLE_EQ(kernel_value(KernelFamily::GaspariCohn, 0.0, L), 1.0);
  EXPECT_NEAR(kernel_value(KernelFamily::GaspariCohn, L, L), 5.0 / 24.0, 1e-14);
  EXPECT_EQ(kernel_value(KernelFamily::GaspariCohn, 2.0 * L, L), 0.0);
  EXPECT_EQ(kernel_value(KernelFamily::GaspariCohn, 5.0 * L, L), 0.0);
  EXPECT_NEAR(kernel_value(KernelFamily::Gauss, L, L), std::exp(-0.5), 1e-15);
}

TEST(Localization, GcMatchesOracle) {
  for (double d = 0.0; d < 5.0; d += 0.037) {
    EXPECT_NEAR(kernel_value(KernelFamily::GaspariCohn, d, 1.3), gc_oracle(d, 1.3), 1e-14) << d;
  }
}

TEST(Localization, GcContinuousAtBranchPoints) {
  for (double L : {0.5, 1.0, 2.3}) {
    for (double knot : {L, 2.0 * L}) {
      const double lo = kernel_value(KernelFamily::GaspariCohn, knot * (1 - 1e-14), L);
      const double hi = kernel_value(KernelFamily::GaspariCohn, knot * (1 + 1e-14), L);
      EXPECT_LT(std::abs(lo - hi), 1e-12);
    }
  }
}

TEST(Localization, RadiusDerivativeMatchesFiniteDifference) {
  for (auto fam : {KernelFamily::Gauss, KernelFamily::GaspariCohn}) {
    for (double d : {0.3, 1.0, 2.0, 3.1}) {
      for (double L : {0.8, 1.35, 2.6}) {
        const double r = d / L;
        if (std::abs(r - 1.0) < 1e-3 || std::abs(r - 2.0) < 1e-3) continue;
        const double h = 1e-6;
        const double fd = (kernel_value(fam, d, L + h) - kernel_value(fam, d, L - h)) / (2 * h);
        EXPECT_NEAR(kernel_dvalue_dL(fam, d, L), fd, 1e-7);
      }
    }
  }
}

TEST(Localization, MonotoneInDistanceAndRadius) {
  for (auto fam : {KernelFamily::Gauss, KernelFamily::GaspariCohn}) {
    double prev = 2.0;
    for (double d = 0.0; d < 4.0; d += 0.05) {
      const double v = kernel_value(fam, d, 1.0);
      EXPECT_LE(v, prev + 1e-15);
      EXPECT_GE(v, 0.0);
      prev = v;
    }
    EXPECT_GE(kernel_value(fam, 1.5, 2.0), kernel_value(fam, 1.5, 1.0));
  }
}

TEST(Localization, StateKernelMatchesEntrywiseOracle) {
  const DistanceMetric metric(5);
  Vector radii(5);
  radii << 1, 2, 1, 2, 1;
  const Matrix c = assemble_state_kernel(metric, KernelFamily::GaspariCohn, radii);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double d = metric(i, j);
      EXPECT_NEAR(c(i, j), 0.5 * (gc_oracle(d, radii(i)) + gc_oracle(d, radii(j))), 1e-14);
    }
  EXPECT_LT((c - c.transpose()).norm(), 1e-15);
}

TEST(Localization, UniformRadiiNeedNoSymmetrization) {
  const DistanceMetric metric(8);
  const Matrix c = assemble_state_kernel(metric, KernelFamily::Gauss, Vector::Constant(8, 1.5));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(c(i, j), std::exp(-metric(i, j) * metric(i, j) / 4.5), 1e-15);
}

TEST(Localization, HugeGaussRadiusGivesOnes) {
  const DistanceMetric metric(6);
  const Matrix c = assemble_state_kernel(metric, KernelFamily::Gauss, Vector::Constant(6, 1e6));
  EXPECT_LT((c - Matrix::Ones(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Localization, HalfUnitGcIsIdentityOnUnitGrid) {
  const DistanceMetric metric(40);
  const Matrix c = assemble_state_kernel(metric, KernelFamily::GaspariCohn, Vector::Constant(40, 0.5));
  EXPECT_EQ(c, Matrix(Matrix::Identity(40, 40)));
}

TEST(Localization, StateDerivativeRows) {
  const DistanceMetric metric(6);
  Vector radii(6);
  radii << 0.8, 1.3, 2.2, 0.9, 1.7, 1.1;
  const Matrix d = state_kernel_radius_derivatives(metric, KernelFamily::Gauss, radii);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(d(i, j), kernel_dvalue_dL(KernelFamily::Gauss, metric(i, j), radii(i)));
}

TEST(Localization, ObservationKernels) {
  const DistanceMetric metric(8);
  const std::vector<int> grid{1, 4, 6};
  Vector radii(3);
  radii << 1.2, 0.7, 2.1;
  const auto k = assemble_obs_kernels(metric, KernelFamily::GaspariCohn, radii, grid);
  ASSERT_EQ(k.obs_state.rows(), 3);
  ASSERT_EQ(k.obs_state.cols(), 8);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(k.obs_state(i, j), gc_oracle(metric(grid[i], j), radii(i)), 1e-14);
    for (int l = 0; l < 3; ++l) {
      const double d = metric(grid[i], grid[l]);
      EXPECT_NEAR(k.obs_obs(i, l), 0.5 * (gc_oracle(d, radii(i)) + gc_oracle(d, radii(l))), 1e-14);
    }
  }
  const auto dk = obs_kernel_radius_derivatives(metric, KernelFamily::GaspariCohn, radii, grid);
  EXPECT_DOUBLE_EQ(dk.obs_state(2, 3), kernel_dvalue_dL(KernelFamily::GaspariCohn, metric(6, 3), 2.1));
  EXPECT_DOUBLE_EQ(dk.obs_obs(0, 1), kernel_dvalue_dL(KernelFamily::GaspariCohn, metric(1, 4), 1.2));
}

TEST(Localization, ProjectRadii) {
  Vector radii = Vector::LinSpaced(5, 1.0, 5.0);
  const std::vector<int> grid{4, 0, 2};
  const Vector p = project_radii_to_observations(radii, grid);
  EXPECT_EQ(p(0), 5.0);
  EXPECT_EQ(p(1), 1.0);
  EXPECT_EQ(p(2), 3.0);
}

TEST(Localization, Validation) {
  EXPECT_THROW(DistanceMetric(0), Error);
  EXPECT_THROW(kernel_value(KernelFamily::Gauss, 1.0, 0.0), DomainError);
  EXPECT_THROW(validate_radii(Vector::Constant(2, 3.0), Vector::Constant(2, 1.0), Vector::Constant(2, 2.0)), DomainError);
  EXPECT_EQ(parse_kernel_family("gauss"), KernelFamily::Gauss);
  EXPECT_THROW(parse_kernel_family("cosine"), Error);
}

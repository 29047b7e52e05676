#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oedda/errors.hpp"
#include "oedda/oed.hpp"
#include "support.hpp"

using namespace oedda;
using testing_support::central_difference;
using testing_support::rel_error;

namespace {

struct Instance {
  Matrix b;
  ObservationOperator h;
  Matrix r;
};

Instance random_instance(std::mt19937_64& rng, int n, bool rank_deficient) {
  std::uniform_int_distribution<int> pick(1, n);
  const int m = pick(rng);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(m);
  Matrix b;
  if (rank_deficient) {
    const Matrix x = testing_support::random_matrix(n, std::max(2, n / 2), rng);
    b = x * x.transpose() / double(x.cols() - 1);
  } else {
    b = testing_support::random_spd(n, rng);
  }
  const Vector rv = testing_support::random_uniform(m, 0.2, 1.0, rng);
  return {b, ObservationOperator::selection(idx, n), Matrix(rv.asDiagonal())};
}

// Radii whose GC ratios d/l stay clear of the branch points 1 and 2.
Vector clear_radii(int n, std::mt19937_64& rng) {
  for (;;) {
    const Vector l = testing_support::random_uniform(n, 0.6, 3.0, rng);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int d = 1; d <= n; ++d) {
        const double q = d / l(i);
        if (std::abs(q - 1.0) < 1e-2 || std::abs(q - 2.0) < 1e-2) ok = false;
      }
    if (ok) return l;
  }
}

LocalizationDesign loc_design(const Vector& radii, double gamma, LocalizationSpace variant) {
  LocalizationDesign d;
  d.radii = radii;
  d.bounds = Box::uniform(int(radii.size()), 0.1, 10.0);
  d.gamma = gamma;
  d.variant = variant;
  return d;
}

}  // namespace

TEST(Oed, ScalarInflationToy) {
  InflationDesign d = InflationDesign::with_defaults(1);
  d.lambda(0) = 1.0;
  const auto e = inflation_objective(d, Matrix::Ones(1, 1), ObservationOperator::identity(1), Matrix::Ones(1, 1));
  EXPECT_NEAR(e.value, 0.5, 1e-15);
  EXPECT_NEAR(e.gradient(0), 0.25, 1e-15);
}

TEST(Oed, IdentityPosteriorTrace) {
  InflationDesign d = InflationDesign::with_defaults(3);
  d.lambda.setOnes();
  const Matrix i3 = Matrix::Identity(3, 3);
  const auto e = inflation_objective(d, i3, ObservationOperator::identity(3), i3);
  EXPECT_NEAR(e.criterion, 1.5, 1e-15);
  EXPECT_NEAR(posterior_trace_oracle(i3, ObservationOperator::identity(3), i3), 1.5, 1e-15);
}

TEST(Oed, InflationValueMatchesDirectTrace) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 9;
    const Instance in = random_instance(rng, n, false);
    InflationDesign d = InflationDesign::with_defaults(n, 0.0);
    d.lambda = testing_support::random_uniform(n, 1.0, 1.5, rng);
    const Matrix bt = inflate_covariance(in.b, d.lambda);
    const double oracle = posterior_trace_oracle(bt, in.h, in.r);
    EXPECT_LE(std::abs(inflation_objective(d, in.b, in.h, in.r).value - oracle), 1e-8 * bt.trace());
  }
}

TEST(Oed, InflationReducedDiagonalFormula) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + t % 8;
    const Vector s2 = testing_support::random_uniform(n, 0.1, 3.0, rng);
    const Vector r2 = testing_support::random_uniform(n, 0.1, 3.0, rng);
    InflationDesign d = InflationDesign::with_defaults(n);
    d.lambda = testing_support::random_uniform(n, 1.0, 1.5, rng);
    double reduced = 0.0;
    for (int i = 0; i < n; ++i) reduced += 1.0 / (1.0 / (d.lambda(i) * s2(i)) + 1.0 / r2(i));
    const auto e = inflation_objective(d, Matrix(s2.asDiagonal()), ObservationOperator::identity(n), Matrix(r2.asDiagonal()));
    EXPECT_NEAR(e.criterion, reduced, 1e-12);
  }
}

TEST(Oed, InflationRegularizationSign) {
  std::mt19937_64 rng(43);
  const Instance in = random_instance(rng, 5, false);
  InflationDesign d = InflationDesign::with_defaults(5, 0.3);
  d.lambda = testing_support::random_uniform(5, 1.0, 1.5, rng);
  const auto e = inflation_objective(d, in.b, in.h, in.r);
  EXPECT_NEAR(e.regularization, (d.lambda.array() - 1.0).sum(), 1e-15);
  EXPECT_NEAR(e.value, e.criterion - 0.3 * e.regularization, 1e-14);
}

TEST(Oed, InflationGradientFiniteDifference) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 25; ++t) {
    const int n = 2 + t % 9;
    const Instance in = random_instance(rng, n, t % 2 == 1);
    InflationDesign d = InflationDesign::with_defaults(n, 0.01 * (t % 3));
    d.lambda = testing_support::random_uniform(n, 1.05, 1.45, rng);
    const auto e = inflation_objective(d, in.b, in.h, in.r);
    const Vector fd = central_difference(
        [&](const Vector& lam) {
          InflationDesign q = d;
          q.lambda = lam;
          return inflation_objective(q, in.b, in.h, in.r).value;
        },
        d.lambda);
    EXPECT_LT(rel_error(e.gradient, fd), 1e-5) << "instance " << t;
  }
}

TEST(Oed, LocalizationGradientsFiniteDifference) {
  std::mt19937_64 rng(45);
  for (auto variant : {LocalizationSpace::State, LocalizationSpace::ObservationHB, LocalizationSpace::ObservationHBHt}) {
    for (auto fam : {KernelFamily::GaspariCohn, KernelFamily::Gauss}) {
      for (int t = 0; t < 20; ++t) {
        const int n = 3 + t % 8;
        const Instance in = random_instance(rng, n, t % 2 == 0);
        const DistanceMetric metric(n);
        const int len = variant == LocalizationSpace::State ? n : in.h.obs_size();
        const LocalizationDesign d = loc_design(clear_radii(len, rng), 0.02 * (t % 2), variant);
        const auto e = localization_objective(d, in.b, in.h, in.r, metric, fam);
        const Vector fd = central_difference(
            [&](const Vector& l) {
              LocalizationDesign q = d;
              q.radii = l;
              return localization_objective(q, in.b, in.h, in.r, metric, fam).value;
            },
            d.radii);
        EXPECT_LT(rel_error(e.gradient, fd), 1e-5)
            << to_string(variant) << " " << to_string(fam) << " instance " << t;
      }
    }
  }
}

TEST(Oed, AnomalyOverloadsAgree) {
  std::mt19937_64 rng(46);
  const int n = 7;
  const AnomalyMatrix x(testing_support::random_matrix(n, 4, rng), 1.0 / 3.0);
  const Matrix b = x.covariance();
  const auto h = ObservationOperator::selection({0, 2, 3, 6}, n);
  const Matrix r = 0.4 * Matrix::Identity(4, 4);
  const DistanceMetric metric(n);
  InflationDesign di = InflationDesign::with_defaults(n, 0.01);
  EXPECT_NEAR(inflation_objective(di, x, h, r).value, inflation_objective(di, b, h, r).value, 1e-12);
  const LocalizationDesign ds = loc_design(clear_radii(n, rng), 0.01, LocalizationSpace::State);
  EXPECT_NEAR(b_localization_objective(ds, x, h, r, metric, KernelFamily::GaspariCohn).value,
              b_localization_objective(ds, b, h, r, metric, KernelFamily::GaspariCohn).value, 1e-12);
  const LocalizationDesign dr = loc_design(clear_radii(4, rng), 0.0, LocalizationSpace::ObservationHB);
  EXPECT_NEAR(r_localization_objective_hb(dr, x, h, r, metric, KernelFamily::Gauss).value,
              r_localization_objective_hb(dr, b, h, r, metric, KernelFamily::Gauss).value, 1e-12);
  LocalizationDesign dh = dr;
  dh.variant = LocalizationSpace::ObservationHBHt;
  EXPECT_NEAR(r_localization_objective_hbht(dh, x, h, r, metric, KernelFamily::Gauss).value,
              r_localization_objective_hbht(dh, b, h, r, metric, KernelFamily::Gauss).value, 1e-12);
}

TEST(Oed, HugeRadiiReduceToUnlocalizedTrace) {
  std::mt19937_64 rng(47);
  const int n = 6;
  const Matrix b = testing_support::random_spd(n, rng);
  const auto h = ObservationOperator::identity(n);
  const Matrix r = 0.5 * Matrix::Identity(n, n);
  const DistanceMetric metric(n);
  const double unlocalized = posterior_covariance_exact(b, h, r).trace();
  for (auto variant : {LocalizationSpace::State, LocalizationSpace::ObservationHB, LocalizationSpace::ObservationHBHt}) {
    LocalizationDesign d = loc_design(Vector::Constant(n, 1e6), 0.0, variant);
    d.bounds = Box::uniform(n, 1.0, 1e7);
    EXPECT_NEAR(localization_objective(d, b, h, r, metric, KernelFamily::Gauss).criterion, unlocalized, 1e-8);
  }
}

TEST(Oed, BLocalizationValueMatchesOracle) {
  std::mt19937_64 rng(48);
  const int n = 6;
  const Matrix b = testing_support::random_spd(n, rng);
  const auto h = ObservationOperator::selection({1, 4}, n);
  const Matrix r = 0.3 * Matrix::Identity(2, 2);
  const DistanceMetric metric(n);
  const LocalizationDesign d = loc_design(clear_radii(n, rng), 0.05, LocalizationSpace::State);
  const Matrix bl = hadamard(b, assemble_state_kernel(metric, KernelFamily::GaspariCohn, d.radii));
  const auto e = b_localization_objective(d, b, h, r, metric, KernelFamily::GaspariCohn);
  EXPECT_NEAR(e.criterion, posterior_covariance_exact(bl, h, r).trace(), 1e-10);
  EXPECT_NEAR(e.value, e.criterion + 0.05 * d.radii.sum(), 1e-12);
}

TEST(Oed, Validation) {
  InflationDesign d = InflationDesign::with_defaults(3);
  d.lambda(1) = 2.0;
  EXPECT_THROW(inflation_objective(d, Matrix::Identity(3, 3), ObservationOperator::identity(3), Matrix::Identity(3, 3)),
               Error);
  EXPECT_THROW(InflationDesign::with_defaults(3, 0.0, 0.9, 1.5).validate(), Error);
  InflationDesign e = InflationDesign::with_defaults(3);
  EXPECT_THROW(inflation_objective(e, Matrix::Identity(4, 4), ObservationOperator::identity(3), Matrix::Identity(3, 3)),
               DimensionError);
}

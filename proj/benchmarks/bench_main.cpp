#include <benchmark/benchmark.h>

#include <random>

#include "oedda/enkf.hpp"
#include "oedda/lorenz.hpp"
#include "oedda/oed.hpp"

using namespace oedda;

namespace {

AnomalyMatrix random_anomalies(int n, int ne, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix x(n, ne);
  for (int j = 0; j < ne; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = g(rng);
  x.colwise() -= x.rowwise().mean();
  return AnomalyMatrix(x, 1.0 / (ne - 1));
}

}  // namespace

static void BM_TwoLayerRk4Window(benchmark::State& state) {
  TwoLayerParams p;
  const Tendency f = make_two_layer_tendency(p);
  Vector x = Vector::Zero(p.state_size());
  x.head(p.K).setConstant(p.F);
  x(0) += 0.01;
  IntegratorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(x = propagate(f, x, cfg));
}
BENCHMARK(BM_TwoLayerRk4Window);

static void BM_SingleLayerRk4Window(benchmark::State& state) {
  const Tendency f = make_single_layer_tendency(8.0);
  Vector x = Vector::Constant(40, 8.0);
  x(0) += 0.01;
  IntegratorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(x = propagate(f, x, cfg));
}
BENCHMARK(BM_SingleLayerRk4Window);

static void BM_InflationObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AnomalyMatrix x = random_anomalies(n, 25, 1);
  const Matrix b = x.covariance();
  const auto h = ObservationOperator::identity(n);
  const Matrix r = 0.01 * Matrix::Identity(n, n);
  const InflationDesign d = InflationDesign::with_defaults(n, 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(inflation_objective(d, b, h, r));
}
BENCHMARK(BM_InflationObjective)->Arg(10)->Arg(40)->Arg(80);

static void BM_BLocalizationObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AnomalyMatrix x = random_anomalies(n, 25, 2);
  const Matrix b = x.covariance();
  const auto h = ObservationOperator::identity(n);
  const Matrix r = 0.01 * Matrix::Identity(n, n);
  LocalizationDesign d;
  d.radii = Vector::Constant(n, 1.3);
  d.bounds = Box::uniform(n, 0.5, 4.0);
  const DistanceMetric metric(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(b_localization_objective(d, b, h, r, metric, KernelFamily::GaspariCohn));
}
BENCHMARK(BM_BLocalizationObjective)->Arg(10)->Arg(40)->Arg(80);

static void BM_DenkfAnalysis(benchmark::State& state) {
  const int n = 40, ne = 25;
  const AnomalyMatrix x = random_anomalies(n, ne, 3);
  const Ensemble ens = Ensemble::from_mean_and_anomalies(Vector::Zero(n), x.columns());
  const auto h = ObservationOperator::identity(n);
  const Matrix r = 0.01 * Matrix::Identity(n, n);
  AnalysisConfig cfg;
  cfg.inflation = Vector::Constant(n, 1.5);
  LocalizationSettings loc;
  loc.radii = Vector::Constant(n, 2.0);
  cfg.localization = loc;
  const Vector y = Vector::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(denkf_analysis(ens, y, h, r, cfg));
}
BENCHMARK(BM_DenkfAnalysis);
BENCHMARK_MAIN();

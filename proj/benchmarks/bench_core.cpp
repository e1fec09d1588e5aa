#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "funcdoe/design.hpp"
#include "funcdoe/gpmodel.hpp"
#include "funcdoe/testbed.hpp"

using namespace funcdoe;

namespace {

Design example_design(int runs, std::uint64_t seed) {
  DesignRequest request;
  request.runs = runs;
  request.scalar_inputs = kTestScalarInputs;
  request.functional_inputs = kTestFunctionalInputs;
  request.sa.max_temperatures = 40;
  request.seed = seed;
  return generate_design(request);
}

void BM_BasisConstruction(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(BSplineBasis(k, m));
}
BENCHMARK(BM_BasisConstruction)->Args({7, 4})->Args({12, 5})->Args({30, 4});

void BM_FunctionalDist(benchmark::State& state) {
  const auto basis = make_basis(static_cast<int>(state.range(0)), 4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd a(basis->size()), b(basis->size());
  for (int i = 0; i < basis->size(); ++i) {
    a[i] = unit(rng);
    b[i] = unit(rng);
  }
  const FunctionalCurve f(basis, a), g(basis, b);
  for (auto _ : state) benchmark::DoNotOptimize(functional_dist(f, g));
}
BENCHMARK(BM_FunctionalDist)->Arg(7)->Arg(30);

void BM_PhiQc(benchmark::State& state) {
  const Design design = example_design(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(phi_qc(design, kDefaultQ));
}
BENCHMARK(BM_PhiQc)->Arg(20)->Arg(40);

void BM_CandidateSet(benchmark::State& state) {
  const auto basis = make_basis(7, 4);
  SaConfig sa;
  sa.max_temperatures = 40;
  for (auto _ : state) {
    benchmark::DoNotOptimize(candidate_set(static_cast<int>(state.range(0)), basis, kDefaultQ, sa, 1));
  }
}
BENCHMARK(BM_CandidateSet)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_GenerateDesign(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(example_design(static_cast<int>(state.range(0)), 2));
}
BENCHMARK(BM_GenerateDesign)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const Design design = example_design(40, 3);
  const TrainingData data =
      TrainingData::from_design(design, evaluate(TestFunctionId::kG2, design.run_points()));
  FitOptions options;
  options.weighting = state.range(0) != 0;
  options.multistart = 10;
  for (auto _ : state) benchmark::DoNotOptimize(GpModel::fit(data, KernelFamily::kMatern52, options));
}
BENCHMARK(BM_Fit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const Design design = example_design(40, 4);
  const TrainingData data =
      TrainingData::from_design(design, evaluate(TestFunctionId::kG2, design.run_points()));
  FitOptions options;
  options.multistart = 5;
  const GpModel model = GpModel::fit(data, KernelFamily::kMatern52, options);
  const auto test = random_test_points(static_cast<int>(state.range(0)), kTestScalarInputs,
                                       kTestFunctionalInputs, design.basis, 5);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(test));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Predict)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Loo(benchmark::State& state) {
  const Design design = example_design(40, 6);
  const TrainingData data =
      TrainingData::from_design(design, evaluate(TestFunctionId::kG2, design.run_points()));
  FitOptions options;
  options.multistart = 5;
  const GpModel model = GpModel::fit(data, KernelFamily::kMatern52, options);
  for (auto _ : state) benchmark::DoNotOptimize(model.loo());
}
BENCHMARK(BM_Loo);

}  // namespace

BENCHMARK_MAIN();

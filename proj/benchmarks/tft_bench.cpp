#include <benchmark/benchmark.h>

#include <tft/birthdeath.hpp>
#include <tft/enumerate.hpp>
#include <tft/verify.hpp>

using namespace tft;

namespace {

Hamiltonian driven_h() {
  std::vector<Eigen::VectorXd> e{Eigen::Vector3d(0, 1, 2), Eigen::Vector3d(0.5, 0, 1.5),
                                 Eigen::Vector3d(1.5, 0.5, 0), Eigen::Vector3d(2, 1, 0)};
  return Hamiltonian::piecewise_constant({0, 0.25, 0.5, 0.75, 1}, e, 1.0);
}

ProcessMeasure driven3() {
  const auto h = driven_h();
  const auto space = StateSpace::finite(3);
  return ProcessMeasure(space, build_ldb_protocol(h, 1.0, space, 1.0), gibbs_distribution(h, 0).distribution);
}

ProcessMeasure ramp2() {
  const auto h = Hamiltonian::functional(2, 1.0, [](State x, double s) { return x == 1 ? s : 0.0; }, 1.0, 1.0);
  const auto space = StateSpace::finite(2);
  return ProcessMeasure(space, build_ldb_protocol(h, 1.0, space, 1.0), gibbs_distribution(h, 0).distribution);
}

}  // namespace

static void BM_SampleInversion(benchmark::State& state) {
  const auto p = driven3();
  std::uint64_t i = 0;
  for (auto _ : state) {
    SeededStream s(1, i++);
    benchmark::DoNotOptimize(sample_path(p, s, SamplingMethod::Inversion));
  }
}
BENCHMARK(BM_SampleInversion);

static void BM_SampleThinning(benchmark::State& state) {
  const auto p = driven3();
  std::uint64_t i = 0;
  for (auto _ : state) {
    SeededStream s(1, i++);
    benchmark::DoNotOptimize(sample_path(p, s, SamplingMethod::Thinning));
  }
}
BENCHMARK(BM_SampleThinning);

static void BM_Ensemble(benchmark::State& state) {
  const auto p = driven3();
  const auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_ensemble(p, 10000, 1, {workers, 0}));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_ScorePiecewise(benchmark::State& state) {
  const auto p = driven3();
  const auto q = bc2_reversed_measure(p, driven_h());
  const auto paths = sample_ensemble(p, 1000, 2);
  const auto r = PathTransform::time_reversal();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(score(p, q, r, paths[i++ % paths.size()], Direction::Forward));
}
BENCHMARK(BM_ScorePiecewise);

static void BM_LogDensityFunctional(benchmark::State& state) {
  const auto p = ramp2();
  const auto paths = sample_ensemble(p, 1000, 3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(log_path_density(p, paths[i++ % paths.size()]));
}
BENCHMARK(BM_LogDensityFunctional);

static void BM_EvolveLaw(benchmark::State& state) {
  const auto p = driven3();
  for (auto _ : state) benchmark::DoNotOptimize(evolve_law(p, 1.0));
}
BENCHMARK(BM_EvolveLaw);

static void BM_RatioTest(benchmark::State& state) {
  const auto p = driven3();
  const auto h = driven_h();
  const auto q = bc2_reversed_measure(p, h);
  const auto fwd = sample_ensemble(p, 100000, 4, {1, kForwardDomain});
  const auto bwd = sample_ensemble(q, 100000, 4, {1, kBackwardDomain});
  const auto v = evaluate_functional(p, q, PathTransform::time_reversal(), Functional::Work, fwd, bwd, h);
  for (auto _ : state) benchmark::DoNotOptimize(ratio_test(v.forward, v.backward));
}
BENCHMARK(BM_RatioTest)->Unit(benchmark::kMillisecond);

static void BM_ExactVerify(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  Eigen::Matrix3d m;
  m << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.3, 0.3, 0.4;
  const DiscreteChain p(Eigen::Vector3d(0.2, 0.5, 0.3), std::vector<Eigen::MatrixXd>(steps, m));
  const auto sigma = CoordinatePermutation::cyclic_shift(steps, 1);
  for (auto _ : state) benchmark::DoNotOptimize(exact_verify(p, p, sigma));
}
BENCHMARK(BM_ExactVerify)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_BdFreeEnergy(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(bd_free_energy(BiasSpec::constant(2), lambda, 40.0));
}
BENCHMARK(BM_BdFreeEnergy)->Arg(-2)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_BdDivergenceScan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bd_divergence_scan(BiasSpec::strong(), 0.25, 1.0, {100, 200}));
}
BENCHMARK(BM_BdDivergenceScan)->Unit(benchmark::kMillisecond);

static void BM_SimulateBd(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(simulate_bd(BiasSpec::strong(), 1.0, 10000, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SimulateBd)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

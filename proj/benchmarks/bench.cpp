#include <benchmark/benchmark.h>

#include "malthus/age_model.hpp"
#include "malthus/estimator.hpp"
#include "malthus/size_sim.hpp"

namespace age = malthus::age;
namespace size = malthus::size;
using malthus::AgeDivisionRate;
using malthus::VariabilitySpec;

static void BM_MalthusReference(benchmark::State& state) {
  const auto B = AgeDivisionRate::power_lag(2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(age::malthus_reference(B, 1.0));
}
BENCHMARK(BM_MalthusReference);

static void BM_MalthusWithVariability(benchmark::State& state) {
  const auto B = AgeDivisionRate::power_lag(static_cast<double>(state.range(0)), 1.0);
  const auto rho = VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7).contract(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(age::malthus_with_variability(B, rho));
}
BENCHMARK(BM_MalthusWithVariability)->Arg(0)->Arg(2)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_D2AtZero(benchmark::State& state) {
  const auto B = AgeDivisionRate::power_lag(2.0, 1.0);
  const auto rho = VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(age::d2lambda_at_zero(B, rho));
}
BENCHMARK(BM_D2AtZero)->Unit(benchmark::kMillisecond);

static void BM_UnitSizeSampler(benchmark::State& state) {
  const size::SizeDivisionRate rate{size::SizeDivisionRate::Mode::UnitSize, 1.0, 2.0};
  malthus::Philox4x64 gen({1, 0}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(size::sample_division_size(rate, 1.3, gen.uniform01()));
}
BENCHMARK(BM_UnitSizeSampler);

static void BM_UnitTimeSampler(benchmark::State& state) {
  const size::SizeDivisionRate rate{size::SizeDivisionRate::Mode::UnitTime, 1.0, 2.0};
  malthus::Philox4x64 gen({2, 0}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(size::sample_daughter_size_unit_time(rate, 2.0, 0.8, gen));
}
BENCHMARK(BM_UnitTimeSampler);

static void BM_TruncatedGaussianDraw(benchmark::State& state) {
  const auto rho = VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7);
  malthus::Philox4x64 gen({3, 0}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rho.sample(gen));
}
BENCHMARK(BM_TruncatedGaussianDraw);

static void BM_SimulateTree(benchmark::State& state) {
  size::SimConfig c;
  c.horizon = static_cast<double>(state.range(0));
  c.kernel = size::Memoryless{VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7).contract(0.4)};
  std::uint64_t stream = 0;
  std::size_t cells = 0;
  for (auto _ : state) {
    const auto tree = size::simulate_tree(c, malthus::RngStream(1, stream++));
    cells += tree.cells.size();
    benchmark::DoNotOptimize(malthus::estimate::malthus_hat_biomass(tree, c.horizon));
  }
  state.counters["cells/s"] = benchmark::Counter(static_cast<double>(cells), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateTree)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "rchaos/bounds.hpp"
#include "rchaos/chaos.hpp"
#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/ou.hpp"
#include "rchaos/sampling.hpp"

using namespace rchaos;

namespace {

void BM_WalshDecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RademacherLaw law = RademacherLaw::symmetric(n);
  CounterRng rng = CounterRng::stream(1, 1);
  HypercubeFunction f(n, 0.0);
  for (std::uint32_t m = 0; m < f.atoms(); ++m) f[m] = rng.next_unit() - 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(walsh_decompose(f, law));
  }
  state.SetItemsProcessed(state.iterations() * f.atoms());
}
BENCHMARK(BM_WalshDecompose)->Arg(10)->Arg(14)->Arg(18);

void BM_Contract(benchmark::State& state) {
  CounterRng rng = CounterRng::stream(2, 2);
  const Kernel f = random_sparse_kernel(3, 30, static_cast<int>(state.range(0)), rng);
  const Kernel g = random_sparse_kernel(3, 30, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(contract(f, g, 1));
  }
}
BENCHMARK(BM_Contract)->Arg(10)->Arg(40);

void BM_SymTensorOffdiagNorm(benchmark::State& state) {
  CounterRng rng = CounterRng::stream(3, 3);
  const Kernel f = random_sparse_kernel(3, 30, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_tensor_offdiag_norm_sq(f, f));
  }
}
BENCHMARK(BM_SymTensorOffdiagNorm)->Arg(20)->Arg(60);

void BM_SampleQ(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Kernel f = make_counterexample_kernel(2, n);
  const SamplerSpec spec = SamplerSpec::rademacher(RademacherLaw::symmetric(n), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_Q(f, spec, 1000, 1));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleQ)->Arg(100)->Arg(1000);

void BM_MehlerPt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RademacherLaw law = RademacherLaw::symmetric(n);
  const HypercubeFunction f =
      HypercubeFunction::from_kernel(make_counterexample_kernel(2, n), law);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mehler_pt(f, 0.3, law));
  }
}
BENCHMARK(BM_MehlerPt)->Arg(10)->Arg(16);

void BM_WassersteinExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RademacherLaw law = RademacherLaw::symmetric(n);
  CounterRng rng = CounterRng::stream(4, 4);
  const Kernel f = random_sparse_kernel(2, n, 6, rng, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein_exact(f, law));
  }
}
BENCHMARK(BM_WassersteinExact)->Arg(10)->Arg(14);

}  // namespace

BENCHMARK_MAIN();

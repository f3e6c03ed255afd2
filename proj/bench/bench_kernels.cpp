// Reference per-pattern recursion vs the blocked kernel, serial and OpenMP.

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fent/kernels.hpp"
#include "fent/system_io.hpp"

namespace {

using namespace fent;

const char* kInner = R"(rank 2
system markov
  alphabet x y z
  stationary 1/2 1/4 1/4
  transition a
    1/2 1/4 1/4
    1/2 0 1/2
    1/2 1/2 0
  transition A
    1/2 1/4 1/4
    1/2 0 1/2
    1/2 1/2 0
  transition b
    1/2 1/2 0
    0 0 1
    1 0 0
  transition B
    1/2 0 1/2
    1 0 0
    0 1 0
end
)";

// Observed sites: B_2 (2^17 patterns) plus enough of B_3 to reach 2^20.
TreeModel model(int extra) {
  const System s = parse_system(kInner);
  const auto& m = std::get<MarkovSpec>(s.spec.kind);
  const auto B = ball(2, 3);
  WordSet support(B->elements().begin(), B->elements().begin() + 17 + extra);
  return tree_model(m, {0, 1, 1}, 2, support);
}

void BM_reference(benchmark::State& state) {
  const TreeModel m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference_entropy(m).entropy);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.pattern_count()));
}

void BM_blocked_serial(benchmark::State& state) {
  const TreeModel m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stream_entropy(m, Execution::serial).entropy);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.pattern_count()));
}

void BM_blocked_parallel(benchmark::State& state) {
  const TreeModel m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stream_entropy(m, Execution::parallel).entropy);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.pattern_count()));
#ifdef _OPENMP
  state.counters["threads"] = omp_get_max_threads();
#endif
}

}  // namespace

BENCHMARK(BM_reference)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_blocked_serial)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_blocked_parallel)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "gccp/kernels.hpp"
#include "gccp/text.hpp"
#include "synthetic.hpp"

namespace {

using namespace gccp;

template <auto Kernel>
void bm_affinity(benchmark::State& state)
{
    auto e = synthetic::embeddings(1, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(e, 0.1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void bm_laplacian_apply(benchmark::State& state)
{
    auto n = static_cast<std::size_t>(state.range(0));
    auto a = kernels::serial::affinity(synthetic::embeddings(2, n, 300, 6), 0.1);
    std::vector<double> w;
    for (double d : a.degrees()) {
        w.push_back(d > 0.0 ? 1.0 / std::sqrt(d) : 0.0);
    }
    std::vector<double> x(n, 1.0), y(n);
    for (auto _ : state) {
        Kernel(a, w, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}

template <auto Kernel>
void bm_bm25(benchmark::State& state)
{
    Bm25Index index(synthetic::corpus(3, static_cast<std::size_t>(state.range(0))));
    auto terms = tokenize("w0 w3 w7 w12 w40");
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(terms, index.docs(), index.stats(), {}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bm_affinity<kernels::serial::affinity>)->Name("affinity/serial")->Arg(500)->Arg(2000)->UseRealTime();
BENCHMARK(bm_affinity<kernels::parallel::affinity>)->Name("affinity/parallel")->Arg(500)->Arg(2000)->UseRealTime();
BENCHMARK(bm_laplacian_apply<kernels::serial::normalized_laplacian_apply>)
    ->Name("laplacian_apply/serial")
    ->Arg(1000)
    ->Arg(5000)
    ->UseRealTime();
BENCHMARK(bm_laplacian_apply<kernels::parallel::normalized_laplacian_apply>)
    ->Name("laplacian_apply/parallel")
    ->Arg(1000)
    ->Arg(5000)
    ->UseRealTime();
BENCHMARK(bm_bm25<kernels::serial::bm25_scores>)->Name("bm25/serial")->Arg(5000)->Arg(20000)->UseRealTime();
BENCHMARK(bm_bm25<kernels::parallel::bm25_scores>)->Name("bm25/parallel")->Arg(5000)->Arg(20000)->UseRealTime();

BENCHMARK_MAIN();

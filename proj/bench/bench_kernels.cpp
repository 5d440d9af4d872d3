// Serial reference vs OpenMP kernels on an N = 9 chain (dim 1024).

#include <random>

#include <benchmark/benchmark.h>

#include "nzam/kernels.hpp"
#include "nzam/lattice.hpp"
#include "nzam/linalg.hpp"

using namespace nzam;

namespace {

struct Fixture {
    SpaceLayout layout;
    Mat x, op;
    explicit Fixture(int n_env) : layout(SpaceLayout::chain(n_env)) {
        std::mt19937_64 rng(1);
        x = random_hermitian(layout.total_dim(), rng);
        op = random_hermitian(4, rng);
    }
};

void BM_local_left_serial(benchmark::State& st) {
    const Fixture f(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::apply_local_left(f.op, f.layout, 3, 2, f.x));
}

void BM_local_left_omp(benchmark::State& st) {
    const Fixture f(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::apply_local_left(f.op, f.layout, 3, 2, f.x));
}

void BM_partial_trace_serial(benchmark::State& st) {
    const Fixture f(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::partial_trace(f.x, f.layout, {0, 1}));
}

void BM_partial_trace_omp(benchmark::State& st) {
    const Fixture f(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::partial_trace(f.x, f.layout, {0, 1}));
}

void BM_liouvillian(benchmark::State& st) {
    ChainSpec s;
    s.n_env = static_cast<int>(st.range(0));
    const auto m = build_chain(s);
    const Fixture f(s.n_env);
    kernels::set_num_threads(static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(liouvillian(m, 0.3, 0, m.num_bonds(), f.x, true));
    kernels::set_num_threads(0);
}

} // namespace

BENCHMARK(BM_local_left_serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_local_left_omp)->Arg(6)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_partial_trace_serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_partial_trace_omp)->Arg(6)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_liouvillian)->Args({9, 1})->Args({9, 2})->Args({9, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

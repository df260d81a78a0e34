// Kernel timings: serial vs OpenMP classical product, deterministic and
// randomized recursion, and rescaling, in double and single precision.

#include <benchmark/benchmark.h>

#include "randbc/matgen.hpp"
#include "randbc/multiply.hpp"
#include "randbc/randomize.hpp"
#include "randbc/rescale.hpp"

namespace {

using namespace randbc;

template <class T>
MatrixPair<T> inputs(std::size_t n, const ScalarMode& mode) {
    return generate_in<T>(MatrixSpec{MatrixKind::gaussian, n, 1, 0}, mode);
}

template <class T>
ScalarMode mode_of() {
    return std::is_same_v<T, float> ? ScalarMode::f32() : ScalarMode::f64();
}

template <class T>
void BM_standard_reference(benchmark::State& state) {
    const ScalarMode mode = mode_of<T>();
    const auto in = inputs<T>(static_cast<std::size_t>(state.range(0)), mode);
    for (auto _ : state) benchmark::DoNotOptimize(reference::standard_multiply(in.a, in.b, mode));
}

template <class T>
void BM_standard_parallel(benchmark::State& state) {
    const ScalarMode mode = mode_of<T>();
    const auto in = inputs<T>(static_cast<std::size_t>(state.range(0)), mode);
    for (auto _ : state) benchmark::DoNotOptimize(standard_multiply(in.a, in.b, mode));
}

template <class T>
void BM_recursive(benchmark::State& state) {
    const ScalarMode mode = mode_of<T>();
    const auto in = inputs<T>(320, mode);
    const auto q = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(recursive_apply(strassen_formula(), in.a, in.b, q, mode));
}

template <class T>
void BM_randomized(benchmark::State& state) {
    const ScalarMode mode = mode_of<T>();
    const auto in = inputs<T>(320, mode);
    const auto q = static_cast<std::size_t>(state.range(0));
    const RecursivePlan plan = draw_recursive_plan(2, q, 1, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(recursive_randomized_apply(strassen_formula(), plan, in.a, in.b, mode));
}

template <class T>
void BM_rescaled(benchmark::State& state) {
    const ScalarMode mode = mode_of<T>();
    const auto in = inputs<T>(320, mode);
    const auto q = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(rescaled_multiply(strassen_formula(), in.a, in.b, q, default_schedule(), mode));
}

BENCHMARK(BM_standard_reference<double>)->Arg(80)->Arg(320)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_standard_parallel<double>)->Arg(80)->Arg(320)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_standard_reference<float>)->Arg(320)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_standard_parallel<float>)->Arg(320)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_recursive<float>)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_randomized<float>)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rescaled<float>)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_randomized<double>)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "bicmcap/awgn_pam.hpp"
#include "bicmcap/bacm.hpp"
#include "bicmcap/baseline.hpp"
#include "bicmcap/blahut_arimoto.hpp"

namespace {

using namespace bicmcap;

Dmc pam_channel(int m, double snr_db) {
    const SnrTarget t = SnrTarget::from_db(snr_db);
    return discretize_awgn(build_constellation(m, uniform_gamma(m, t.linear)), {200, 6.0});
}

void BM_BacmSolve(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const Dmc c = pam_channel(m, 5.0 + 6.0 * (m - 1));
    const Constellation con =
        build_constellation(m, uniform_gamma(m, SnrTarget::from_db(5.0 + 6.0 * (m - 1)).linear));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bacm_solve(c, 0.02, &con.costs));
    }
}
BENCHMARK(BM_BacmSolve)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

void BM_SurrogateDerivative(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const Dmc c = pam_channel(m, 5.0 + 6.0 * (m - 1));
    BitSurrogate s(c, uniform_bits(m), 0, 0.0, nullptr);
    s.set_expansion(0.4);
    double p0 = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.derivative(p0));
        p0 = p0 < 0.7 ? p0 + 1e-4 : 0.3;
    }
}
BENCHMARK(BM_SurrogateDerivative)->DenseRange(2, 6);

void BM_BlahutArimoto(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const Dmc c = pam_channel(m, 5.0 + 6.0 * (m - 1));
    BaOptions o;
    o.tol = 1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(blahut_arimoto(c, nullptr, 0.0, o));
    }
}
BENCHMARK(BM_BlahutArimoto)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveM2(benchmark::State& state) {
    const Dmc c = pam_channel(2, 8.0);
    GridSpec grid;
    grid.step = 1e-2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exhaustive_bicm(c, grid));
    }
}
BENCHMARK(BM_ExhaustiveM2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

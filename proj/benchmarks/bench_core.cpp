#include <benchmark/benchmark.h>

#include "dar/design.hpp"
#include "dar/forecast.hpp"
#include "dar/reservoir.hpp"
#include "dar/signals.hpp"

using namespace dar;

namespace {

TimeSeries lorenz_input(std::size_t steps) { return standardize(center(gen_lorenz({1, 1, 1}, 0.01, steps).channel(0))); }

ReservoirParams reservoir(Eigen::Index n) {
    RngStream rng(1);
    ReservoirParams p;
    p.A = make_input_matrix(n, 1, rng, 0.05);
    p.B = haar_orthogonal(n, rng);
    return p;
}

void BM_Polar(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    RngStream rng(2);
    const Matrix m = gaussian_matrix(n, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(polar_factor(m));
}
BENCHMARK(BM_Polar)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Haar(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    RngStream rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(haar_orthogonal(n, rng));
}
BENCHMARK(BM_Haar)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Drive(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const auto p = reservoir(n);
    const auto u = lorenz_input(13000);
    for (auto _ : state) benchmark::DoNotOptimize(drive(p, u.values, Vector::Zero(n)));
}
BENCHMARK(BM_Drive)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Design(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const auto p = reservoir(n);
    const auto u = lorenz_input(9800);
    const Matrix v = forcing_increments(p, u.values);
    for (auto _ : state) benchmark::DoNotOptimize(design_connectivity(v, {}, RngStream(4)));
}
BENCHMARK(BM_Design)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_HausdorffGrid(benchmark::State& state) {
    const auto e = delay_embed(lorenz_input(2010).values.col(0), 2, 10);
    const Matrix b = e.array() + 0.05;
    for (auto _ : state) benchmark::DoNotOptimize(hausdorff(e, b));
}
BENCHMARK(BM_HausdorffGrid)->Unit(benchmark::kMillisecond);

void BM_HausdorffBrute(benchmark::State& state) {
    const auto e = delay_embed(lorenz_input(2010).values.col(0), 2, 10);
    const Matrix b = e.array() + 0.05;
    for (auto _ : state) benchmark::DoNotOptimize(hausdorff_brute(e, b));
}
BENCHMARK(BM_HausdorffBrute)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

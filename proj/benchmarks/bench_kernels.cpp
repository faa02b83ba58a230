#include <benchmark/benchmark.h>

#include "g2kern/invariants.hpp"
#include "g2kern/psd.hpp"

using namespace g2kern;

namespace {

const G2Point kU(0.52, 0.04);
const G2Point kV(Complex(0.31, 0.12), Complex(0.02, -0.05));

void BergmanRaw(benchmark::State& state)
{
    const double lambda = 2.5;
    for (auto _ : state) {
        auto k = eval_kernel(KernelSpec::bergman(lambda), kU, kV);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(BergmanRaw);

void BergmanSeries(benchmark::State& state)
{
    const G2Point royal(0.8, 0.16);
    for (auto _ : state) {
        auto k = eval_kernel(KernelSpec::bergman(2.5), royal, kV);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(BergmanSeries);

void FractionalPower(benchmark::State& state)
{
    const KernelSpec spec = KernelSpec::power(KernelSpec::bergman(2.0), 1.5);
    for (auto _ : state) {
        auto k = eval_kernel(spec, kU, kV);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(FractionalPower);

void CurvatureNumeric(benchmark::State& state)
{
    const KernelSpec spec = KernelSpec::bergman(2.0);
    for (auto _ : state) {
        auto k = curvature_numeric(spec, kU);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(CurvatureNumeric);

void DetCurvatureKernel(benchmark::State& state)
{
    const KernelSpec spec = KernelSpec::det_curvature(2.0, 1.0);
    for (auto _ : state) {
        auto k = eval_kernel(spec, kU, kV);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(DetCurvatureKernel);

void FundamentalDecompose(benchmark::State& state)
{
    for (auto _ : state) {
        auto fd = to_fundamental(kV);
        benchmark::DoNotOptimize(fd);
    }
}
BENCHMARK(FundamentalDecompose);

void GramEigenvalues(benchmark::State& state)
{
    const auto sample = SampleSet::random(static_cast<int>(state.range(0)), 7, 0.75);
    const KernelSpec spec = KernelSpec::bergman(2.0);
    for (auto _ : state) {
        auto rep = psd_check(gram(spec, sample));
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK(GramEigenvalues)->Arg(8)->Arg(16)->Arg(32);

void AuditTable(benchmark::State& state)
{
    for (auto _ : state) {
        auto rows = audit(1.0, {0.0, 0.2, 0.4, 0.6, 0.8});
        benchmark::DoNotOptimize(rows);
    }
}
BENCHMARK(AuditTable);

} // namespace

BENCHMARK_MAIN();

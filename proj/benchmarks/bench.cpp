#include <benchmark/benchmark.h>

#include "ddrec/entropy.hpp"

namespace {

ddrec::SimParams bench_params(const ddrec::Grid1D& grid, double eps) {
    ddrec::SimParams p;
    p.eps = eps;
    p.eps0 = 1.0;
    p.potentials = ddrec::make_potentials(grid, ddrec::PotentialFamily::CosineWell, 1.0, 0.5);
    return p;
}

ddrec::State bench_state(const ddrec::Grid1D& grid) {
    ddrec::State st;
    st.n = ddrec::Field::from_fn(grid, [](double x) { return 1.0 + 0.5 * x; });
    st.p = ddrec::Field::from_fn(grid, [](double x) { return 1.5 - 0.5 * x; });
    st.ntr = ddrec::Field(grid, 0.4);
    return st;
}

void BM_step(benchmark::State& bs) {
    const auto grid = ddrec::build_grid(static_cast<int>(bs.range(0)));
    const auto params = bench_params(grid, 0.1);
    const auto st = bench_state(grid);
    ddrec::StepperConfig cfg;
    for (auto _ : bs) benchmark::DoNotOptimize(ddrec::step(st, params, cfg));
}
BENCHMARK(BM_step)->Arg(200)->Arg(1000);

void BM_entropy_production(benchmark::State& bs) {
    const auto grid = ddrec::build_grid(static_cast<int>(bs.range(0)));
    const auto params = bench_params(grid, 0.1);
    const auto st = bench_state(grid);
    for (auto _ : bs) benchmark::DoNotOptimize(ddrec::entropy_production(st, params));
}
BENCHMARK(BM_entropy_production)->Arg(200)->Arg(1000);

} // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "dsice/pipeline.hpp"

using namespace dsice;

namespace {

ModelConfig bench_config() {
    ModelConfig c;
    c.solver.horizon = 6;
    c.growth.horizon = 6;
    c.growth.n_zeta = 3;
    c.growth.n_chi = 1;
    c.tipping.q = 0.0;
    c.solver.degree = 2;
    c.solver.nodes.fill(3);
    c.solver.starts = 2;
    c.solver.pilot_paths = 50;
    c.solver.floor_logK = 0.12;
    c.simulate.stats_year = 2;
    c.simulate.ar_window = 6;
    return c;
}

const SolvedModel& solved() {
    static const SolvedModel m = solve_model(bench_config());
    return m;
}

void BM_MaximizeStep(benchmark::State& state) {
    const auto& m = solved();
    const ChebyshevBasis basis(m.cfg.solver.degree);
    const Fitter fitter(basis, m.cfg.solver.nodes);
    const auto kernel = state.range(0) ? Kernel::Parallel : Kernel::Serial;
    for (auto _ : state) {
        auto out = maximize_step(m.cfg, m.chain, fitter, m.table, 0, nullptr, kernel);
        benchmark::DoNotOptimize(out.values.data());
    }
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_MaximizeStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
    const auto& m = solved();
    SimulateOptions o;
    o.n_paths = 200;
    o.seed = 3;
    o.kernel = state.range(0) ? Kernel::Parallel : Kernel::Serial;
    for (auto _ : state) {
        auto ps = simulate(m.cfg, m.chain, m.table, o);
        benchmark::DoNotOptimize(ps.paths.data());
    }
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

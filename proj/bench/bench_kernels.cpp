// Serial reference vs OpenMP execution of the path kernels.

#include <benchmark/benchmark.h>

#include "bbsm/closed_form.hpp"
#include "bbsm/mc_pricer.hpp"
#include "bbsm/simulation.hpp"

namespace {

const bbsm::ModelParams kParams{1.0, 0.05, 5.0, 0.1, 1.0, 0.03, 100.0};

bbsm::Execution execution(const benchmark::State& state) {
    return state.range(1) ? bbsm::Execution::Parallel : bbsm::Execution::Serial;
}

void BM_SimulatePaths(benchmark::State& state) {
    bbsm::SimRequest req;
    req.measure = bbsm::Measure::Q1;
    req.t_end = 1.0;
    req.n_paths = static_cast<std::size_t>(state.range(0));
    req.seed = 1;
    req.execution = execution(state);
    for (auto _ : state) {
        auto ps = bbsm::simulate_paths(kParams, req);
        benchmark::DoNotOptimize(ps.terminal.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PriceQ2Bank(benchmark::State& state) {
    bbsm::McConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.seed = 2;
    cfg.execution = execution(state);
    const auto opt = bbsm::OptionSpec::call(100, 1);
    for (auto _ : state) benchmark::DoNotOptimize(bbsm::price_q2_bank(kParams, opt, cfg).price);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_QuasiIntegralForm(benchmark::State& state) {
    bbsm::McConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.n_steps = 100;
    cfg.seed = 3;
    cfg.execution = execution(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbsm::bbsm_call_quasi(kParams, 100, 1, cfg, bbsm::QuasiMode::IntegralForm).price);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void args(benchmark::internal::Benchmark* b) {
    b->ArgNames({"paths", "parallel"});
    for (long n : {1000L, 10000L, 100000L}) {
        for (long par : {0L, 1L}) b->Args({n, par});
    }
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_SimulatePaths)->Apply(args);
BENCHMARK(BM_PriceQ2Bank)->Apply(args);
BENCHMARK(BM_QuasiIntegralForm)->Apply(args);

BENCHMARK_MAIN();

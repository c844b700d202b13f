#include <benchmark/benchmark.h>

#include "wgfb/experiments.hpp"
#include "wgfb/oracle.hpp"

using namespace wgfb;

namespace {

SystemParams photons(int n, double tau) {
    SystemParams p;
    p.n_photons = n;
    p.initial = InitialState::ground_with_pulse;
    p.tau = tau;
    return p;
}

// Full run to T = 20 with tau = 2; the range argument is the step count.
void run_pulse(benchmark::State& state, int n, Contraction c) {
    const auto steps = static_cast<double>(state.range(0));
    const auto g = build_grid(20.0 / steps, 20.0, 2.0);
    const Pulse f(RectangularPulse{0.0, 2.0});
    RunOptions o;
    o.hierarchy.contraction = c;
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(photons(n, 2.0), f, g, o).population.back());
    state.SetComplexityN(state.range(0));
}

void BM_OnePhoton(benchmark::State& s) { run_pulse(s, 1, Contraction::factored); }
void BM_TwoPhotonFactored(benchmark::State& s) { run_pulse(s, 2, Contraction::factored); }
void BM_TwoPhotonDirect(benchmark::State& s) { run_pulse(s, 2, Contraction::direct); }

void BM_ThreePhoton(benchmark::State& state) {
    const auto steps = static_cast<double>(state.range(0));
    const auto g = build_grid(6.0 / steps, 6.0, 2.0);
    const Pulse f(RectangularPulse{0.0, 2.0});
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(photons(3, 2.0), f, g).population.back());
    state.SetComplexityN(state.range(0));
}

void BM_VacuumFeedback(benchmark::State& state) {
    SystemParams p;
    const auto g = build_grid(20.0 / static_cast<double>(state.range(0)), 20.0, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(p, Pulse(RectangularPulse{}), g).population.back());
    state.SetComplexityN(state.range(0));
}

void BM_OracleTwoPhoton(benchmark::State& state) {
    oracle::TimeBinOptions o;
    o.horizon = 10.0;
    o.n_bins = static_cast<std::size_t>(state.range(0));
    const Pulse f(RectangularPulse{0.0, 2.0});
    for (auto _ : state) benchmark::DoNotOptimize(oracle::brute_force_timebin(photons(2, 2.0), f, o).population.back());
    state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_VacuumFeedback)->Arg(2000)->Arg(4000)->Arg(8000)->Arg(16000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_OnePhoton)->Arg(2000)->Arg(4000)->Arg(8000)->Arg(16000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_TwoPhotonFactored)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_TwoPhotonDirect)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_ThreePhoton)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_OracleTwoPhoton)->Arg(80)->Arg(160)->Arg(320)->Arg(640)->Unit(benchmark::kMillisecond)->Complexity();

BENCHMARK_MAIN();

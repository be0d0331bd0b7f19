// Serial reference kernels against their OpenMP counterparts, plus the cost
// of one quasi-Newton step across resolutions.
#include <benchmark/benchmark.h>

#include "qpfk/kernels.hpp"
#include "qpfk/model.hpp"
#include "qpfk/solver.hpp"
#include "support.hpp"

namespace {

using namespace qpfk;

struct ComposeInput {
    Grid grid;
    std::vector<kernels::ComposeTerm> terms;
    std::vector<double> h;
    std::vector<std::vector<double>> jets;
};

ComposeInput compose_input(int n) {
    const int fine = kDealiasFactor * n;
    ComposeInput in{Grid(2, fine), test::example_force(0.01).compose_terms(), {}, {}};
    in.h = synthesize(test::random_function(2, n, 3, 1e-2, 1.0), fine);
    for (int q = 1; q <= 4; ++q) in.jets.push_back(synthesize(test::random_function(2, n, 10 + q, 1e-2, 1.0), fine));
    return in;
}

void compose(benchmark::State& state, Exec exec) {
    const ComposeInput in = compose_input(static_cast<int>(state.range(0)));
    std::vector<double> out(in.h.size());
    for (auto _ : state) {
        kernels::compose_force(exec, in.grid, in.terms, in.h, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

void compose_jet(benchmark::State& state, Exec exec) {
    const ComposeInput in = compose_input(static_cast<int>(state.range(0)));
    std::vector<double> out(in.h.size());
    for (auto _ : state) {
        kernels::compose_force_jet(exec, in.grid, in.terms, in.jets, 4, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

void step(benchmark::State& state, Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const Exec saved = default_exec();
    set_default_exec(exec);
    const FrequencyData freq = test::golden_frequency(n);
    const ForceModel force = test::example_force(0.01);
    const SolverState s = make_state(test::random_function(2, n, 77, 1e-3, 1.0), 0.0, force, freq);
    const NoiseControl noise{SolveOptions{}.noise_factor, residual_scale(s, force)};
    for (auto _ : state) benchmark::DoNotOptimize(quasi_newton_step(s, force, freq, noise));
    set_default_exec(saved);
}

}  // namespace

BENCHMARK_CAPTURE(compose, serial, Exec::serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(compose, parallel, Exec::parallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(compose_jet, serial, Exec::serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(compose_jet, parallel, Exec::parallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(step, serial, Exec::serial)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(step, parallel, Exec::parallel)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

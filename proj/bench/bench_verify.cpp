#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "hflat/builders.hpp"
#include "hflat/structeq.hpp"
#include "hflat/verify.hpp"

using namespace hflat;

namespace {

const ImmersionSampler& scenario() {
    static const ImmersionSampler s = [] {
        const auto c = ScalarFunction::constant(std::sqrt(3.0));
        const auto coeffs = LegendreCoefficients::from_functions(3, c, c, c, {ScalarFunction::sinusoid(0.2, 1.0)});
        const auto b = ScalarFunction({1.0}, {{0.1, 1.0, std::numbers::pi / 2}}).as_jet_fn();
        const Box box({0.0, -0.2, -0.2}, {2.0 * std::numbers::pi, 0.2, 0.2});
        return build_twisted_legendre({coeffs, b, standard_initial_frame(3)}, box);
    }();
    return s;
}

void BM_Verify(benchmark::State& state, Execution exec) {
    VerifyOptions o;
    o.points = static_cast<std::size_t>(state.range(0));
    o.execution = exec;
    for (auto _ : state) benchmark::DoNotOptimize(verify_immersion(scenario(), o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Structeq(benchmark::State& state, Execution exec) {
    const double r3 = std::sqrt(3.0);
    const TwistProfile p{ScalarFunction::constant(1.0), {ScalarFunction::constant(1.0), ScalarFunction::constant(0.3)},
                         {ScalarFunction::constant(r3), ScalarFunction::constant(r3), ScalarFunction::constant(r3)}};
    const Patch patch = twisted_patch(p, Box({0.0, -0.2, -0.2}, {1.0, 0.2, 0.2}));
    const SigmaSpec sigma = SigmaSpec::canonical(p);
    StructeqOptions o;
    o.points = static_cast<std::size_t>(state.range(0));
    o.execution = exec;
    for (auto _ : state) benchmark::DoNotOptimize(verify_structure(sigma, patch, o, &p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Verify, serial, Execution::Serial)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_Verify, parallel, Execution::Parallel)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_Structeq, serial, Execution::Serial)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_Structeq, parallel, Execution::Parallel)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

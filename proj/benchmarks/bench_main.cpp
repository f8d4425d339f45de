#include <benchmark/benchmark.h>

#include "hardy/bellman.hpp"
#include "hardy/control.hpp"
#include "hardy/probe.hpp"
#include "hardy/rng.hpp"
#include "hardy/tree.hpp"

using namespace hardy;

namespace {

TreeInstance makeInstance(int depth, const Exponent& e) {
    const std::vector<double> lambda = makeLambdaFamily(LambdaFamily::Random, depth, 1.5, 17);
    const std::vector<double> alpha = saturatingAlpha(depth, lambda, e);
    std::vector<double> phi(lambda.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        Stream st(23, k);
        phi[k] = st.logUniform(0.5, 2.0);
    }
    return TreeInstance::build(depth, alpha, lambda, phi);
}

void BM_ComputeAggregates(benchmark::State& state) {
    const Exponent e(2.0);
    const TreeInstance inst = makeInstance(static_cast<int>(state.range(0)), e);
    for (auto _ : state) {
        NodeAggregates agg = computeAggregates(inst, e);
        benchmark::DoNotOptimize(agg.A.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(inst.nodeCount()));
}
BENCHMARK(BM_ComputeAggregates)->Arg(6)->Arg(10)->Arg(14);

void BM_TelescopingReplay(benchmark::State& state) {
    const Exponent e(2.0);
    const TreeInstance inst = makeInstance(static_cast<int>(state.range(0)), e);
    for (auto _ : state) {
        TelescopeReport rep = telescopingReplay(inst, e);
        benchmark::DoNotOptimize(rep.minMargin);
    }
}
BENCHMARK(BM_TelescopingReplay)->Arg(6)->Arg(10);

void BM_BellmanValue(benchmark::State& state) {
    const Exponent e(3.0);
    const BellmanPoint x{1.3, 0.9, 0.4, 1.1};
    for (auto _ : state) benchmark::DoNotOptimize(bellmanValueUnchecked(x, e));
}
BENCHMARK(BM_BellmanValue);

void BM_SimulatePath(benchmark::State& state) {
    const Exponent e(2.0);
    const ControlPolicy policy = ControlPolicy::diffuseThenDrift(0.25);
    const double h = 1.0 / static_cast<double>(state.range(0));
    std::uint64_t path = 0;
    for (auto _ : state) {
        PathSample s = simulatePath({1, 1, 0.5, 1}, policy, e, h, 2.0, 5, path++);
        benchmark::DoNotOptimize(s.totalJ);
    }
}
BENCHMARK(BM_SimulatePath)->Arg(100)->Arg(1000);

void BM_MaximizeRatio(benchmark::State& state) {
    const Exponent e(2.0);
    const TreeInstance inst = makeInstance(static_cast<int>(state.range(0)), e);
    MaximizeOptions opts;
    opts.iters = 200;
    opts.multistarts = 1;
    for (auto _ : state) {
        MaximizeResult res = maximizeRatio(inst, e, opts, 3);
        benchmark::DoNotOptimize(res.ratio);
    }
}
BENCHMARK(BM_MaximizeRatio)->Arg(4)->Arg(8);

} // namespace

BENCHMARK_MAIN();

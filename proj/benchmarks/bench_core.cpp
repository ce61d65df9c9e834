#include <benchmark/benchmark.h>

#include "tilepress/ldp.hpp"
#include "tilepress/subsystem.hpp"
#include "tilepress/thermo.hpp"

using namespace tilepress;

namespace {

Potential bench_potential() {
    std::array<double, Potential::basis_size> c{};
    c[4] = 0.3;
    return Potential(c, 1.0);
}

void BM_enumerate_tiles(benchmark::State& state) {
    const MapSpec spec(3);
    const Subsystem sub = Subsystem::carpet(spec);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        std::int64_t count = 0;
        for_each_tile(spec, sub, n, [&](const TileWalker&) { ++count; });
        benchmark::DoNotOptimize(count);
    }
    state.SetItemsProcessed(state.iterations() * count_tiles(spec, sub, n));
}
BENCHMARK(BM_enumerate_tiles)->Arg(4)->Arg(6);

void BM_split_apply(benchmark::State& state) {
    const MapSpec spec(3);
    const Subsystem sub = Subsystem::carpet(spec);
    const Potential pot = bench_potential();
    const int G = static_cast<int>(state.range(0));
    const SplitOperator op(spec, sub, pot, G);
    SplitFunction u = SplitFunction::constant(G, 1.0);
    for (auto _ : state) {
        u = op.apply(u);
        const double m = u.mean_value();
        for (auto& face : u.values)
            for (auto& v : face) v /= m;
        benchmark::DoNotOptimize(u.values[0][0]);
    }
}
BENCHMARK(BM_split_apply)->Arg(129)->Arg(257);

void BM_partition_sum(benchmark::State& state) {
    const MapSpec spec(3);
    const Subsystem sub = Subsystem::carpet(spec);
    const Potential pot = bench_potential();
    const int n = static_cast<int>(state.range(0));
    const int refine = static_cast<int>(state.range(1));
    for (auto _ : state) {
        const PartitionSum z = partition_sum(spec, sub, pot, n, refine, 1);
        benchmark::DoNotOptimize(z.upper_sum);
    }
}
BENCHMARK(BM_partition_sum)->Args({4, 0})->Args({4, 2})->Args({6, 1});

void BM_pair_scan(benchmark::State& state) {
    const MapSpec spec(3);
    const Potential pot = bench_potential();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const TileScan scan = scan_full_map(spec, pot, n, 1, 1);
        benchmark::DoNotOptimize(scan.s_center.back());
    }
}
BENCHMARK(BM_pair_scan)->Arg(4)->Arg(5);

} // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "omerg/exact_sum.hpp"
#include "omerg/sieve.hpp"
#include "omerg/sweeping_out.hpp"
#include "omerg/weights.hpp"

using namespace omerg;

namespace {

void BM_SieveBlock(benchmark::State& state) {
    const std::uint64_t lo = std::uint64_t{1} << 32;
    const auto size = static_cast<std::uint64_t>(state.range(0));
    const auto primes = PrimeTable::covering(lo + size);
    for (auto _ : state) {
        auto block = sieve_block(lo, lo + size, primes);
        benchmark::DoNotOptimize(block.omega_big.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * size));
}
BENCHMARK(BM_SieveBlock)->RangeMultiplier(4)->Range(1 << 14, 1 << 22);

void BM_Summarize(benchmark::State& state) {
    const std::uint64_t lo = 1000000;
    const std::uint64_t size = 1 << 20;
    const auto block = sieve_block(lo, lo + size, PrimeTable::covering(lo + size));
    for (auto _ : state) {
        auto sums = WeightAccumulator::summarize(block);
        benchmark::DoNotOptimize(sums.pi.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * size));
}
BENCHMARK(BM_Summarize);

void BM_StreamStats(benchmark::State& state) {
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        SieveConfig config{10000000, 1 << 20, {100000, 1000000, 10000000}};
        WeightAccumulator acc;
        BlockConsumer* consumers[] = {&acc};
        stream_stats(config, consumers, workers);
        benchmark::DoNotOptimize(acc.tables().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 10000000));
}
BENCHMARK(BM_StreamStats)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

std::vector<double> terms(std::size_t n) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(1e-9, 1.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = d(rng);
    return v;
}

void BM_ExactSum(benchmark::State& state) {
    const auto v = terms(1 << 16);
    for (auto _ : state) {
        ExactSum s;
        for (double x : v)
            s.add(x);
        benchmark::DoNotOptimize(s.value());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * v.size()));
}
BENCHMARK(BM_ExactSum);

void BM_CompensatedSum(benchmark::State& state) {
    const auto v = terms(1 << 16);
    for (auto _ : state) {
        CompensatedSum s;
        for (double x : v)
            s.add(x);
        benchmark::DoNotOptimize(s.value());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * v.size()));
}
BENCHMARK(BM_CompensatedSum);

void BM_SweepoutLog2(benchmark::State& state) {
    const auto b = IntegerSequence::floor_log2();
    for (auto _ : state) {
        auto cert = interval_condition_build(b, SweepParams{});
        periodic_witness(cert, b);
        benchmark::DoNotOptimize(cert.verdict());
    }
}
BENCHMARK(BM_SweepoutLog2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

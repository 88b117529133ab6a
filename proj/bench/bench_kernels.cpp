#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "capdiff/kernels.hpp"

using namespace capdiff;
using namespace capdiff::kernels;

namespace {

const TransitionMatrix kT = TransitionMatrix::from_diagonal(0.7, 0.4);
constexpr std::array<double, 2> kStart{1, 0};

void BM_character_serial(benchmark::State& state) {
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(transfer_character_serial(kStart, kT, k));
}

void BM_character_chunked(benchmark::State& state) {
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(transfer_character_chunked(kStart, kT, k));
}

void BM_character_doubling(benchmark::State& state) {
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(transfer_character_doubling(kStart, kT, k));
}

// all orders 1..n, one at a time vs the batch
void BM_characters_loop(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        for (std::uint64_t k = 1; k <= n; ++k)
            benchmark::DoNotOptimize(transfer_character_doubling(kStart, kT, k));
}

void BM_characters_batch(benchmark::State& state) {
    std::vector<std::uint64_t> orders(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < orders.size(); ++i) orders[i] = i + 1;
    for (auto _ : state) benchmark::DoNotOptimize(transfer_character_batch(kStart, kT, orders));
}

std::vector<std::uint8_t> random_bits(std::size_t n) {
    std::mt19937_64 gen(1);
    std::vector<std::uint8_t> s(n);
    for (auto& b : s) b = static_cast<std::uint8_t>(gen() & 1);
    return s;
}

void BM_mask_parity_serial(benchmark::State& state) {
    const auto s = random_bits(1 << 20);
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mask_parity_serial(s, k));
}

void BM_mask_parity_omp(benchmark::State& state) {
    const auto s = random_bits(1 << 20);
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mask_parity_omp(s, k));
}

const ChainModel kModel{kT, Distribution::make(0.5, 0.5)};

void BM_mc_serial(benchmark::State& state) {
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mc_count_serial(kModel, 0, k, 20000, 7));
}

void BM_mc_omp(benchmark::State& state) {
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mc_count_omp(kModel, 0, k, 20000, 7));
}

}  // namespace

BENCHMARK(BM_character_serial)->RangeMultiplier(16)->Range(1 << 8, 1 << 20);
BENCHMARK(BM_character_chunked)->RangeMultiplier(16)->Range(1 << 8, 1 << 20);
BENCHMARK(BM_character_doubling)->RangeMultiplier(16)->Range(1 << 8, 1 << 20);
BENCHMARK(BM_characters_loop)->Arg(1 << 14);
BENCHMARK(BM_characters_batch)->Arg(1 << 14);
BENCHMARK(BM_mask_parity_serial)->Arg(63)->Arg(1023);
BENCHMARK(BM_mask_parity_omp)->Arg(63)->Arg(1023);
BENCHMARK(BM_mc_serial)->Arg(31)->Arg(255);
BENCHMARK(BM_mc_omp)->Arg(31)->Arg(255);

BENCHMARK_MAIN();

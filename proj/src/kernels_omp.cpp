#include <algorithm>

#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"
#include "capdiff/kernels.hpp"
#include "kernels_detail.hpp"

namespace capdiff::kernels {

namespace {
// Fixed so the association order (and the rounding) is independent of the thread count.
constexpr std::uint64_t kChunkSteps = std::uint64_t{1} << 14;
}  // namespace

ScaledReal transfer_character_chunked(const std::array<double, 2>& start, const TransitionMatrix& t,
                                      std::uint64_t k) {
    const std::uint64_t chunks = (k + kChunkSteps - 1) / kChunkSteps;
    std::vector<ScaledMat2> products(static_cast<std::size_t>(chunks));
    const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < count; ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunkSteps;
        const std::uint64_t end = std::min(k, begin + kChunkSteps);
        products[static_cast<std::size_t>(c)] = detail::chunk_product(t, k, begin, end);
    }
    return detail::finish_chunks(start, products);
}

std::vector<ScaledReal> transfer_character_batch(const std::array<double, 2>& start,
                                                 const TransitionMatrix& t,
                                                 std::span<const std::uint64_t> orders) {
    return detail::doubling_batch(start, t, orders);
}

std::vector<std::uint8_t> mask_parity_omp(std::span<const std::uint8_t> s, std::uint64_t k) {
    if (s.size() < k + 1) throw InvalidArgument("mask_parity: sequence shorter than k + 1");
    const std::size_t out_len = s.size() - static_cast<std::size_t>(k);
    std::vector<std::uint8_t> out(out_len);
    const auto count = static_cast<std::int64_t>(out_len);
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < count; ++n)
        out[static_cast<std::size_t>(n)] =
            static_cast<std::uint8_t>(detail::window_parity(s, static_cast<std::uint64_t>(n), k));
    return out;
}

std::uint64_t mc_count_omp(const ChainModel& model, std::uint64_t n, std::uint64_t k,
                           std::uint64_t trials, std::uint64_t seed) {
    std::uint64_t ones = 0;
    const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel reduction(+ : ones)
    {
        std::vector<std::uint8_t> path(static_cast<std::size_t>(n + k + 1));
#pragma omp for schedule(static)
        for (std::int64_t t = 0; t < count; ++t) {
            Xoshiro256 gen(derive_seed(seed, static_cast<std::uint64_t>(t)));
            sample_path_into(model, gen, path);
            ones += static_cast<std::uint64_t>(detail::window_parity(path, n, k));
        }
    }
    return ones;
}

}  // namespace capdiff::kernels

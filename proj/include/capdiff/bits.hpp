#pragma once

// Word-level helpers for binary expansions of block indices and orders.

#include <bit>
#include <cstdint>

#include "capdiff/error.hpp"

namespace capdiff::bits {

// Number of consecutive 1-bits at the low end of k.
constexpr int trailing_ones(std::uint64_t k) noexcept { return std::countr_one(k); }

constexpr int popcount(std::uint64_t k) noexcept { return std::popcount(k); }

// True when every set bit of i is also set in k (i.e. C(k, i) is odd).
constexpr bool is_submask(std::uint64_t i, std::uint64_t k) noexcept { return (i & k) == i; }

// Index p of the dyadic block 2^p <= k < 2^{p+1}; k must be positive.
constexpr int block_of(std::uint64_t k) noexcept { return std::bit_width(k) - 1; }

constexpr std::uint64_t block_begin(int p) noexcept { return std::uint64_t{1} << p; }
constexpr std::uint64_t block_end(int p) noexcept { return std::uint64_t{1} << (p + 1); }

// Calls fn(i) for every submask i of k in increasing order.
template <class Fn>
void for_each_submask(std::uint64_t k, Fn&& fn) {
    std::uint64_t i = 0;
    for (;;) {
        fn(i);
        if (i == k) break;
        i = (i - k) & k;  // next submask in increasing order
    }
}

}  // namespace capdiff::bits

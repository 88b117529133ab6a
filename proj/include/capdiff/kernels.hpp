#pragma once

// Compute kernels behind the difference engine. Each hot loop has a serial
// reference version and an OpenMP version; the two must agree (exactly for
// the integer kernels, to rounding for the transfer products). Results never
// depend on the number of threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "capdiff/chain.hpp"

namespace capdiff::kernels {

// mantissa * 2^exponent; keeps characters that underflow a double.
struct ScaledReal {
    double mantissa = 0.0;
    std::int64_t exponent = 0;

    double to_double() const {
        return std::ldexp(mantissa, static_cast<int>(std::clamp<std::int64_t>(exponent, -4096, 4096)));
    }
    double log2_abs() const {
        if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log2(std::fabs(mantissa)) + static_cast<double>(exponent);
    }
};

// Row-major 2x2 matrix carrying a power-of-two scale.
struct ScaledMat2 {
    std::array<double, 4> a{1.0, 0.0, 0.0, 1.0};
    std::int64_t exponent = 0;

    void normalize();
    friend ScaledMat2 operator*(const ScaledMat2& x, const ScaledMat2& y);
};

ScaledMat2 to_matrix(const TransitionMatrix& t);

// The character E[(-1)^{x_0 b_0 + ... + x_k b_k}] of a path x_0..x_k with
// x_0 ~ start, b_i = [i is a submask of k]. This is
//   start * D_{b_0} * T * D_{b_1} * T * ... * T * D_{b_k} * (1, 1)^T
// with D_b = diag(1, (-1)^b).

// Left-to-right O(k) product: the reference.
ScaledReal transfer_character_serial(const std::array<double, 2>& start,
                                     const TransitionMatrix& t, std::uint64_t k);
// Same product split into fixed-size chunks multiplied in parallel.
ScaledReal transfer_character_chunked(const std::array<double, 2>& start,
                                      const TransitionMatrix& t, std::uint64_t k);
// Reassociated product: with k = 2^j + r, r < 2^j, the factor for k is
// P(r) * T^{2^j - r} * P(r), which needs O(popcount(k) log k) products.
ScaledReal transfer_character_doubling(const std::array<double, 2>& start,
                                       const TransitionMatrix& t, std::uint64_t k);
// transfer_character_doubling for each order, in parallel over orders.
std::vector<ScaledReal> transfer_character_batch(const std::array<double, 2>& start,
                                                 const TransitionMatrix& t,
                                                 std::span<const std::uint64_t> orders);

// out[n] = parity of s[n + i] over the submasks i of k, for
// n in [0, s.size() - k).
std::vector<std::uint8_t> mask_parity_serial(std::span<const std::uint8_t> s, std::uint64_t k);
std::vector<std::uint8_t> mask_parity_omp(std::span<const std::uint8_t> s, std::uint64_t k);

// Number of trials whose order-k difference at position n equals 1. Trial
// t draws a path of length n + k + 1 from Xoshiro256(derive_seed(seed, t)).
std::uint64_t mc_count_serial(const ChainModel& model, std::uint64_t n, std::uint64_t k,
                              std::uint64_t trials, std::uint64_t seed);
std::uint64_t mc_count_omp(const ChainModel& model, std::uint64_t n, std::uint64_t k,
                           std::uint64_t trials, std::uint64_t seed);

}  // namespace capdiff::kernels

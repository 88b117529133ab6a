#pragma once

// Pieces shared between the serial and OpenMP kernel translation units.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "capdiff/kernels.hpp"

namespace capdiff::kernels::detail {

// Parallel over orders; lives with the doubling kernel to share its power table.
std::vector<ScaledReal> doubling_batch(const std::array<double, 2>& start, const TransitionMatrix& t,
                                       std::span<const std::uint64_t> orders);
// Product of D_{b_i} T over positions i in [begin, end).
ScaledMat2 chunk_product(const TransitionMatrix& t, std::uint64_t k, std::uint64_t begin,
                         std::uint64_t end);
ScaledReal finish_chunks(const std::array<double, 2>& start, std::span<const ScaledMat2> chunks);
int window_parity(std::span<const std::uint8_t> path, std::uint64_t n, std::uint64_t k);

}  // namespace capdiff::kernels::detail

#pragma once

// Brute-force references. Nothing here calls into the fast paths it is used
// to check: paths are enumerated, Pascal rows are built by addition and
// trailing ones are counted by repeated division.

#include <cstdint>
#include <functional>
#include <vector>

#include "capdiff/chain.hpp"
#include "capdiff/setspec.hpp"

namespace capdiff::oracle {

inline constexpr int kMaxBruteOrder = 20;
inline constexpr std::uint64_t kMaxBruteTime = 32;
inline constexpr std::uint64_t kMaxPascalRow = 4096;
inline constexpr int kMaxBruteBlock = 16;

// P(xi_n^{(k)} = 1) summed over all 2^{k+1} windows (x_n, ..., x_{n+k}),
// each apex computed by the literal |a - b| recurrence.
double brute_joint_prob(const ChainModel& model, std::uint64_t n, int k);

struct ParityRow {
    std::uint64_t k = 0;
    std::vector<std::uint8_t> parities;  // C(k, i) mod 2, i = 0..k

    // Length of the leading run of odd entries.
    std::uint64_t leading_odd() const;
    std::vector<std::uint64_t> support() const;
};

ParityRow brute_pascal_row_parity(std::uint64_t k);
// Calls fn for rows 0..k_max in order, building each from the previous one.
void for_each_pascal_parity_row(std::uint64_t k_max, const std::function<void(const ParityRow&)>& fn);

int brute_trailing_ones(std::uint64_t k);
std::uint64_t brute_block_capacity(int p, int s);

// K_p filtered by the membership predicate; p <= 24.
std::vector<std::uint64_t> brute_members_in_block(const IndexSetSpec& spec, int p);
// |E cap [1, m]| by testing every k; m <= 2^26.
std::uint64_t brute_count_up_to(const IndexSetSpec& spec, std::uint64_t m);

}  // namespace capdiff::oracle

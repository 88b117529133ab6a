#pragma once

// Higher-order absolute differences of binary sequences and the exact law
// of xi_n^{(k)} for a two-state chain.
//
// On bits |a - b| = a xor b, so xi_n^{(k)} is the parity of xi over
// {n + i : C(k, i) odd}, and by Lucas' theorem C(k, i) is odd exactly when
// i is a submask of k. P(xi_n^{(k)} = 1) = (1 - E[(-1)^parity]) / 2.

#include <cstdint>
#include <span>
#include <vector>

#include "capdiff/binary_sequence.hpp"
#include "capdiff/chain.hpp"

namespace capdiff {

inline constexpr std::uint64_t kMaxOrder = std::uint64_t{1} << 26;
inline constexpr int kMaxMaskPopcount = 24;

// out[n] = |s[n+1] - s[n]|; requires s.size() >= 2.
BinarySequence difference_once(const BinarySequence& s);
// k-fold iteration of difference_once; requires s.size() >= k + 1.
BinarySequence difference_k(const BinarySequence& s, std::uint64_t k);
// Same values from the parity mask, without building the triangle.
BinarySequence difference_k_by_mask(const BinarySequence& s, std::uint64_t k);

// Offsets i in [0, k] with C(k, i) odd.
class SierpinskiMask {
public:
    std::uint64_t order() const { return order_; }
    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    std::size_t size() const { return offsets_.size(); }
    bool contains(std::uint64_t i) const { return i <= order_ && (i & order_) == i; }

private:
    friend SierpinskiMask sierpinski_mask(std::uint64_t k);
    std::uint64_t order_ = 0;
    std::vector<std::uint64_t> offsets_;
};

// Materializes the mask; refuses popcount(k) > kMaxMaskPopcount.
SierpinskiMask sierpinski_mask(std::uint64_t k);

struct ExactProbability {
    double p1 = 0.0;
    // E[(-1)^{xi_n^{(k)}}]; underflows to 0 long before log2_abs_character does.
    double character = 0.0;
    double log2_abs_character = 0.0;

    double p0() const { return 1.0 - p1; }
    // |p1 - 1/2| = |character| / 2.
    double deviation() const;
    double log2_deviation() const { return log2_abs_character - 1.0; }
};

// k <= kMaxOrder, n <= kMaxMarginalTime.
ExactProbability exact_prob(const ChainModel& model, std::uint64_t n, std::uint64_t k);
// The left-to-right O(k) transfer product; kept as the reference path.
ExactProbability exact_prob_reference(const ChainModel& model, std::uint64_t n, std::uint64_t k);
std::vector<ExactProbability> exact_prob_batch(const ChainModel& model, std::uint64_t n,
                                               std::span<const std::uint64_t> orders);

double deviation(const ChainModel& model, std::uint64_t n, std::uint64_t k);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t ones = 0;
    std::uint64_t trials = 0;
};

// trials >= 100. Bit-identical for equal arguments regardless of threads.
McEstimate mc_estimate(const ChainModel& model, std::uint64_t n, std::uint64_t k,
                       std::uint64_t trials, std::uint64_t seed);

}  // namespace capdiff

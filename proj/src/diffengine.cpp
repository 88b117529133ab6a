#include "capdiff/diffengine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"
#include "capdiff/kernels.hpp"

namespace capdiff {

BinarySequence difference_once(const BinarySequence& s) {
    if (s.size() < 2) throw InvalidArgument("difference_once: need at least 2 elements");
    std::vector<std::uint8_t> out(s.size() - 1);
    for (std::size_t n = 0; n + 1 < s.size(); ++n)
        out[n] = static_cast<std::uint8_t>(std::abs(int{s[n + 1]} - int{s[n]}));
    return BinarySequence(std::move(out));
}

BinarySequence difference_k(const BinarySequence& s, std::uint64_t k) {
    if (s.size() < k + 1)
        throw InvalidArgument("difference_k: need at least k + 1 = " + std::to_string(k + 1) + " elements");
    std::vector<std::uint8_t> row(s.bits().begin(), s.bits().end());
    for (std::uint64_t level = 0; level < k; ++level) {
        for (std::size_t n = 0; n + 1 < row.size(); ++n)
            row[n] = static_cast<std::uint8_t>(std::abs(int{row[n + 1]} - int{row[n]}));
        row.pop_back();
    }
    return BinarySequence(std::move(row));
}

BinarySequence difference_k_by_mask(const BinarySequence& s, std::uint64_t k) {
    if (s.size() < k + 1)
        throw InvalidArgument("difference_k_by_mask: need at least k + 1 = " + std::to_string(k + 1) +
                              " elements");
    return BinarySequence(kernels::mask_parity_omp(s.bits(), k));
}

SierpinskiMask sierpinski_mask(std::uint64_t k) {
    if (k == 0) throw InvalidArgument("sierpinski_mask: k must be >= 1");
    if (bits::popcount(k) > kMaxMaskPopcount)
        throw CapabilityRefused("sierpinski_mask: 2^" + std::to_string(bits::popcount(k)) +
                                " offsets exceed the materialization bound 2^" +
                                std::to_string(kMaxMaskPopcount));
    SierpinskiMask m;
    m.order_ = k;
    m.offsets_.reserve(std::size_t{1} << bits::popcount(k));
    bits::for_each_submask(k, [&](std::uint64_t i) { m.offsets_.push_back(i); });
    return m;
}

double ExactProbability::deviation() const { return std::fabs(character) / 2.0; }

namespace {

void check_order(std::uint64_t k) {
    if (k > kMaxOrder)
        throw CapabilityRefused("order k = " + std::to_string(k) + " exceeds the engine bound 2^26");
}

ExactProbability from_character(const kernels::ScaledReal& c) {
    ExactProbability r;
    r.character = std::clamp(c.to_double(), -1.0, 1.0);
    r.log2_abs_character = std::min(0.0, c.log2_abs());
    r.p1 = (1.0 - r.character) / 2.0;
    return r;
}

}  // namespace

ExactProbability exact_prob(const ChainModel& model, std::uint64_t n, std::uint64_t k) {
    check_order(k);
    const Distribution mu = marginal(model, n);
    return from_character(kernels::transfer_character_doubling(mu.values(), model.transition, k));
}

ExactProbability exact_prob_reference(const ChainModel& model, std::uint64_t n, std::uint64_t k) {
    check_order(k);
    const Distribution mu = marginal(model, n);
    return from_character(kernels::transfer_character_serial(mu.values(), model.transition, k));
}

std::vector<ExactProbability> exact_prob_batch(const ChainModel& model, std::uint64_t n,
                                               std::span<const std::uint64_t> orders) {
    for (const std::uint64_t k : orders) check_order(k);
    const Distribution mu = marginal(model, n);
    const auto chars = kernels::transfer_character_batch(mu.values(), model.transition, orders);
    std::vector<ExactProbability> out;
    out.reserve(chars.size());
    for (const auto& c : chars) out.push_back(from_character(c));
    return out;
}

double deviation(const ChainModel& model, std::uint64_t n, std::uint64_t k) {
    return exact_prob(model, n, k).deviation();
}

McEstimate mc_estimate(const ChainModel& model, std::uint64_t n, std::uint64_t k, std::uint64_t trials,
                       std::uint64_t seed) {
    if (trials < 100) throw InvalidArgument("mc_estimate: trials must be >= 100");
    check_order(k);
    if (n > kMaxOrder) throw CapabilityRefused("mc_estimate: n exceeds 2^26");
    McEstimate r;
    r.trials = trials;
    r.ones = kernels::mc_count_omp(model, n, k, trials, seed);
    r.estimate = static_cast<double>(r.ones) / static_cast<double>(trials);
    r.standard_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
    return r;
}

}  // namespace capdiff

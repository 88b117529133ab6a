#include "capdiff/bitcap.hpp"

#include <algorithm>
#include <vector>

#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"

namespace capdiff {

int trailing_ones(std::uint64_t k) {
    if (k == 0) throw InvalidArgument("trailing_ones: k must be >= 1");
    return bits::trailing_ones(k);
}

std::uint64_t pascal_mu(std::uint64_t k) {
    const int nu = trailing_ones(k);
    if (nu >= 64) throw InvalidArgument("pascal_mu: 2^nu(k) overflows 64 bits");
    return std::uint64_t{1} << nu;
}

std::uint64_t Capacity::value() const {
    if (!value_) throw InvalidArgument("Capacity::value: capacity is infinite");
    return *value_;
}

std::string Capacity::to_string() const {
    return value_ ? std::to_string(*value_) : std::string("inf");
}

Capacity capacity(std::span<const std::uint64_t> members) {
    std::vector<std::uint64_t> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("capacity: duplicate member");
    std::uint64_t total = 0;
    for (const std::uint64_t k : sorted) total += static_cast<std::uint64_t>(trailing_ones(k));
    return Capacity::finite(total);
}

std::uint64_t count_with_trailing_ones(int p, int v) {
    if (p < 0 || p > kMaxBlock) throw InvalidArgument("count_with_trailing_ones: block out of range");
    if (v < 0) throw InvalidArgument("count_with_trailing_ones: v must be >= 0");
    // nu = v <= p-1: bits 0..v-1 set, bit v clear, bits v+1..p-1 free.
    if (v <= p - 1) return std::uint64_t{1} << (p - 1 - v);
    // The only member with all low p bits set is 2^{p+1}-1, whose nu is p+1.
    if (v == p + 1) return 1;
    return 0;
}

std::uint64_t block_capacity(int p, int s) {
    if (p < 0 || p > kMaxBlock) throw InvalidArgument("block_capacity: block out of range");
    if (s < 0) throw InvalidArgument("block_capacity: threshold must be >= 0");
    // sum_{j=s}^{p-1} j 2^{p-1-j} + (p+1) telescopes to (s+1) 2^{p-s} for s <= p.
    if (s <= p) return static_cast<std::uint64_t>(s + 1) << (p - s);
    if (s == p + 1) return static_cast<std::uint64_t>(p + 1);
    return 0;
}

}  // namespace capdiff

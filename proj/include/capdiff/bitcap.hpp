#pragma once

// Binary-expansion functionals and the discrete capacity of finite sets.
//
// nu(k) is the number of trailing 1-bits of k, mu(k) the number of leading
// odd entries of row k of Pascal's triangle, and C(e) = sum over e of nu(k).
// The dyadic block K_p is [2^p, 2^{p+1}).

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace capdiff {

// Largest block index for which K_p fits in a 64-bit word with room for
// the per-nu bitmasks used by BlockSlice.
inline constexpr int kMaxBlock = 62;

// nu(k); rejects k = 0.
int trailing_ones(std::uint64_t k);

// mu(k) = 2^{nu(k)}; rejects k = 0 and results that overflow 64 bits.
std::uint64_t pascal_mu(std::uint64_t k);

// A capacity value: an exact nonnegative integer or infinity.
class Capacity {
public:
    constexpr Capacity() = default;
    static constexpr Capacity finite(std::uint64_t v) { return Capacity(v); }
    static constexpr Capacity infinite() {
        Capacity c;
        c.value_.reset();
        return c;
    }

    constexpr bool is_infinite() const { return !value_.has_value(); }
    // Throws InvalidArgument when infinite.
    std::uint64_t value() const;
    std::string to_string() const;

    friend constexpr bool operator==(const Capacity&, const Capacity&) = default;
    friend constexpr std::strong_ordering operator<=>(const Capacity& a, const Capacity& b) {
        if (a.is_infinite() || b.is_infinite())
            return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
        return *a.value_ <=> *b.value_;
    }

private:
    constexpr explicit Capacity(std::uint64_t v) : value_(v) {}
    std::optional<std::uint64_t> value_ = 0;
};

// C(e) for a finite collection of distinct positive integers (any order).
Capacity capacity(std::span<const std::uint64_t> members);

// Number of k in K_p with nu(k) == v. Zero for v == p and v > p + 1.
std::uint64_t count_with_trailing_ones(int p, int v);

// C({k in K_p : nu(k) >= s}) in closed form; p in [0, kMaxBlock].
std::uint64_t block_capacity(int p, int s);

}  // namespace capdiff

#pragma once

// Deterministic 64-bit-seeded generator used by every sampler.
//
// State: xoshiro256** (Blackman & Vigna), seeded by four successive outputs
// of splitmix64 starting from the 64-bit seed. Uniform doubles take the top
// 53 bits of the output: u = (x >> 11) * 2^-53, so u is in [0, 1).
// Parallel workers use derive_seed(seed, stream), which mixes both words
// through the splitmix64 finalizer. All arithmetic is on uint64_t, so the
// streams are identical on every platform.

#include <array>
#include <cstdint>

namespace capdiff {

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t t = a ^ stream;
    return splitmix64_next(t);
}

class Xoshiro256 {
public:
    explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // 1 with probability p1.
    constexpr int bernoulli(double p1) noexcept { return uniform() < p1 ? 1 : 0; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace capdiff

#include <bit>
#include <cmath>

#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"
#include "capdiff/kernels.hpp"
#include "kernels_detail.hpp"

namespace capdiff::kernels {

namespace {

// Rescale once magnitudes drop this far; one step shrinks them by at most
// a factor of |lambda|, so this leaves ample headroom before underflow.
constexpr double kRescaleBelow = 0x1p-256;

ScaledReal make_scaled(double v, std::int64_t exponent) {
    if (v == 0.0) return {};
    int e = 0;
    const double m = std::frexp(v, &e);
    return {m, exponent + e};
}

}  // namespace

void ScaledMat2::normalize() {
    double m = 0.0;
    for (const double x : a) m = std::max(m, std::fabs(x));
    if (m == 0.0) {
        exponent = 0;
        return;
    }
    int e = 0;
    std::frexp(m, &e);
    for (double& x : a) x = std::ldexp(x, -e);
    exponent += e;
}

ScaledMat2 operator*(const ScaledMat2& x, const ScaledMat2& y) {
    ScaledMat2 r;
    r.a[0] = x.a[0] * y.a[0] + x.a[1] * y.a[2];
    r.a[1] = x.a[0] * y.a[1] + x.a[1] * y.a[3];
    r.a[2] = x.a[2] * y.a[0] + x.a[3] * y.a[2];
    r.a[3] = x.a[2] * y.a[1] + x.a[3] * y.a[3];
    r.exponent = x.exponent + y.exponent;
    r.normalize();
    return r;
}

ScaledMat2 to_matrix(const TransitionMatrix& t) {
    ScaledMat2 m;
    m.a = {t(0, 0), t(0, 1), t(1, 0), t(1, 1)};
    return m;
}

ScaledReal transfer_character_serial(const std::array<double, 2>& start, const TransitionMatrix& t,
                                     std::uint64_t k) {
    const double t00 = t(0, 0), t01 = t(0, 1), t10 = t(1, 0), t11 = t(1, 1);
    double v0 = start[0];
    double v1 = start[1];
    std::int64_t exponent = 0;
    for (std::uint64_t i = 0;; ++i) {
        if (bits::is_submask(i, k)) v1 = -v1;
        if (i == k) break;
        const double n0 = v0 * t00 + v1 * t10;
        const double n1 = v0 * t01 + v1 * t11;
        v0 = n0;
        v1 = n1;
        const double m = std::max(std::fabs(v0), std::fabs(v1));
        if (m < kRescaleBelow && m > 0.0) {
            int e = 0;
            std::frexp(m, &e);
            v0 = std::ldexp(v0, -e);
            v1 = std::ldexp(v1, -e);
            exponent += e;
        }
    }
    return make_scaled(v0 + v1, exponent);
}

namespace {

// A stochastic 2x2 matrix by its off-diagonal entries, up = P(0 -> 1) and
// down = P(1 -> 0), plus its second eigenvalue lambda = 1 - up - down carried
// separately. For a product PQ the off-diagonals are Q's plus P's scaled by
// lambda_Q, and lambda multiplies. Rows sum to one by construction, and once
// lambda underflows the power is the stationary projection exactly, so
// further factors leave it unchanged.
struct Stochastic2 {
    double up = 0.0;
    double down = 0.0;
    double lambda = 1.0;

    friend Stochastic2 operator*(const Stochastic2& p, const Stochastic2& q) {
        return {q.up + p.up * q.lambda, q.down + p.down * q.lambda, p.lambda * q.lambda};
    }

    ScaledMat2 matrix() const {
        ScaledMat2 m;
        m.a = {1.0 - up, up, down, 1.0 - down};
        m.normalize();
        return m;
    }
};

using DyadicPowers = std::array<Stochastic2, 64>;

// T^{2^i} for i = 0..count-1, by repeated squaring.
DyadicPowers dyadic_powers(const TransitionMatrix& t, int count) {
    DyadicPowers pw{};
    pw[0] = {t(0, 1), t(1, 0), t.second_eigenvalue()};
    for (int i = 1; i < count; ++i) pw[static_cast<std::size_t>(i)] = pw[static_cast<std::size_t>(i - 1)] * pw[static_cast<std::size_t>(i - 1)];
    return pw;
}

ScaledReal doubling_with(const std::array<double, 2>& start, const DyadicPowers& pw, std::uint64_t k) {
    ScaledMat2 prefix;  // factor for positions 0..r
    prefix.a = {1.0, 0.0, 0.0, -1.0};
    std::uint64_t r = 0;
    for (int j = 0; j < 64; ++j) {
        const std::uint64_t bit = std::uint64_t{1} << j;
        if ((k & bit) == 0) continue;
        // Positions r+1 .. 2^j - 1 are not submasks; 2^j - r transitions bridge the gap.
        const std::uint64_t gap = bit - r;
        Stochastic2 bridge;
        for (int i = 0; i < 64; ++i)
            if ((gap >> i) & 1U) bridge = bridge * pw[static_cast<std::size_t>(i)];
        prefix = prefix * bridge.matrix() * prefix;
        r += bit;
    }
    const double c = start[0] * (prefix.a[0] + prefix.a[1]) + start[1] * (prefix.a[2] + prefix.a[3]);
    return make_scaled(c, prefix.exponent);
}

}  // namespace

ScaledReal transfer_character_doubling(const std::array<double, 2>& start, const TransitionMatrix& t,
                                       std::uint64_t k) {
    return doubling_with(start, dyadic_powers(t, std::bit_width(k) + 1), k);
}

namespace detail {

std::vector<ScaledReal> doubling_batch(const std::array<double, 2>& start, const TransitionMatrix& t,
                                       std::span<const std::uint64_t> orders) {
    const DyadicPowers pw = dyadic_powers(t, 64);
    std::vector<ScaledReal> out(orders.size());
    const auto count = static_cast<std::int64_t>(orders.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = doubling_with(start, pw, orders[static_cast<std::size_t>(i)]);
    return out;
}

ScaledMat2 chunk_product(const TransitionMatrix& t, std::uint64_t k, std::uint64_t begin,
                         std::uint64_t end) {
    const double t00 = t(0, 0), t01 = t(0, 1), t10 = t(1, 0), t11 = t(1, 1);
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
    std::int64_t exponent = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
        if (bits::is_submask(i, k)) {
            m01 = -m01;
            m11 = -m11;
        }
        const double a00 = m00 * t00 + m01 * t10;
        const double a01 = m00 * t01 + m01 * t11;
        const double a10 = m10 * t00 + m11 * t10;
        const double a11 = m10 * t01 + m11 * t11;
        m00 = a00;
        m01 = a01;
        m10 = a10;
        m11 = a11;
        const double m = std::max(std::max(std::fabs(m00), std::fabs(m01)),
                                  std::max(std::fabs(m10), std::fabs(m11)));
        if (m < kRescaleBelow && m > 0.0) {
            int e = 0;
            std::frexp(m, &e);
            m00 = std::ldexp(m00, -e);
            m01 = std::ldexp(m01, -e);
            m10 = std::ldexp(m10, -e);
            m11 = std::ldexp(m11, -e);
            exponent += e;
        }
    }
    ScaledMat2 out;
    out.a = {m00, m01, m10, m11};
    out.exponent = exponent;
    out.normalize();
    return out;
}

ScaledReal finish_chunks(const std::array<double, 2>& start, std::span<const ScaledMat2> chunks) {
    ScaledMat2 total;
    for (const auto& c : chunks) total = total * c;
    // Position k is always a submask of k: final D_1.
    const double c = start[0] * (total.a[0] - total.a[1]) + start[1] * (total.a[2] - total.a[3]);
    return make_scaled(c, total.exponent);
}

}  // namespace detail

std::vector<std::uint8_t> mask_parity_serial(std::span<const std::uint8_t> s, std::uint64_t k) {
    if (s.size() < k + 1) throw InvalidArgument("mask_parity: sequence shorter than k + 1");
    const std::size_t out_len = s.size() - static_cast<std::size_t>(k);
    std::vector<std::uint8_t> out(out_len);
    for (std::size_t n = 0; n < out_len; ++n) {
        std::uint8_t parity = 0;
        bits::for_each_submask(k, [&](std::uint64_t i) { parity ^= s[n + static_cast<std::size_t>(i)]; });
        out[n] = parity;
    }
    return out;
}

namespace detail {

int window_parity(std::span<const std::uint8_t> path, std::uint64_t n, std::uint64_t k) {
    std::uint8_t parity = 0;
    bits::for_each_submask(k, [&](std::uint64_t i) { parity ^= path[static_cast<std::size_t>(n + i)]; });
    return parity;
}

}  // namespace detail

std::uint64_t mc_count_serial(const ChainModel& model, std::uint64_t n, std::uint64_t k,
                              std::uint64_t trials, std::uint64_t seed) {
    std::vector<std::uint8_t> path(static_cast<std::size_t>(n + k + 1));
    std::uint64_t ones = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Xoshiro256 gen(derive_seed(seed, t));
        sample_path_into(model, gen, path);
        ones += static_cast<std::uint64_t>(detail::window_parity(path, n, k));
    }
    return ones;
}

}  // namespace capdiff::kernels

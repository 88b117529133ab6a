#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "capdiff/kernels.hpp"
#include "doctest.h"

using namespace capdiff;
using namespace capdiff::kernels;

namespace {

// |a - b| relative to the larger magnitude, on the log scale when both are tiny.
bool close(const ScaledReal& a, const ScaledReal& b, double rel) {
    if (a.mantissa == 0.0 || b.mantissa == 0.0) return a.mantissa == b.mantissa;
    if ((a.mantissa < 0) != (b.mantissa < 0)) return false;
    return std::abs(a.log2_abs() - b.log2_abs()) <= rel;
}

const std::vector<std::pair<double, double>> kChains = {
    {0.7, 0.4}, {0.1, 0.9}, {0.5, 0.5}, {0.95, 0.2}, {0.3, 0.35}, {0.999, 0.998}};

}  // namespace

TEST_CASE("doubling, chunked and batch agree with the serial product") {
    std::mt19937_64 gen(4);
    std::vector<std::uint64_t> orders;
    for (std::uint64_t k = 0; k <= 300; ++k) orders.push_back(k);
    for (int i = 0; i < 40; ++i) orders.push_back(gen() % (1 << 18));
    orders.push_back((1 << 18) - 1);
    orders.push_back(1 << 18);
    for (const auto& [a, b] : kChains) {
        const auto t = TransitionMatrix::from_diagonal(a, b);
        for (const std::array<double, 2> start : {std::array<double, 2>{1, 0}, {0.25, 0.75}}) {
            const auto batch = transfer_character_batch(start, t, orders);
            for (std::size_t i = 0; i < orders.size(); ++i) {
                const std::uint64_t k = orders[i];
                const auto ref = transfer_character_serial(start, t, k);
                const auto dbl = transfer_character_doubling(start, t, k);
                const auto chk = transfer_character_chunked(start, t, k);
                INFO("a=" << a << " b=" << b << " k=" << k);
                // the serial product rounds once per step
                const double tol = 1e-15 + 4e-16 * static_cast<double>(k);
                CHECK(std::abs(ref.to_double() - dbl.to_double()) <= tol);
                CHECK(std::abs(ref.to_double() - chk.to_double()) <= tol);
                // relative agreement of the scaled value, far below underflow
                CHECK(close(ref, dbl, 1e-9));
                CHECK(close(ref, chk, 1e-9));
                CHECK(batch[i].mantissa == dbl.mantissa);
                CHECK(batch[i].exponent == dbl.exponent);
            }
        }
    }
}

TEST_CASE("scaled characters stay finite past double underflow") {
    const auto t = TransitionMatrix::from_diagonal(0.7, 0.4);
    const std::uint64_t k = (1 << 16) - 1;
    const auto ref = transfer_character_serial({1, 0}, t, k);
    const auto dbl = transfer_character_doubling({1, 0}, t, k);
    CHECK(ref.to_double() == 0.0);
    CHECK(std::isfinite(ref.log2_abs()));
    CHECK(ref.log2_abs() < -60000);
    CHECK(dbl.log2_abs() == doctest::Approx(ref.log2_abs()).epsilon(1e-12));
}

TEST_CASE("scaled matrix products renormalize") {
    ScaledMat2 m;
    m.a = {0x1.0p-600, 0, 0, 0x1.0p-600};
    m.normalize();
    const ScaledMat2 sq = m * m;
    CHECK(std::ldexp(sq.a[0], static_cast<int>(sq.exponent) + 1200) == doctest::Approx(1.0));
}

TEST_CASE("identity and sign matrices") {
    const auto t = TransitionMatrix::from_diagonal(0.7, 0.4);
    // k = 0: start * diag(1, -1) * 1 = q0 - q1
    CHECK(transfer_character_doubling({0.25, 0.75}, t, 0).to_double() == doctest::Approx(-0.5));
    CHECK(transfer_character_serial({0.25, 0.75}, t, 0).to_double() == doctest::Approx(-0.5));
    const auto m = to_matrix(t);
    CHECK(std::ldexp(m.a[1], static_cast<int>(m.exponent)) == doctest::Approx(0.3));
}

TEST_CASE("mask parity kernels agree") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::uint8_t> s(2000 + gen() % 3000);
        for (auto& b : s) b = static_cast<std::uint8_t>(gen() & 1);
        for (std::uint64_t k : {0ULL, 1ULL, 7ULL, 64ULL, 255ULL, 1000ULL, 1999ULL}) {
            CHECK(mask_parity_serial(s, k) == mask_parity_omp(s, k));
            CHECK(mask_parity_serial(s, k).size() == s.size() - k);
        }
    }
}

TEST_CASE("Monte Carlo counts match serially and across thread counts") {
    const ChainModel m{TransitionMatrix::from_diagonal(0.7, 0.4), Distribution::make(0.5, 0.5)};
    for (std::uint64_t k : {1ULL, 6ULL, 31ULL, 300ULL}) {
        const auto serial = mc_count_serial(m, 3, k, 5000, 99);
        const int saved = omp_get_max_threads();
        for (int threads : {1, 2, 3, 7}) {
            omp_set_num_threads(threads);
            CHECK(mc_count_omp(m, 3, k, 5000, 99) == serial);
        }
        omp_set_num_threads(saved);
    }
}

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "capdiff/diffengine.hpp"
#include "capdiff/error.hpp"
#include "capdiff/oracle.hpp"
#include "doctest.h"

using namespace capdiff;

namespace {

BinarySequence random_sequence(std::mt19937_64& gen, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(gen() & 1);
    return BinarySequence(std::move(bits));
}

double iid_p1(double q, std::uint64_t k) {
    return (1.0 - std::pow(1.0 - 2.0 * q, std::ldexp(1.0, std::popcount(k)))) / 2.0;
}

ChainModel reference_chain() {
    return {TransitionMatrix::from_diagonal(0.7, 0.4), Distribution::point_mass(0)};
}

}  // namespace

TEST_CASE("first differences") {
    CHECK(difference_once(BinarySequence::parse("0110")).to_string() == "101");
    CHECK(difference_once(BinarySequence::parse("1111111")).to_string() == "000000");
    CHECK(difference_once(BinarySequence::parse("0101010101")).to_string() == "111111111");
    CHECK_THROWS_AS(difference_once(BinarySequence::parse("1")), InvalidArgument);
}

TEST_CASE("k-th differences") {
    const auto s = BinarySequence::parse("0110");
    CHECK(difference_k(s, 0) == s);
    CHECK(difference_k(s, 2).to_string() == "11");
    CHECK(difference_k(s, 3).to_string() == "0");
    CHECK_THROWS_AS(difference_k(s, 4), InvalidArgument);
    CHECK_THROWS_AS(difference_k_by_mask(s, 4), InvalidArgument);
    CHECK_THROWS_AS(BinarySequence::parse("0120"), InvalidArgument);
    CHECK_THROWS_AS(BinarySequence(std::vector<std::uint8_t>{0, 2}), InvalidArgument);
}

TEST_CASE("iterated differences equal mask parity") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_sequence(gen, 300);
        for (std::uint64_t k = 0; k <= 256; k += (trial % 2 == 0 ? 1 : 17))
            CHECK(difference_k(s, k) == difference_k_by_mask(s, k));
    }
}

TEST_CASE("order 4096 needs only the two end points") {
    std::mt19937_64 gen(13);
    const auto s = random_sequence(gen, 4097);
    const auto d = difference_k(s, 4096);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == (s[0] ^ s[4096]));
    CHECK(d == difference_k_by_mask(s, 4096));
    CHECK(sierpinski_mask(4096).offsets() == std::vector<std::uint64_t>{0, 4096});
}

TEST_CASE("Sierpinski masks") {
    CHECK(sierpinski_mask(2).offsets() == std::vector<std::uint64_t>{0, 2});
    CHECK(sierpinski_mask(3).offsets() == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(sierpinski_mask(4).offsets() == std::vector<std::uint64_t>{0, 4});
    for (std::uint64_t k = 1; k <= 4096; ++k) {
        const auto m = sierpinski_mask(k);
        CHECK(m.size() == std::size_t{1} << std::popcount(k));
        CHECK(m.offsets().front() == 0);
        CHECK(m.offsets().back() == k);
        CHECK(m.contains(k));
        CHECK_FALSE(m.contains(k + 1));
    }
    CHECK(sierpinski_mask((1 << 24) - 1).size() == std::size_t{1} << 24);
    CHECK_THROWS_AS(sierpinski_mask((1 << 25) - 1), CapabilityRefused);
    CHECK_THROWS_AS(sierpinski_mask(0), InvalidArgument);
}

TEST_CASE("exact probability examples") {
    const auto m = reference_chain();
    // k = 0 is the marginal
    for (std::uint64_t n = 0; n <= 5; ++n)
        CHECK(exact_prob(m, n, 0).p1 == doctest::Approx(marginal(m, n)[1]).epsilon(1e-15));
    const ChainModel stat{m.transition, stationary(m.transition)};
    CHECK(exact_prob(stat, 0, 1).p1 == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(deviation(m, 0, 0) == 0.5);
    const auto e = exact_prob(m, 0, 15);
    CHECK(e.p1 + e.p0() == 1.0);
    CHECK(e.p1 == doctest::Approx((1.0 - e.character) / 2.0).epsilon(1e-15));
    CHECK(e.deviation() == doctest::Approx(std::abs(e.p1 - 0.5)).epsilon(1e-9));
}

TEST_CASE("i.i.d. rows factor over the mask") {
    for (double q : {0.1, 0.25, 0.5, 0.6, 0.9}) {
        const ChainModel m{TransitionMatrix::iid(q), Distribution::make(1 - q, q)};
        for (std::uint64_t k : {0ULL, 1ULL, 2ULL, 3ULL, 5ULL, 100ULL, 1023ULL, 65535ULL, 1ULL << 20}) {
            const auto e = exact_prob(m, 0, k);
            CHECK(e.p1 == doctest::Approx(iid_p1(q, k)).epsilon(1e-12));
            CHECK(std::abs(e.character) <= std::pow(std::abs(1 - 2 * q), std::ldexp(1.0, std::popcount(k))) + 1e-15);
        }
    }
    // i.i.d. violates condition E through p00 + p11 = 1; the engine still applies
    const ChainModel fair{TransitionMatrix::iid(0.5), Distribution::point_mass(1)};
    for (std::uint64_t k = 1; k <= 64; ++k) CHECK(deviation(fair, 0, k) == 0.0);
}

TEST_CASE("exact probabilities match path enumeration") {
    for (double a : {0.1, 0.7}) {
        for (double b : {0.4, 0.9}) {
            for (const auto& init : {Distribution::point_mass(0), Distribution::make(0.5, 0.5)}) {
                const ChainModel m{TransitionMatrix::from_diagonal(a, b), init};
                for (std::uint64_t n : {0ULL, 3ULL}) {
                    for (int k = 0; k <= 12; ++k) {
                        const double brute = oracle::brute_joint_prob(m, n, k);
                        CHECK(std::abs(exact_prob(m, n, static_cast<std::uint64_t>(k)).p1 - brute) <= 1e-12);
                        CHECK(std::abs(exact_prob_reference(m, n, static_cast<std::uint64_t>(k)).p1 - brute) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("batch equals one-at-a-time") {
    const auto m = reference_chain();
    std::vector<std::uint64_t> ks;
    for (std::uint64_t k = 0; k < 3000; k += 7) ks.push_back(k);
    const auto batch = exact_prob_batch(m, 2, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK(batch[i].p1 == exact_prob(m, 2, ks[i]).p1);
        CHECK(batch[i].log2_abs_character == exact_prob(m, 2, ks[i]).log2_abs_character);
    }
}

TEST_CASE("Mersenne orders decay strictly") {
    const auto m = reference_chain();
    double prev = 1.0;
    for (int e = 2; e <= 16; ++e) {
        const std::uint64_t k = (std::uint64_t{1} << e) - 1;
        const auto fast = exact_prob(m, 0, k);
        const auto ref = exact_prob_reference(m, 0, k);
        CHECK(fast.log2_deviation() < prev);
        CHECK(fast.log2_deviation() == doctest::Approx(ref.log2_deviation()).epsilon(1e-12));
        prev = fast.log2_deviation();
    }
    CHECK(prev < -60000);
}

TEST_CASE("engine bounds") {
    const auto m = reference_chain();
    CHECK_NOTHROW(exact_prob(m, 0, kMaxOrder));
    CHECK_THROWS_AS(exact_prob(m, 0, kMaxOrder + 1), CapabilityRefused);
    CHECK_THROWS_AS(exact_prob_reference(m, 0, kMaxOrder + 1), CapabilityRefused);
    const std::uint64_t big[] = {1, kMaxOrder + 1};
    CHECK_THROWS_AS(exact_prob_batch(m, 0, big), CapabilityRefused);
    CHECK_THROWS_AS(exact_prob(m, kMaxMarginalTime + 1, 1), InvalidArgument);
}

TEST_CASE("Monte Carlo estimates") {
    const ChainModel fair{TransitionMatrix::iid(0.5), Distribution::make(0.5, 0.5)};
    const auto f = mc_estimate(fair, 0, 9, 20000, 3);
    CHECK(std::abs(f.estimate - 0.5) < 4 * f.standard_error);

    const ChainModel stat{TransitionMatrix::from_diagonal(0.7, 0.4), Distribution::make(2.0 / 3.0, 1.0 / 3.0)};
    const auto e = mc_estimate(stat, 0, 1, 1'000'000, 11);
    CHECK(std::abs(e.estimate - 0.4) < 4 * e.standard_error);
    CHECK(e.standard_error == doctest::Approx(std::sqrt(e.estimate * (1 - e.estimate) / 1e6)));
    CHECK(e.ones == static_cast<std::uint64_t>(std::llround(e.estimate * 1e6)));

    const auto again = mc_estimate(stat, 0, 1, 1'000'000, 11);
    CHECK(again.ones == e.ones);
    CHECK_THROWS_AS(mc_estimate(stat, 0, 1, 99, 1), InvalidArgument);
}

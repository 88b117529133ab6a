#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "capdiff/bitcap.hpp"
#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"
#include "capdiff/oracle.hpp"
#include "doctest.h"

using namespace capdiff;

TEST_CASE("trailing ones counts the low run of 1-bits") {
    CHECK(trailing_ones(7) == 3);
    CHECK(trailing_ones(4) == 0);
    CHECK(trailing_ones(11) == 2);
    CHECK(trailing_ones(1) == 1);
    for (int p = 0; p < 63; ++p) CHECK(trailing_ones((std::uint64_t{1} << (p + 1)) - 1) == p + 1);
    CHECK(trailing_ones(~std::uint64_t{0}) == 64);
    CHECK_THROWS_AS(trailing_ones(0), InvalidArgument);
}

TEST_CASE("trailing ones is zero exactly on even numbers") {
    for (std::uint64_t k = 1; k <= 4096; ++k) {
        CHECK((trailing_ones(k) == 0) == (k % 2 == 0));
        CHECK(trailing_ones(k) == oracle::brute_trailing_ones(k));
    }
}

TEST_CASE("nu never equals the block index") {
    for (int p = 1; p <= 14; ++p) {
        for (std::uint64_t k = bits::block_begin(p); k < bits::block_end(p); ++k) {
            const int v = trailing_ones(k);
            CHECK(v != p);
            CHECK((v <= p - 1 || v == p + 1));
        }
    }
}

TEST_CASE("pascal mu") {
    CHECK(pascal_mu(3) == 4);
    CHECK(pascal_mu(4) == 1);
    CHECK(pascal_mu(5) == 2);
    CHECK(pascal_mu((std::uint64_t{1} << 63) - 1) == std::uint64_t{1} << 63);
    CHECK_THROWS_AS(pascal_mu(0), InvalidArgument);
    CHECK_THROWS_AS(pascal_mu(~std::uint64_t{0}), InvalidArgument);
}

TEST_CASE("capacity of finite sets") {
    CHECK(capacity(std::vector<std::uint64_t>{}) == Capacity::finite(0));
    CHECK(capacity(std::vector<std::uint64_t>{2, 3}).value() == 2);
    std::vector<std::uint64_t> k3(8);
    std::iota(k3.begin(), k3.end(), 8);
    CHECK(capacity(k3).value() == 8);
    // order does not matter
    CHECK(capacity(std::vector<std::uint64_t>{15, 3, 8}).value() == 6);
    CHECK_THROWS_AS(capacity(std::vector<std::uint64_t>{0, 1}), InvalidArgument);
    CHECK_THROWS_AS(capacity(std::vector<std::uint64_t>{3, 5, 3}), InvalidArgument);
}

TEST_CASE("capacity values order with infinity on top") {
    CHECK(Capacity::finite(5) < Capacity::infinite());
    CHECK(Capacity::finite(2) < Capacity::finite(3));
    CHECK(Capacity::infinite() == Capacity::infinite());
    CHECK(Capacity::infinite().to_string() == "inf");
    CHECK(Capacity::finite(12).to_string() == "12");
    CHECK_THROWS_AS(Capacity::infinite().value(), InvalidArgument);
}

TEST_CASE("block capacity examples") {
    CHECK(block_capacity(3, 0) == 8);
    CHECK(block_capacity(3, 2) == 6);
    CHECK(block_capacity(3, 5) == 0);
    CHECK(block_capacity(3, 3) == 4);
    CHECK(block_capacity(3, 4) == 4);
}

TEST_CASE("block capacity closed form matches enumeration") {
    for (int p = 0; p <= oracle::kMaxBruteBlock; ++p)
        for (int s = 0; s <= p + 3; ++s) CHECK(block_capacity(p, s) == oracle::brute_block_capacity(p, s));
}

TEST_CASE("block capacity equals the written sum") {
    for (int p = 1; p <= 40; ++p) {
        for (int s = 0; s <= p - 1; ++s) {
            std::uint64_t sum = static_cast<std::uint64_t>(p) + 1;
            for (int j = s; j <= p - 1; ++j) sum += static_cast<std::uint64_t>(j) << (p - 1 - j);
            CHECK(block_capacity(p, s) == sum);
        }
        CHECK(block_capacity(p, p) == static_cast<std::uint64_t>(p) + 1);
        CHECK(block_capacity(p, p + 1) == static_cast<std::uint64_t>(p) + 1);
        CHECK(block_capacity(p, p + 2) == 0);
    }
}

TEST_CASE("whole block capacity is exactly 2^p") {
    for (int p = 0; p <= kMaxBlock; ++p) CHECK(block_capacity(p, 0) == std::uint64_t{1} << p);
    CHECK_THROWS_AS(block_capacity(kMaxBlock + 1, 0), InvalidArgument);
    CHECK_THROWS_AS(block_capacity(-1, 0), InvalidArgument);
}

TEST_CASE("nu class counts") {
    for (int p = 1; p <= 20; ++p) {
        std::uint64_t total = 0;
        for (int v = 0; v <= p + 2; ++v) {
            const std::uint64_t c = count_with_trailing_ones(p, v);
            if (v <= p - 1) CHECK(c == std::uint64_t{1} << (p - 1 - v));
            if (v == p || v > p + 1) CHECK(c == 0);
            if (v == p + 1) CHECK(c == 1);
            total += c;
        }
        CHECK(total == std::uint64_t{1} << p);
    }
}

TEST_CASE("monotone and subadditive on random nested sets") {
    std::mt19937_64 gen(20240611);
    std::uniform_int_distribution<std::uint64_t> pick(1, 1 << 16);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> big;
        const int n = 1 + static_cast<int>(gen() % 300);
        for (int i = 0; i < n; ++i) big.push_back(pick(gen));
        std::sort(big.begin(), big.end());
        big.erase(std::unique(big.begin(), big.end()), big.end());
        std::vector<std::uint64_t> small, rest;
        for (std::uint64_t k : big) (gen() % 2 ? small : rest).push_back(k);
        const auto cs = capacity(small).value();
        const auto cr = capacity(rest).value();
        const auto cb = capacity(big).value();
        CHECK(cs <= cb);
        CHECK(cs + cr == cb);  // disjoint
        std::vector<std::uint64_t> overlap = small;
        overlap.insert(overlap.end(), big.begin(), big.begin() + static_cast<long>(big.size() / 2));
        std::sort(overlap.begin(), overlap.end());
        overlap.erase(std::unique(overlap.begin(), overlap.end()), overlap.end());
        CHECK(capacity(overlap).value() <= cs + capacity(std::span(big).first(big.size() / 2)).value());
    }
}

TEST_CASE("bit helpers") {
    CHECK(bits::block_of(1) == 0);
    CHECK(bits::block_of(8) == 3);
    CHECK(bits::block_of(15) == 3);
    CHECK(bits::is_submask(5, 7));
    CHECK_FALSE(bits::is_submask(2, 5));
    std::vector<std::uint64_t> seen;
    bits::for_each_submask(11, [&](std::uint64_t i) { seen.push_back(i); });
    CHECK(seen == std::vector<std::uint64_t>{0, 1, 2, 3, 8, 9, 10, 11});
}

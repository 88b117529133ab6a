#include <vector>

#include "capdiff/bitcap.hpp"
#include "capdiff/diffengine.hpp"
#include "capdiff/error.hpp"
#include "capdiff/oracle.hpp"
#include "doctest.h"

using namespace capdiff;
using Row = std::vector<std::uint8_t>;

TEST_CASE("Pascal rows mod 2") {
    CHECK(oracle::brute_pascal_row_parity(4).parities == Row{1, 0, 0, 0, 1});
    CHECK(oracle::brute_pascal_row_parity(3).parities == Row{1, 1, 1, 1});
    CHECK(oracle::brute_pascal_row_parity(0).parities == Row{1});
    for (int t = 1; t <= 12; ++t) {
        const auto row = oracle::brute_pascal_row_parity((std::uint64_t{1} << t) - 1);
        CHECK(row.leading_odd() == std::uint64_t{1} << t);
    }
    CHECK_THROWS_AS(oracle::brute_pascal_row_parity(oracle::kMaxPascalRow + 1), InvalidArgument);
}

TEST_CASE("leading odd count is mu and the support is the mask") {
    std::uint64_t rows = 0;
    oracle::for_each_pascal_parity_row(4096, [&](const oracle::ParityRow& row) {
        ++rows;
        CHECK(row.parities.front() == 1);
        CHECK(row.parities.back() == 1);
        if (row.k == 0) return;
        CHECK(row.leading_odd() == pascal_mu(row.k));
        CHECK(row.support() == sierpinski_mask(row.k).offsets());
    });
    CHECK(rows == 4097);
}

TEST_CASE("trailing ones by division") {
    CHECK(oracle::brute_trailing_ones(7) == 3);
    CHECK(oracle::brute_trailing_ones(4) == 0);
    CHECK(oracle::brute_trailing_ones(11) == 2);
}

TEST_CASE("block capacity by enumeration") {
    CHECK(oracle::brute_block_capacity(3, 0) == 8);
    CHECK(oracle::brute_block_capacity(3, 2) == 6);
    CHECK(oracle::brute_block_capacity(16, 0) == 65536);
    CHECK_THROWS_AS(oracle::brute_block_capacity(17, 0), InvalidArgument);
}

TEST_CASE("path enumeration") {
    const ChainModel start0{TransitionMatrix::from_diagonal(0.7, 0.4), Distribution::point_mass(0)};
    // k = 0 is the marginal at state 1
    CHECK(oracle::brute_joint_prob(start0, 0, 0) == 0.0);
    CHECK(oracle::brute_joint_prob(start0, 1, 0) == doctest::Approx(0.3).epsilon(1e-15));
    const ChainModel stat{start0.transition, Distribution::make(2.0 / 3.0, 1.0 / 3.0)};
    CHECK(oracle::brute_joint_prob(stat, 0, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(std::abs(oracle::brute_joint_prob(stat, 2, 16) - exact_prob(stat, 2, 16).p1) <= 1e-12);
    CHECK_THROWS_AS(oracle::brute_joint_prob(stat, 0, 21), InvalidArgument);
    CHECK_THROWS_AS(oracle::brute_joint_prob(stat, 33, 1), InvalidArgument);
}

TEST_CASE("membership filters") {
    const auto spec = parse_spec("nu>=const:2");
    CHECK(oracle::brute_members_in_block(spec, 3) == std::vector<std::uint64_t>{11, 15});
    CHECK(oracle::brute_count_up_to(spec, 15) == 4);
    CHECK_THROWS_AS(oracle::brute_members_in_block(spec, 25), InvalidArgument);
}

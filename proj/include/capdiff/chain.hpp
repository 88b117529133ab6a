#pragma once

// Two-state time-homogeneous Markov chains on {0, 1}.

#include <array>
#include <cstdint>
#include <span>

#include "capdiff/binary_sequence.hpp"
#include "capdiff/rng.hpp"

namespace capdiff {

// Probabilities summing to one are accepted within this slack; anything
// further off is rejected rather than renormalized.
inline constexpr double kInputTolerance = 1e-9;
// Equality tolerance for probability comparisons.
inline constexpr double kProbabilityTolerance = 1e-12;

class Distribution {
public:
    static Distribution make(double q0, double q1);
    static Distribution point_mass(int state);

    double operator[](int state) const { return q_[static_cast<std::size_t>(state)]; }
    const std::array<double, 2>& values() const { return q_; }

private:
    friend class DistributionAccess;
    Distribution(double q0, double q1) : q_{q0, q1} {}
    std::array<double, 2> q_;
};

// Builds distributions from already-validated arithmetic (no sum check).
class DistributionAccess {
public:
    static Distribution raw(double q0, double q1) { return Distribution(q0, q1); }
};

// Row-stochastic 2x2 matrix; entry(x, y) = P(next = y | current = x).
class TransitionMatrix {
public:
    static TransitionMatrix make(double p00, double p01, double p10, double p11);
    // From the diagonal: rows (p00, 1 - p00) and (1 - p11, p11).
    static TransitionMatrix from_diagonal(double p00, double p11);
    // Both rows equal (1 - q, q).
    static TransitionMatrix iid(double q);

    double operator()(int x, int y) const {
        return p_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    }
    // lambda = p00 + p11 - 1, the eigenvalue other than 1.
    double second_eigenvalue() const { return p_[0][0] + p_[1][1] - 1.0; }

private:
    using Rows = std::array<std::array<double, 2>, 2>;
    explicit TransitionMatrix(const Rows& p) : p_(p) {}
    Rows p_;
};

struct ChainModel {
    TransitionMatrix transition;
    Distribution initial;
};

struct ConditionEReport {
    bool positivity = false;      // every entry nonzero
    bool asymmetry = false;       // p00 != p11
    bool nondegeneracy = false;   // p00 + p11 != 1
    double lambda = 0.0;

    bool all_pass() const { return positivity && asymmetry && nondegeneracy; }
};

ConditionEReport check_condition_E(const TransitionMatrix& t);

inline constexpr std::uint64_t kMaxMarginalTime = 10'000'000;

// Law of the state at time n: initial * transition^n, by repeated
// vector-matrix products. n <= kMaxMarginalTime.
Distribution marginal(const ChainModel& model, std::uint64_t n);

// Rejects matrices with p01 = p10 = 0.
Distribution stationary(const TransitionMatrix& t);

// xi_0, ..., xi_{length-1}; reproducible from (model, length, seed).
BinarySequence sample_path(const ChainModel& model, std::size_t length, std::uint64_t seed);

// Fills out with one path drawn from gen: one uniform for the initial state
// and one per transition, state 1 chosen when u < P(1 | ...).
void sample_path_into(const ChainModel& model, Xoshiro256& gen, std::span<std::uint8_t> out);

}  // namespace capdiff

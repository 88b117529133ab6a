#include "capdiff/chain.hpp"

#include <cmath>
#include <string>

#include "capdiff/error.hpp"

namespace capdiff {

namespace {

void check_probability(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw InvalidArgument(std::string(what) + " must be a probability in [0, 1]");
}

void check_sum(double a, double b, const char* what) {
    if (std::fabs(a + b - 1.0) > kInputTolerance)
        throw InvalidArgument(std::string(what) + " must sum to 1 (got " + std::to_string(a + b) + ")");
}

}  // namespace

Distribution Distribution::make(double q0, double q1) {
    check_probability(q0, "initial distribution entries");
    check_probability(q1, "initial distribution entries");
    check_sum(q0, q1, "initial distribution");
    return Distribution(q0, q1);
}

Distribution Distribution::point_mass(int state) {
    if (state != 0 && state != 1) throw InvalidArgument("point_mass: state must be 0 or 1");
    return state == 0 ? Distribution(1.0, 0.0) : Distribution(0.0, 1.0);
}

TransitionMatrix TransitionMatrix::make(double p00, double p01, double p10, double p11) {
    for (double v : {p00, p01, p10, p11}) check_probability(v, "transition entries");
    check_sum(p00, p01, "transition row 0");
    check_sum(p10, p11, "transition row 1");
    return TransitionMatrix(Rows{{{p00, p01}, {p10, p11}}});
}

TransitionMatrix TransitionMatrix::from_diagonal(double p00, double p11) {
    check_probability(p00, "p00");
    check_probability(p11, "p11");
    return TransitionMatrix(Rows{{{p00, 1.0 - p00}, {1.0 - p11, p11}}});
}

TransitionMatrix TransitionMatrix::iid(double q) {
    check_probability(q, "q");
    return TransitionMatrix(Rows{{{1.0 - q, q}, {1.0 - q, q}}});
}

ConditionEReport check_condition_E(const TransitionMatrix& t) {
    ConditionEReport r;
    r.positivity = true;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            if (std::fabs(t(x, y)) < kProbabilityTolerance) r.positivity = false;
    r.asymmetry = std::fabs(t(0, 0) - t(1, 1)) >= kProbabilityTolerance;
    r.lambda = t.second_eigenvalue();
    r.nondegeneracy = std::fabs(r.lambda) >= kProbabilityTolerance;
    return r;
}

Distribution marginal(const ChainModel& model, std::uint64_t n) {
    if (n > kMaxMarginalTime)
        throw InvalidArgument("marginal: n exceeds " + std::to_string(kMaxMarginalTime));
    const auto& t = model.transition;
    double a = model.initial[0];
    double b = model.initial[1];
    for (std::uint64_t i = 0; i < n; ++i) {
        const double na = a * t(0, 0) + b * t(1, 0);
        const double nb = a * t(0, 1) + b * t(1, 1);
        a = na;
        b = nb;
    }
    return DistributionAccess::raw(a, b);
}

Distribution stationary(const TransitionMatrix& t) {
    const double out0 = t(0, 1);
    const double out1 = t(1, 0);
    if (out0 + out1 == 0.0) throw InvalidArgument("stationary: both states are absorbing");
    return DistributionAccess::raw(out1 / (out0 + out1), out0 / (out0 + out1));
}

void sample_path_into(const ChainModel& model, Xoshiro256& gen, std::span<std::uint8_t> out) {
    if (out.empty()) return;
    const auto& t = model.transition;
    int x = gen.bernoulli(model.initial[1]);
    out[0] = static_cast<std::uint8_t>(x);
    for (std::size_t i = 1; i < out.size(); ++i) {
        x = gen.bernoulli(t(x, 1));
        out[i] = static_cast<std::uint8_t>(x);
    }
}

BinarySequence sample_path(const ChainModel& model, std::size_t length, std::uint64_t seed) {
    if (length == 0) throw InvalidArgument("sample_path: length must be >= 1");
    std::vector<std::uint8_t> bits(length);
    Xoshiro256 gen(seed);
    sample_path_into(model, gen, bits);
    return BinarySequence(std::move(bits));
}

}  // namespace capdiff

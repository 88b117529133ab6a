#include "capdiff/wiener.hpp"

#include <algorithm>
#include <cmath>

#include "capdiff/error.hpp"

namespace capdiff {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Thin:
            return "thin";
        case Verdict::Thick:
            return "thick";
        case Verdict::Unknown:
            return "unknown";
    }
    return "unknown";
}

WienerDiagnostics wiener_partial_sums(const IndexSetSpec& spec, int p_max) {
    if (p_max < 1 || p_max > kMaxBlock)
        throw InvalidArgument("wiener_partial_sums: p_max must be in [1, " + std::to_string(kMaxBlock) + "]");
    if (const auto defined = spec.last_defined_block(); defined && *defined < p_max)
        throw CapabilityRefused("wiener_partial_sums: " + spec.to_string() + " is defined up to block " +
                                std::to_string(*defined) + ", not " + std::to_string(p_max));
    WienerDiagnostics d;
    d.first_block = 1;
    double sum = 0.0;
    for (int p = 1; p <= p_max; ++p) {
        const std::uint64_t cap = spec.slice(p).capacity();
        const double term = std::ldexp(static_cast<double>(cap), -p);
        sum += term;
        d.block_capacities.push_back(cap);
        d.terms.push_back(term);
        d.partial_sums.push_back(sum);
    }
    return d;
}

namespace {

struct Rule {
    Verdict verdict;
    std::string rationale;
};

Rule schedule_rule(const ThresholdSchedule& s) {
    using Family = ThresholdSchedule::Family;
    switch (s.family()) {
        case Family::Constant: {
            const int c = s.constant_value();
            return {Verdict::Thick, "constant threshold s_p = " + std::to_string(c) +
                                        ": block terms tend to (c+1) 2^-c > 0, so the series diverges"};
        }
        case Family::FloorLog2:
            return {Verdict::Thick,
                    "s_p = floor(log2 p): sum s_p 2^-s_p diverges like sum log2(p) / p"};
        case Family::Linear: {
            const double a = s.slope();
            if (a == 0.0)
                return {Verdict::Thick, "s_p = 0: the set is every block, each term equals 1"};
            if (a > 1.0)
                return {Verdict::Thin,
                        "s_p = floor(a p) with a > 1 exceeds p + 1 eventually: finitely many members"};
            return {Verdict::Thin,
                    "s_p = floor(a p) with 0 < a <= 1: sum s_p 2^-s_p converges geometrically"};
        }
        case Family::Table:
            return {Verdict::Unknown,
                    "table schedule: finitely many thresholds cannot decide an infinite series"};
    }
    return {Verdict::Unknown, ""};
}

Rule rule_for(const IndexSetSpec& spec) {
    using Kind = IndexSetSpec::Kind;
    switch (spec.kind()) {
        case Kind::All:
            return {Verdict::Thick, "every block term equals 2^-p C(K_p) = 1"};
        case Kind::Explicit:
        case Kind::Block:
            return {Verdict::Thin, "finite set"};
        case Kind::Mersenne:
            return {Verdict::Thin, "block terms (p+1) 2^-p sum to 3"};
        case Kind::NuThreshold:
            return schedule_rule(spec.schedule());
        case Kind::Union: {
            const Rule a = rule_for(spec.left());
            const Rule b = rule_for(spec.right());
            if (a.verdict == Verdict::Thick || b.verdict == Verdict::Thick)
                return {Verdict::Thick, "union containing a thick set is thick (capacity is monotone)"};
            if (a.verdict == Verdict::Thin && b.verdict == Verdict::Thin)
                return {Verdict::Thin, "finite union of thin sets is thin"};
            return {Verdict::Unknown, "union of thin and undecided operands"};
        }
        case Kind::Minus: {
            const Rule a = rule_for(spec.left());
            const Rule b = rule_for(spec.right());
            if (a.verdict == Verdict::Thin)
                return {Verdict::Thin, "subset of a thin set is thin (capacity is monotone)"};
            if (a.verdict == Verdict::Thick && b.verdict == Verdict::Thin)
                return {Verdict::Thick, "thick set minus a thin set is thick"};
            return {Verdict::Unknown, "difference with a thick or undecided subtrahend"};
        }
    }
    return {Verdict::Unknown, ""};
}

}  // namespace

Classification classify(const IndexSetSpec& spec, int evidence_blocks) {
    Classification c;
    Rule r = rule_for(spec);
    c.verdict = r.verdict;
    c.rationale = std::move(r.rationale);
    int blocks = std::clamp(evidence_blocks, 0, kMaxBlock);
    if (const auto defined = spec.last_defined_block()) blocks = std::min(blocks, *defined);
    if (blocks >= 1) c.evidence = wiener_partial_sums(spec, blocks);
    return c;
}

Capacity capacity(const IndexSetSpec& spec) {
    if (const auto bound = spec.support_bound()) {
        std::uint64_t total = 0;
        for (int p = 0; p <= *bound; ++p) total += spec.slice(p).capacity();
        return Capacity::finite(total);
    }
    if (spec.eventually_contains_mersenne() == true) return Capacity::infinite();
    throw CapabilityRefused("capacity: cannot decide whether C(" + spec.to_string() + ") is finite");
}

}  // namespace capdiff

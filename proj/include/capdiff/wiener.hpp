#pragma once

// Wiener-type series sum_p 2^{-p} C(E cap K_p) and thin/thick verdicts.

#include <string>
#include <vector>

#include "capdiff/bitcap.hpp"
#include "capdiff/setspec.hpp"

namespace capdiff {

struct WienerDiagnostics {
    int first_block = 1;
    // terms[i] and partial_sums[i] belong to block first_block + i.
    std::vector<double> terms;
    std::vector<double> partial_sums;
    std::vector<std::uint64_t> block_capacities;

    int last_block() const { return first_block + static_cast<int>(terms.size()) - 1; }
};

enum class Verdict { Thin, Thick, Unknown };

std::string to_string(Verdict v);

struct Classification {
    Verdict verdict = Verdict::Unknown;
    WienerDiagnostics evidence;
    std::string rationale;
};

// Terms for p = 1..p_max, p_max in [1, kMaxBlock]. Every slice is evaluated
// in closed form; throws CapabilityRefused when a table schedule ends
// before p_max.
WienerDiagnostics wiener_partial_sums(const IndexSetSpec& spec, int p_max);

// Exact verdict where a rule applies, Unknown otherwise. The evidence covers
// blocks 1..evidence_blocks (fewer if a table schedule ends earlier).
Classification classify(const IndexSetSpec& spec, int evidence_blocks = 30);

// C(E) for a symbolic set: exact when the support is bounded, infinite when
// the set holds all large 2^m - 1. Throws CapabilityRefused otherwise.
Capacity capacity(const IndexSetSpec& spec);

}  // namespace capdiff

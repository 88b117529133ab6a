#pragma once

// Symbolic subsets of the natural numbers, evaluated block by block.
//
// Text grammar (left-associative, at most 8 operators):
//
//   spec  := term (('+' | '-') term)*
//   term  := '(' spec ')' | all | mersenne | block:P | explicit:K1,K2,...
//          | nu>=const:C | nu>=log2 | nu>=linear:A | nu>=table:FILE
//
// '+' is union and '-' is difference. A table path runs up to the next
// whitespace, so an operator following a table term must be preceded by a
// space. Table files hold whitespace- or comma-separated s_1, s_2, ... with
// '#' starting a comment.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace capdiff {

// The per-block threshold sequence s_p (p >= 1) of a nu-threshold set.
class ThresholdSchedule {
public:
    enum class Family { Constant, FloorLog2, Linear, Table };

    static ThresholdSchedule constant(int c);
    static ThresholdSchedule floor_log2();
    // s_p = floor(a * p); a >= 0.
    static ThresholdSchedule linear(double a);
    // values[i] is s_{i+1}; the schedule is undefined past the last entry.
    static ThresholdSchedule table(std::vector<int> values, std::string source = {});

    Family family() const { return family_; }
    int constant_value() const { return constant_; }
    double slope() const { return slope_; }
    const std::vector<int>& table_values() const { return table_; }

    // s_p before clamping. Throws CapabilityRefused past a table's range.
    int at(int p) const;
    // Last block with a defined threshold; nullopt when defined everywhere.
    std::optional<int> last_defined_block() const;

    std::string to_string() const;

private:
    Family family_ = Family::Constant;
    int constant_ = 0;
    double slope_ = 0.0;
    std::vector<int> table_;
    std::string source_;
};

// A subset of one dyadic block K_p, stored as the union of whole
// nu-classes plus a sorted list of extra members, minus a sorted list of
// removed members. Union and difference are closed over this form.
class BlockSlice {
public:
    static BlockSlice empty(int p);
    static BlockSlice whole(int p);
    // {k in K_p : nu(k) >= s}; empty for s > p + 1.
    static BlockSlice nu_at_least(int p, int s);
    // Members outside K_p are ignored.
    static BlockSlice finite(int p, std::span<const std::uint64_t> members);

    int block() const { return p_; }
    bool contains(std::uint64_t k) const;
    std::uint64_t count() const;
    // Members k <= m.
    std::uint64_t count_up_to(std::uint64_t m) const;
    std::uint64_t capacity() const;
    std::vector<std::uint64_t> members() const;

    friend BlockSlice unite(const BlockSlice& a, const BlockSlice& b);
    friend BlockSlice subtract(const BlockSlice& a, const BlockSlice& b);

private:
    explicit BlockSlice(int p) : p_(p) {}
    bool class_included(int v) const { return v <= 63 && ((nu_mask_ >> v) & 1U) != 0; }
    static BlockSlice combine(const BlockSlice& a, const BlockSlice& b, std::uint64_t mask,
                              bool (*keep)(bool, bool));

    int p_;
    std::uint64_t nu_mask_ = 0;
    std::vector<std::uint64_t> extra_;
    std::vector<std::uint64_t> removed_;
};

class IndexSetSpec {
public:
    static constexpr int kMaxDepth = 8;

    enum class Kind { All, Explicit, Block, Mersenne, NuThreshold, Union, Minus };

    static IndexSetSpec all();
    static IndexSetSpec mersenne();
    static IndexSetSpec block(int p);
    // Strictly increasing, all members >= 1.
    static IndexSetSpec explicit_set(std::vector<std::uint64_t> members);
    static IndexSetSpec nu_threshold(ThresholdSchedule schedule);

    friend IndexSetSpec operator+(const IndexSetSpec& a, const IndexSetSpec& b);
    friend IndexSetSpec operator-(const IndexSetSpec& a, const IndexSetSpec& b);

    Kind kind() const;
    int depth() const;
    // Operands of Union / Minus.
    const IndexSetSpec& left() const;
    const IndexSetSpec& right() const;
    const std::vector<std::uint64_t>& explicit_members() const;
    int block_index() const;
    const ThresholdSchedule& schedule() const;

    bool contains(std::uint64_t k) const;
    BlockSlice slice(int p) const;

    // Largest block whose slice is defined (table schedules); nullopt if unbounded.
    std::optional<int> last_defined_block() const;
    // Some block index beyond which every slice is empty, if one is known.
    std::optional<int> support_bound() const;
    // Whether 2^{p+1}-1 belongs to the set for all large p: true/false, or
    // nullopt when that cannot be decided symbolically.
    std::optional<bool> eventually_contains_mersenne() const;

    std::string to_string() const;

private:
    struct Node;
    explicit IndexSetSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Exact |E cap [1, m]| / m, unreduced.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    Ratio reduced() const;
    friend bool operator==(const Ratio& a, const Ratio& b);
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);
};

struct DensityReport {
    std::string set;
    std::vector<std::uint64_t> points;
    std::vector<Ratio> rho;
};

struct EnumerationLimits {
    // Blocks up to this index are always listed in full.
    int max_block = 30;
    // Beyond max_block a block is still listed when it has at most this many members.
    std::uint64_t sparse_members = std::uint64_t{1} << 20;
};

std::vector<std::uint64_t> members_in_block(const IndexSetSpec& spec, int p,
                                            const EnumerationLimits& limits = {});
std::uint64_t block_count(const IndexSetSpec& spec, int p);
Ratio density(const IndexSetSpec& spec, std::uint64_t m);
DensityReport density_report(const IndexSetSpec& spec, std::span<const std::uint64_t> points);
// m = 2^4, 2^6, ..., 2^24.
std::vector<std::uint64_t> default_density_points();

// Table schedule s_p = max{s >= 0 : 2^{-s} >= delta(2^{p+1})}, clamped to
// [0, p], for p = 1..p_max. delta must be nonincreasing with values in (0, 1];
// it is probed on 1..2^16 and at every block edge.
ThresholdSchedule slow_density_schedule(const std::function<double(std::uint64_t)>& delta,
                                        int p_max);

// Parses the text grammar. Relative table paths resolve against base_dir.
IndexSetSpec parse_spec(std::string_view text, const std::string& base_dir = {});
ThresholdSchedule load_table_schedule(const std::string& path);

}  // namespace capdiff

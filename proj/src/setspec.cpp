#include "capdiff/setspec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "capdiff/bitcap.hpp"
#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"

namespace capdiff {

// ---------------------------------------------------------------------------
// ThresholdSchedule

ThresholdSchedule ThresholdSchedule::constant(int c) {
    if (c < 0) throw InvalidArgument("threshold schedule: constant must be >= 0");
    ThresholdSchedule s;
    s.family_ = Family::Constant;
    s.constant_ = c;
    return s;
}

ThresholdSchedule ThresholdSchedule::floor_log2() {
    ThresholdSchedule s;
    s.family_ = Family::FloorLog2;
    return s;
}

ThresholdSchedule ThresholdSchedule::linear(double a) {
    if (!std::isfinite(a) || a < 0.0 || a > 1e6)
        throw InvalidArgument("threshold schedule: slope must be in [0, 1e6]");
    ThresholdSchedule s;
    s.family_ = Family::Linear;
    s.slope_ = a;
    return s;
}

ThresholdSchedule ThresholdSchedule::table(std::vector<int> values, std::string source) {
    if (values.empty()) throw InvalidArgument("threshold schedule: table is empty");
    if (std::any_of(values.begin(), values.end(), [](int v) { return v < 0; }))
        throw InvalidArgument("threshold schedule: table values must be >= 0");
    ThresholdSchedule s;
    s.family_ = Family::Table;
    s.table_ = std::move(values);
    s.source_ = std::move(source);
    return s;
}

int ThresholdSchedule::at(int p) const {
    if (p < 1) throw InvalidArgument("threshold schedule: block index must be >= 1");
    switch (family_) {
        case Family::Constant:
            return constant_;
        case Family::FloorLog2:
            return bits::block_of(static_cast<std::uint64_t>(p));
        case Family::Linear:
            return static_cast<int>(std::floor(slope_ * p));
        case Family::Table:
            if (static_cast<std::size_t>(p) > table_.size())
                throw CapabilityRefused("threshold table " + to_string() + " ends at block " +
                                        std::to_string(table_.size()) + "; block " +
                                        std::to_string(p) + " requested");
            return table_[static_cast<std::size_t>(p - 1)];
    }
    return 0;
}

std::optional<int> ThresholdSchedule::last_defined_block() const {
    if (family_ == Family::Table) return static_cast<int>(table_.size());
    return std::nullopt;
}

std::string ThresholdSchedule::to_string() const {
    switch (family_) {
        case Family::Constant:
            return "nu>=const:" + std::to_string(constant_);
        case Family::FloorLog2:
            return "nu>=log2";
        case Family::Linear: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", slope_);
            return std::string("nu>=linear:") + buf;
        }
        case Family::Table:
            return "nu>=table:" +
                   (source_.empty() ? "<" + std::to_string(table_.size()) + " values>" : source_);
    }
    return {};
}

// ---------------------------------------------------------------------------
// BlockSlice

namespace {

void check_block(int p) {
    if (p < 0 || p > kMaxBlock)
        throw InvalidArgument("block index " + std::to_string(p) + " outside [0, " +
                              std::to_string(kMaxBlock) + "]");
}

std::uint64_t classes_from(int first, int p) {
    // Bits first..p+1 (p + 2 <= 64).
    const int top = p + 2;
    const std::uint64_t upto = top >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << top) - 1;
    return upto & ~((std::uint64_t{1} << first) - 1);
}

// #{y in [0, x] : y = r mod 2^shift}
std::uint64_t count_residue(std::uint64_t x, std::uint64_t r, int shift) {
    if (x < r) return 0;
    return ((x - r) >> shift) + 1;
}

}  // namespace

BlockSlice BlockSlice::empty(int p) {
    check_block(p);
    return BlockSlice(p);
}

BlockSlice BlockSlice::whole(int p) { return nu_at_least(p, 0); }

BlockSlice BlockSlice::nu_at_least(int p, int s) {
    check_block(p);
    if (s < 0) throw InvalidArgument("nu_at_least: threshold must be >= 0");
    BlockSlice b(p);
    if (s <= p + 1) b.nu_mask_ = classes_from(s, p);
    return b;
}

BlockSlice BlockSlice::finite(int p, std::span<const std::uint64_t> members) {
    check_block(p);
    BlockSlice b(p);
    for (const std::uint64_t k : members)
        if (k >= bits::block_begin(p) && k < bits::block_end(p)) b.extra_.push_back(k);
    std::sort(b.extra_.begin(), b.extra_.end());
    b.extra_.erase(std::unique(b.extra_.begin(), b.extra_.end()), b.extra_.end());
    return b;
}

bool BlockSlice::contains(std::uint64_t k) const {
    if (k < bits::block_begin(p_) || k >= bits::block_end(p_)) return false;
    if (std::binary_search(extra_.begin(), extra_.end(), k)) return true;
    if (std::binary_search(removed_.begin(), removed_.end(), k)) return false;
    return class_included(bits::trailing_ones(k));
}

std::uint64_t BlockSlice::count() const {
    std::uint64_t total = 0;
    for (int v = 0; v <= p_ + 1; ++v)
        if (class_included(v)) total += count_with_trailing_ones(p_, v);
    return total + extra_.size() - removed_.size();
}

std::uint64_t BlockSlice::count_up_to(std::uint64_t m) const {
    const std::uint64_t lo = bits::block_begin(p_);
    const std::uint64_t last = bits::block_end(p_) - 1;
    if (m < lo) return 0;
    if (m >= last) return count();
    std::uint64_t total = 0;
    // m < 2^{p+1} - 1 here, so the nu = p + 1 class contributes nothing.
    for (int v = 0; v <= p_ - 1; ++v) {
        if (!class_included(v)) continue;
        const std::uint64_t r = (std::uint64_t{1} << v) - 1;
        total += count_residue(m, r, v + 1) - count_residue(lo - 1, r, v + 1);
    }
    total += static_cast<std::uint64_t>(std::upper_bound(extra_.begin(), extra_.end(), m) - extra_.begin());
    total -= static_cast<std::uint64_t>(std::upper_bound(removed_.begin(), removed_.end(), m) - removed_.begin());
    return total;
}

std::uint64_t BlockSlice::capacity() const {
    std::uint64_t total = 0;
    for (int v = 1; v <= p_ + 1; ++v)
        if (class_included(v)) total += static_cast<std::uint64_t>(v) * count_with_trailing_ones(p_, v);
    for (const std::uint64_t k : extra_) total += static_cast<std::uint64_t>(bits::trailing_ones(k));
    for (const std::uint64_t k : removed_) total -= static_cast<std::uint64_t>(bits::trailing_ones(k));
    return total;
}

std::vector<std::uint64_t> BlockSlice::members() const {
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(count()));
    const std::uint64_t lo = bits::block_begin(p_);
    for (int v = 0; v <= p_ - 1; ++v) {
        if (!class_included(v)) continue;
        const std::uint64_t low = (std::uint64_t{1} << v) - 1;
        const std::uint64_t n = std::uint64_t{1} << (p_ - 1 - v);
        for (std::uint64_t h = 0; h < n; ++h) out.push_back(lo + (h << (v + 1)) + low);
    }
    if (class_included(p_ + 1)) out.push_back(bits::block_end(p_) - 1);
    std::sort(out.begin(), out.end());
    if (!removed_.empty()) {
        std::vector<std::uint64_t> kept;
        kept.reserve(out.size());
        std::set_difference(out.begin(), out.end(), removed_.begin(), removed_.end(),
                            std::back_inserter(kept));
        out.swap(kept);
    }
    if (!extra_.empty()) {
        std::vector<std::uint64_t> merged;
        merged.reserve(out.size() + extra_.size());
        std::merge(out.begin(), out.end(), extra_.begin(), extra_.end(), std::back_inserter(merged));
        out.swap(merged);
    }
    return out;
}

BlockSlice BlockSlice::combine(const BlockSlice& a, const BlockSlice& b, std::uint64_t mask,
                               bool (*keep)(bool, bool)) {
    if (a.p_ != b.p_) throw InvalidArgument("BlockSlice: operands belong to different blocks");
    BlockSlice out(a.p_);
    out.nu_mask_ = mask;
    // Away from the listed exceptions both operands follow their nu-classes,
    // so the result can only deviate from `mask` at these points.
    std::vector<std::uint64_t> candidates;
    candidates.reserve(a.extra_.size() + a.removed_.size() + b.extra_.size() + b.removed_.size());
    for (const auto* list : {&a.extra_, &a.removed_, &b.extra_, &b.removed_})
        candidates.insert(candidates.end(), list->begin(), list->end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const std::uint64_t k : candidates) {
        const bool in = keep(a.contains(k), b.contains(k));
        const bool by_class = out.class_included(bits::trailing_ones(k));
        if (in && !by_class) out.extra_.push_back(k);
        if (!in && by_class) out.removed_.push_back(k);
    }
    return out;
}

BlockSlice unite(const BlockSlice& a, const BlockSlice& b) {
    return BlockSlice::combine(a, b, a.nu_mask_ | b.nu_mask_, [](bool x, bool y) { return x || y; });
}

BlockSlice subtract(const BlockSlice& a, const BlockSlice& b) {
    return BlockSlice::combine(a, b, a.nu_mask_ & ~b.nu_mask_, [](bool x, bool y) { return x && !y; });
}

// ---------------------------------------------------------------------------
// IndexSetSpec

struct IndexSetSpec::Node {
    Kind kind = Kind::All;
    std::vector<std::uint64_t> members;
    int block = 0;
    ThresholdSchedule schedule;
    std::optional<IndexSetSpec> left;
    std::optional<IndexSetSpec> right;
    int depth = 0;
};

IndexSetSpec IndexSetSpec::all() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::All;
    return IndexSetSpec(std::move(n));
}

IndexSetSpec IndexSetSpec::mersenne() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Mersenne;
    return IndexSetSpec(std::move(n));
}

IndexSetSpec IndexSetSpec::block(int p) {
    check_block(p);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Block;
    n->block = p;
    return IndexSetSpec(std::move(n));
}

IndexSetSpec IndexSetSpec::explicit_set(std::vector<std::uint64_t> members) {
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i] == 0) throw InvalidArgument("explicit set: members must be >= 1");
        if (members[i] >= bits::block_end(kMaxBlock))
            throw InvalidArgument("explicit set: member exceeds 2^63 - 1");
        if (i > 0 && members[i] <= members[i - 1])
            throw InvalidArgument("explicit set: members must be strictly increasing");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Explicit;
    n->members = std::move(members);
    return IndexSetSpec(std::move(n));
}

IndexSetSpec IndexSetSpec::nu_threshold(ThresholdSchedule schedule) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::NuThreshold;
    n->schedule = std::move(schedule);
    return IndexSetSpec(std::move(n));
}

namespace {

IndexSetSpec::Kind binary_kind(bool is_union) {
    return is_union ? IndexSetSpec::Kind::Union : IndexSetSpec::Kind::Minus;
}

}  // namespace

IndexSetSpec operator+(const IndexSetSpec& a, const IndexSetSpec& b) {
    auto n = std::make_shared<IndexSetSpec::Node>();
    n->kind = binary_kind(true);
    n->depth = 1 + std::max(a.depth(), b.depth());
    if (n->depth > IndexSetSpec::kMaxDepth)
        throw InvalidArgument("set spec nests deeper than " + std::to_string(IndexSetSpec::kMaxDepth));
    n->left = a;
    n->right = b;
    return IndexSetSpec(std::move(n));
}

IndexSetSpec operator-(const IndexSetSpec& a, const IndexSetSpec& b) {
    auto n = std::make_shared<IndexSetSpec::Node>();
    n->kind = binary_kind(false);
    n->depth = 1 + std::max(a.depth(), b.depth());
    if (n->depth > IndexSetSpec::kMaxDepth)
        throw InvalidArgument("set spec nests deeper than " + std::to_string(IndexSetSpec::kMaxDepth));
    n->left = a;
    n->right = b;
    return IndexSetSpec(std::move(n));
}

IndexSetSpec::Kind IndexSetSpec::kind() const { return node_->kind; }
int IndexSetSpec::depth() const { return node_->depth; }

const IndexSetSpec& IndexSetSpec::left() const {
    if (!node_->left) throw InvalidArgument("IndexSetSpec::left: not a union or difference");
    return *node_->left;
}

const IndexSetSpec& IndexSetSpec::right() const {
    if (!node_->right) throw InvalidArgument("IndexSetSpec::right: not a union or difference");
    return *node_->right;
}

const std::vector<std::uint64_t>& IndexSetSpec::explicit_members() const { return node_->members; }
int IndexSetSpec::block_index() const { return node_->block; }
const ThresholdSchedule& IndexSetSpec::schedule() const { return node_->schedule; }

bool IndexSetSpec::contains(std::uint64_t k) const {
    if (k == 0) return false;
    switch (node_->kind) {
        case Kind::All:
            return true;
        case Kind::Explicit:
            return std::binary_search(node_->members.begin(), node_->members.end(), k);
        case Kind::Block:
            return bits::block_of(k) == node_->block;
        case Kind::Mersenne:
            return (k & (k + 1)) == 0;
        case Kind::NuThreshold: {
            const int p = bits::block_of(k);
            return p >= 1 && bits::trailing_ones(k) >= node_->schedule.at(p);
        }
        case Kind::Union:
            return left().contains(k) || right().contains(k);
        case Kind::Minus:
            return left().contains(k) && !right().contains(k);
    }
    return false;
}

BlockSlice IndexSetSpec::slice(int p) const {
    check_block(p);
    switch (node_->kind) {
        case Kind::All:
            return BlockSlice::whole(p);
        case Kind::Explicit:
            return BlockSlice::finite(p, node_->members);
        case Kind::Block:
            return node_->block == p ? BlockSlice::whole(p) : BlockSlice::empty(p);
        case Kind::Mersenne:
            return BlockSlice::nu_at_least(p, p + 1);
        case Kind::NuThreshold:
            if (p == 0) return BlockSlice::empty(p);
            return BlockSlice::nu_at_least(p, node_->schedule.at(p));
        case Kind::Union:
            return unite(left().slice(p), right().slice(p));
        case Kind::Minus:
            return subtract(left().slice(p), right().slice(p));
    }
    return BlockSlice::empty(p);
}

std::optional<int> IndexSetSpec::last_defined_block() const {
    switch (node_->kind) {
        case Kind::NuThreshold:
            return node_->schedule.last_defined_block();
        case Kind::Union:
        case Kind::Minus: {
            const auto a = left().last_defined_block();
            const auto b = right().last_defined_block();
            if (a && b) return std::min(*a, *b);
            return a ? a : b;
        }
        default:
            return std::nullopt;
    }
}

std::optional<int> IndexSetSpec::support_bound() const {
    switch (node_->kind) {
        case Kind::All:
        case Kind::Mersenne:
            return std::nullopt;
        case Kind::Explicit:
            return node_->members.empty() ? 0 : bits::block_of(node_->members.back());
        case Kind::Block:
            return node_->block;
        case Kind::NuThreshold: {
            const auto& s = node_->schedule;
            if (s.family() != ThresholdSchedule::Family::Linear || s.slope() <= 1.0) return std::nullopt;
            // floor(a p) >= p + 2 exactly when p >= 2 / (a - 1).
            const double first_empty = std::ceil(2.0 / (s.slope() - 1.0));
            if (first_empty > kMaxBlock + 1) return std::nullopt;
            return std::max(0, static_cast<int>(first_empty) - 1);
        }
        case Kind::Union: {
            const auto a = left().support_bound();
            const auto b = right().support_bound();
            if (a && b) return std::max(*a, *b);
            return std::nullopt;
        }
        case Kind::Minus:
            return left().support_bound();
    }
    return std::nullopt;
}

std::optional<bool> IndexSetSpec::eventually_contains_mersenne() const {
    switch (node_->kind) {
        case Kind::All:
        case Kind::Mersenne:
            return true;
        case Kind::Explicit:
        case Kind::Block:
            return false;
        case Kind::NuThreshold: {
            const auto& s = node_->schedule;
            switch (s.family()) {
                case ThresholdSchedule::Family::Constant:
                case ThresholdSchedule::Family::FloorLog2:
                    return true;
                case ThresholdSchedule::Family::Linear:
                    return s.slope() <= 1.0;
                case ThresholdSchedule::Family::Table:
                    return std::nullopt;
            }
            return std::nullopt;
        }
        case Kind::Union: {
            const auto a = left().eventually_contains_mersenne();
            const auto b = right().eventually_contains_mersenne();
            if ((a && *a) || (b && *b)) return true;
            if (a && b) return false;
            return std::nullopt;
        }
        case Kind::Minus: {
            const auto a = left().eventually_contains_mersenne();
            const auto b = right().eventually_contains_mersenne();
            if ((a && !*a) || (b && *b)) return false;
            if (a && b) return true;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::string IndexSetSpec::to_string() const {
    switch (node_->kind) {
        case Kind::All:
            return "all";
        case Kind::Mersenne:
            return "mersenne";
        case Kind::Block:
            return "block:" + std::to_string(node_->block);
        case Kind::Explicit: {
            std::string out = "explicit:";
            for (std::size_t i = 0; i < node_->members.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(node_->members[i]);
            }
            return out;
        }
        case Kind::NuThreshold:
            return node_->schedule.to_string();
        case Kind::Union:
        case Kind::Minus: {
            const char* op = node_->kind == Kind::Union ? " + " : " - ";
            const bool wrap = right().depth() > 0;
            return left().to_string() + op + (wrap ? "(" : "") + right().to_string() + (wrap ? ")" : "");
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Ratio

__extension__ typedef unsigned __int128 uint128;

Ratio Ratio::reduced() const {
    const std::uint64_t g = std::gcd(num, den);
    return g == 0 ? *this : Ratio{num / g, den / g};
}

bool operator==(const Ratio& a, const Ratio& b) {
    return static_cast<uint128>(a.num) * b.den == static_cast<uint128>(b.num) * a.den;
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    return static_cast<uint128>(a.num) * b.den <=> static_cast<uint128>(b.num) * a.den;
}

// ---------------------------------------------------------------------------
// Block-level queries

std::vector<std::uint64_t> members_in_block(const IndexSetSpec& spec, int p,
                                            const EnumerationLimits& limits) {
    const BlockSlice s = spec.slice(p);
    if (p > limits.max_block && s.count() > limits.sparse_members)
        throw CapabilityRefused("members_in_block: block " + std::to_string(p) + " of " +
                                spec.to_string() + " holds " + std::to_string(s.count()) +
                                " members; enumeration is limited to blocks <= " +
                                std::to_string(limits.max_block));
    return s.members();
}

std::uint64_t block_count(const IndexSetSpec& spec, int p) { return spec.slice(p).count(); }

Ratio density(const IndexSetSpec& spec, std::uint64_t m) {
    if (m == 0) throw InvalidArgument("density: m must be >= 1");
    if (m >= bits::block_end(kMaxBlock)) throw InvalidArgument("density: m exceeds 2^63 - 1");
    std::uint64_t count = 0;
    const int top = bits::block_of(m);
    for (int p = 0; p <= top; ++p) count += spec.slice(p).count_up_to(m);
    return Ratio{count, m};
}

DensityReport density_report(const IndexSetSpec& spec, std::span<const std::uint64_t> points) {
    DensityReport r;
    r.set = spec.to_string();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && points[i] <= points[i - 1])
            throw InvalidArgument("density_report: sample points must be increasing");
        r.points.push_back(points[i]);
        r.rho.push_back(density(spec, points[i]));
    }
    return r;
}

std::vector<std::uint64_t> default_density_points() {
    std::vector<std::uint64_t> pts;
    for (int e = 4; e <= 24; e += 2) pts.push_back(std::uint64_t{1} << e);
    return pts;
}

ThresholdSchedule slow_density_schedule(const std::function<double(std::uint64_t)>& delta, int p_max) {
    if (p_max < 1 || p_max > kMaxBlock - 1)
        throw InvalidArgument("slow_density_schedule: p_max out of range");
    std::vector<std::uint64_t> probes;
    for (std::uint64_t m = 1; m <= (std::uint64_t{1} << 16); ++m) probes.push_back(m);
    for (int p = 16; p <= p_max; ++p) probes.push_back(bits::block_end(p));
    double prev = 1.0;
    for (const std::uint64_t m : probes) {
        const double d = delta(m);
        if (!(d > 0.0 && d <= 1.0))
            throw InvalidArgument("slow_density_schedule: delta(" + std::to_string(m) + ") outside (0, 1]");
        if (d > prev)
            throw InvalidArgument("slow_density_schedule: delta increases at m = " + std::to_string(m));
        prev = d;
    }
    std::vector<int> values;
    for (int p = 1; p <= p_max; ++p) {
        const double target = delta(bits::block_end(p));
        int s = 0;
        while (s < p && std::ldexp(1.0, -(s + 1)) >= target) ++s;
        values.push_back(s);
    }
    return ThresholdSchedule::table(std::move(values), "slow-density");
}

}  // namespace capdiff

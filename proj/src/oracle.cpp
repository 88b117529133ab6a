#include "capdiff/oracle.hpp"

#include <array>
#include <cstdlib>
#include <string>

#include "capdiff/error.hpp"

namespace capdiff::oracle {

namespace {

// Walks every window x_0..x_k depth first. diag[j] holds the right edge of
// the difference triangle after x_j: diag[j][i] is the order-i difference
// ending at x_j, so diag[k][k] is the apex.
class WindowWalker {
public:
    WindowWalker(const TransitionMatrix& t, std::array<double, 2> start, int k)
        : t_(t), start_(start), k_(k) {}

    double run() {
        total_ = 0.0;
        visit(0, 0, 1.0);
        return total_;
    }

private:
    void visit(int j, int prev, double prob) {
        for (int x = 0; x <= 1; ++x) {
            const double pr = j == 0 ? start_[static_cast<std::size_t>(x)] : prob * t_(prev, x);
            if (pr == 0.0) continue;
            auto& d = diag_[static_cast<std::size_t>(j)];
            d[0] = x;
            for (int i = 1; i <= j; ++i)
                d[static_cast<std::size_t>(i)] =
                    std::abs(d[static_cast<std::size_t>(i - 1)] - diag_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)]);
            if (j == k_) {
                if (d[static_cast<std::size_t>(k_)] == 1) total_ += pr;
            } else {
                visit(j + 1, x, pr);
            }
        }
    }

    const TransitionMatrix& t_;
    std::array<double, 2> start_;
    int k_;
    double total_ = 0.0;
    std::array<std::array<int, kMaxBruteOrder + 1>, kMaxBruteOrder + 1> diag_{};
};

}  // namespace

double brute_joint_prob(const ChainModel& model, std::uint64_t n, int k) {
    if (k < 0 || k > kMaxBruteOrder)
        throw InvalidArgument("brute_joint_prob: k must be in [0, " + std::to_string(kMaxBruteOrder) + "]");
    if (n > kMaxBruteTime)
        throw InvalidArgument("brute_joint_prob: n must be <= " + std::to_string(kMaxBruteTime));
    const auto& t = model.transition;
    std::array<double, 2> mu{model.initial[0], model.initial[1]};
    for (std::uint64_t step = 0; step < n; ++step) {
        std::array<double, 2> next{0.0, 0.0};
        for (int x = 0; x <= 1; ++x)
            for (int y = 0; y <= 1; ++y) next[static_cast<std::size_t>(y)] += mu[static_cast<std::size_t>(x)] * t(x, y);
        mu = next;
    }
    return WindowWalker(t, mu, k).run();
}

std::uint64_t ParityRow::leading_odd() const {
    std::uint64_t n = 0;
    while (n < parities.size() && parities[n] == 1) ++n;
    return n;
}

std::vector<std::uint64_t> ParityRow::support() const {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < parities.size(); ++i)
        if (parities[i] == 1) out.push_back(i);
    return out;
}

void for_each_pascal_parity_row(std::uint64_t k_max, const std::function<void(const ParityRow&)>& fn) {
    if (k_max > kMaxPascalRow)
        throw InvalidArgument("Pascal parity rows are limited to k <= " + std::to_string(kMaxPascalRow));
    ParityRow row;
    row.k = 0;
    row.parities = {1};
    fn(row);
    for (std::uint64_t r = 1; r <= k_max; ++r) {
        ParityRow next;
        next.k = r;
        next.parities.assign(r + 1, 0);
        next.parities[0] = 1;
        next.parities[r] = 1;
        for (std::uint64_t i = 1; i < r; ++i)
            next.parities[i] = static_cast<std::uint8_t>((row.parities[i - 1] + row.parities[i]) % 2);
        row = std::move(next);
        fn(row);
    }
}

ParityRow brute_pascal_row_parity(std::uint64_t k) {
    ParityRow out;
    for_each_pascal_parity_row(k, [&](const ParityRow& row) {
        if (row.k == k) out = row;
    });
    return out;
}

int brute_trailing_ones(std::uint64_t k) {
    if (k == 0) throw InvalidArgument("brute_trailing_ones: k must be >= 1");
    int count = 0;
    while (k % 2 == 1) {
        ++count;
        k /= 2;
    }
    return count;
}

std::uint64_t brute_block_capacity(int p, int s) {
    if (p < 0 || p > kMaxBruteBlock)
        throw InvalidArgument("brute_block_capacity: p must be in [0, " + std::to_string(kMaxBruteBlock) + "]");
    std::uint64_t total = 0;
    for (std::uint64_t k = std::uint64_t{1} << p; k < (std::uint64_t{2} << p); ++k) {
        const int nu = brute_trailing_ones(k);
        if (nu >= s) total += static_cast<std::uint64_t>(nu);
    }
    return total;
}

std::vector<std::uint64_t> brute_members_in_block(const IndexSetSpec& spec, int p) {
    if (p < 0 || p > 24) throw InvalidArgument("brute_members_in_block: p must be in [0, 24]");
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = std::uint64_t{1} << p; k < (std::uint64_t{2} << p); ++k)
        if (spec.contains(k)) out.push_back(k);
    return out;
}

std::uint64_t brute_count_up_to(const IndexSetSpec& spec, std::uint64_t m) {
    if (m > (std::uint64_t{1} << 26)) throw InvalidArgument("brute_count_up_to: m must be <= 2^26");
    std::uint64_t count = 0;
    for (std::uint64_t k = 1; k <= m; ++k)
        if (spec.contains(k)) ++count;
    return count;
}

}  // namespace capdiff::oracle

// capdiff: experiment runner for higher-order differences of a two-state
// chain. See README.md for the subcommands and the config format.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capdiff/bitcap.hpp"
#include "capdiff/diffengine.hpp"
#include "capdiff/error.hpp"
#include "capdiff/experiment.hpp"
#include "capdiff/oracle.hpp"

using namespace capdiff;
using nlohmann::json;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRefused = 3;

struct Overrides {
    std::string config;
    std::optional<double> p00, p11;
    std::vector<double> initial;
    std::optional<std::uint64_t> n;
    std::optional<std::string> spec;
    std::vector<int> blocks;
    std::vector<std::uint64_t> k;
    std::optional<std::uint64_t> trials, seed;
    std::optional<int> classify_blocks;
    std::vector<std::uint64_t> points;
    std::optional<std::string> output_dir;

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
        if (p00) cfg.p00 = *p00;
        if (p11) cfg.p11 = *p11;
        if (!initial.empty()) cfg.initial = {initial[0], initial[1]};
        if (n) cfg.n = *n;
        if (spec) {
            cfg.spec = *spec;
            cfg.base_dir.clear();
        }
        if (!blocks.empty()) {
            cfg.p_min = blocks[0];
            cfg.p_max = blocks[1];
        }
        if (!k.empty()) cfg.k_list = k;
        if (trials) cfg.mc_trials = *trials;
        if (seed) cfg.mc_seed = *seed;
        if (classify_blocks) cfg.classify_blocks = *classify_blocks;
        if (!points.empty()) cfg.density_points = points;
        if (output_dir) cfg.output_dir = *output_dir;
        return cfg;
    }
};

void add_chain_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--p00", o.p00, "pi(0,0)");
    cmd->add_option("--p11", o.p11, "pi(1,1)");
    cmd->add_option("--initial", o.initial, "initial law q0 q1")->expected(2);
    cmd->add_option("--n", o.n, "time index n");
}

void add_output_option(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--output-dir", o.output_dir, std::string("output directory (default $") + kOutputDirEnv +
                                                      " or results)");
}

void warn_condition(const ConditionEReport& c) {
    if (c.all_pass()) return;
    std::cerr << "warning: chain violates condition (E):";
    if (!c.positivity) std::cerr << " zero transition entry;";
    if (!c.asymmetry) std::cerr << " p00 == p11;";
    if (!c.nondegeneracy) std::cerr << " p00 + p11 == 1;";
    std::cerr << " results are reported anyway\n";
}

int cmd_converge(const Overrides& o) {
    const ExperimentConfig cfg = o.resolve();
    const ConvergenceResult result = run_convergence(cfg);
    warn_condition(result.condition);
    const std::string dir = resolve_output_dir(cfg);
    write_text_file(dir + "/convergence.csv", convergence_csv(result));
    write_text_file(dir + "/convergence_summary.json", convergence_summary(cfg, result).dump(2) + "\n");
    std::cout << "wrote " << result.records.size() << " rows to " << dir << "/convergence.csv\n";
    std::cout << "verdict for " << cfg.spec << ": " << to_string(result.classification.verdict) << "\n";
    for (const BlockSummary& b : result.blocks)
        std::cout << "  p=" << b.p << " count=" << b.count << " max_dev=" << format_double(b.max_deviation)
                  << " min_dev=" << format_double(b.min_deviation) << "\n";
    return 0;
}

int cmd_classify(const Overrides& o) {
    const ExperimentConfig cfg = o.resolve();
    const json report = run_classification(cfg);
    const std::string text = report.dump(2) + "\n";
    write_text_file(resolve_output_dir(cfg) + "/classification.json", text);
    std::cout << text;
    return 0;
}

int cmd_density(const Overrides& o) {
    const ExperimentConfig cfg = o.resolve();
    const std::string text = density_csv(run_density(cfg));
    write_text_file(resolve_output_dir(cfg) + "/density.csv", text);
    std::cout << text;
    return 0;
}

int cmd_exact(const Overrides& o, std::uint64_t k) {
    const ExperimentConfig cfg = o.resolve();
    const ChainModel model = cfg.model();
    warn_condition(check_condition_E(model.transition));
    const ExactProbability e = exact_prob(model, cfg.n, k);
    const json out = {{"k", k},
                      {"n", cfg.n},
                      {"p1", e.p1},
                      {"p0", e.p0()},
                      {"deviation", e.deviation()},
                      {"log2_deviation", e.log2_deviation()}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const Overrides& o, std::uint64_t k) {
    const ExperimentConfig cfg = o.resolve();
    const ChainModel model = cfg.model();
    const std::uint64_t trials = cfg.mc_trials == 0 ? 100000 : cfg.mc_trials;
    const McEstimate mc = mc_estimate(model, cfg.n, k, trials, cfg.mc_seed);
    const ExactProbability e = exact_prob(model, cfg.n, k);
    const json out = {{"k", k},
                      {"n", cfg.n},
                      {"trials", mc.trials},
                      {"seed", cfg.mc_seed},
                      {"estimate", mc.estimate},
                      {"standard_error", mc.standard_error},
                      {"p1_exact", e.p1},
                      {"z", mc.standard_error > 0 ? (mc.estimate - e.p1) / mc.standard_error : 0.0}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

// Fast paths against the brute-force references at small sizes.
int cmd_audit(const Overrides& o, int max_k) {
    const ExperimentConfig cfg = o.resolve();
    const ChainModel model = cfg.model();
    const IndexSetSpec spec = cfg.parsed_spec();
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << " " << detail << "\n";
        if (!ok) ++failures;
    };

    double worst = 0.0;
    for (std::uint64_t n = 0; n <= std::min<std::uint64_t>(cfg.n + 4, oracle::kMaxBruteTime); ++n)
        for (int k = 0; k <= max_k; ++k)
            worst = std::max(worst, std::abs(exact_prob(model, n, static_cast<std::uint64_t>(k)).p1 -
                                             oracle::brute_joint_prob(model, n, k)));
    report("exact_prob vs path enumeration", worst <= 1e-12, "max |diff| = " + format_double(worst));

    std::uint64_t bad_mu = 0;
    oracle::for_each_pascal_parity_row(1024, [&](const oracle::ParityRow& row) {
        if (row.k >= 1 && row.leading_odd() != pascal_mu(row.k)) ++bad_mu;
    });
    report("pascal_mu vs Pascal rows mod 2", bad_mu == 0, std::to_string(bad_mu) + " mismatches, 1 <= k <= 1024");

    std::uint64_t bad_cap = 0;
    for (int p = 0; p <= 12; ++p)
        for (int s = 0; s <= p + 2; ++s)
            if (block_capacity(p, s) != oracle::brute_block_capacity(p, s)) ++bad_cap;
    report("block_capacity vs enumeration", bad_cap == 0, std::to_string(bad_cap) + " mismatches, p <= 12");

    int bad_blocks = 0;
    int checked = 0;
    for (int p = 0; p <= 14; ++p) {
        if (const auto last = spec.last_defined_block(); last && p > *last) break;
        ++checked;
        if (members_in_block(spec, p) != oracle::brute_members_in_block(spec, p)) ++bad_blocks;
    }
    report("members_in_block vs membership test", bad_blocks == 0,
           std::to_string(bad_blocks) + " of " + std::to_string(checked) + " blocks differ for " + spec.to_string());

    return failures == 0 ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capdiff: higher-order differences of a two-state Markov chain"};
    app.require_subcommand(1);
    Overrides o;

    auto* converge = app.add_subcommand("converge", "exact deviations over spec cap blocks; writes CSV and JSON");
    add_chain_options(converge, o);
    converge->add_option("--spec", o.spec, "index set spec");
    converge->add_option("--blocks", o.blocks, "p_min p_max")->expected(2);
    converge->add_option("--k", o.k, "explicit orders (replaces --blocks)");
    converge->add_option("--trials", o.trials, "Monte Carlo trials per order (0 = off)");
    converge->add_option("--seed", o.seed, "Monte Carlo seed");
    converge->add_option("--classify-blocks", o.classify_blocks, "blocks of Wiener evidence");
    add_output_option(converge, o);

    auto* classify_cmd = app.add_subcommand("classify", "thin/thick verdict with Wiener partial sums");
    classify_cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    classify_cmd->add_option("--spec", o.spec, "index set spec");
    classify_cmd->add_option("--classify-blocks", o.classify_blocks, "blocks of Wiener evidence");
    add_output_option(classify_cmd, o);

    auto* density_cmd = app.add_subcommand("density", "exact density |E cap [1,m]| / m");
    density_cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    density_cmd->add_option("--spec", o.spec, "index set spec");
    density_cmd->add_option("--points", o.points, "sample points m");
    add_output_option(density_cmd, o);

    std::uint64_t k = 0;
    auto* exact_cmd = app.add_subcommand("exact", "P(xi_n^(k) = 1) for one order");
    add_chain_options(exact_cmd, o);
    exact_cmd->add_option("--k", k, "order")->required();

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate next to the exact value");
    add_chain_options(simulate_cmd, o);
    simulate_cmd->add_option("--k", k, "order")->required();
    simulate_cmd->add_option("--trials", o.trials, "trials (default 100000)");
    simulate_cmd->add_option("--seed", o.seed, "seed");

    int audit_k = 12;
    auto* audit_cmd = app.add_subcommand("audit", "compare fast paths with brute-force references");
    add_chain_options(audit_cmd, o);
    audit_cmd->add_option("--spec", o.spec, "index set spec for the block check");
    audit_cmd->add_option("--max-k", audit_k, "largest order for path enumeration")
        ->check(CLI::Range(0, oracle::kMaxBruteOrder));
    audit_cmd->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (!o.initial.empty() && o.initial.size() != 2) throw ConfigError("--initial takes two values");
        if (*converge) return cmd_converge(o);
        if (*classify_cmd) return cmd_classify(o);
        if (*density_cmd) return cmd_density(o);
        if (*exact_cmd) return cmd_exact(o, k);
        if (*simulate_cmd) return cmd_simulate(o, k);
        if (*audit_cmd) return cmd_audit(o, audit_k);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapabilityRefused& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitRefused;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

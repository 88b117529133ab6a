#pragma once

// Experiment runner shared by the CLI and the integration tests.
//
// A config is one JSON document:
//
//   {
//     "chain":   {"p00": 0.7, "p11": 0.4, "initial": [1.0, 0.0]},
//     "n":       0,
//     "spec":    "nu>=log2",
//     "blocks":  [2, 18],            // p_min, p_max
//     "k":       [],                 // explicit orders; overrides "blocks"
//     "monte_carlo": {"trials": 0, "seed": 1},
//     "classify_blocks": 30,
//     "density_points": [16, 64],    // default 2^4, 2^6, ..., 2^24
//     "output_dir": "results"
//   }
//
// Every field is optional. The output directory falls back to
// $CAPDIFF_OUTPUT_DIR and then to "results".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capdiff/chain.hpp"
#include "capdiff/diffengine.hpp"
#include "capdiff/setspec.hpp"
#include "capdiff/wiener.hpp"
#include "json.hpp"

namespace capdiff {

inline constexpr const char* kOutputDirEnv = "CAPDIFF_OUTPUT_DIR";

struct ExperimentConfig {
    double p00 = 0.7;
    double p11 = 0.4;
    std::array<double, 2> initial{1.0, 0.0};
    std::uint64_t n = 0;
    std::string spec = "nu>=log2";
    int p_min = 2;
    int p_max = 18;
    std::vector<std::uint64_t> k_list;
    std::uint64_t mc_trials = 0;
    std::uint64_t mc_seed = 1;
    int classify_blocks = 30;
    std::vector<std::uint64_t> density_points;
    std::string output_dir;
    // Directory that relative table paths in `spec` resolve against.
    std::string base_dir;

    // Throws ConfigError on invalid chain parameters.
    ChainModel model() const;
    IndexSetSpec parsed_spec() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);
std::string resolve_output_dir(const ExperimentConfig& cfg);

struct ConvergenceRecord {
    std::uint64_t k = 0;
    int p_block = 0;
    int nu = 0;
    int popcount = 0;
    double p1_exact = 0.0;
    double deviation = 0.0;
    std::optional<double> mc_estimate;
    std::optional<double> mc_stderr;
};

struct BlockSummary {
    int p = 0;
    std::size_t count = 0;
    double max_deviation = 0.0;
    double min_deviation = 0.0;
    double max_log2_deviation = 0.0;
    double min_log2_deviation = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRecord> records;
    // log2 deviations, parallel to records.
    std::vector<double> log2_deviations;
    std::vector<BlockSummary> blocks;
    ConditionEReport condition;
    Classification classification;
};

inline constexpr std::string_view kConvergenceCsvHeader =
    "k,p_block,nu,popcount,p1_exact,deviation,mc_estimate,mc_stderr";

ConvergenceResult run_convergence(const ExperimentConfig& cfg);
std::string convergence_csv(const ConvergenceResult& result);
nlohmann::json convergence_summary(const ExperimentConfig& cfg, const ConvergenceResult& result);
std::vector<ConvergenceRecord> parse_convergence_csv(std::string_view text);
// Per-block extrema recomputed from records alone.
std::vector<BlockSummary> summarize_blocks(const std::vector<ConvergenceRecord>& records);

nlohmann::json run_classification(const ExperimentConfig& cfg);

DensityReport run_density(const ExperimentConfig& cfg);
std::string density_csv(const DensityReport& report);

// %.17g: 17 significant digits, enough to round-trip any double.
std::string format_double(double x);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace capdiff

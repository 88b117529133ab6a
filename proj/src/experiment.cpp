#include "capdiff/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "capdiff/bits.hpp"
#include "capdiff/error.hpp"
#include "capdiff/rng.hpp"

namespace capdiff {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key) { return obj.at(key); }

template <class T>
T get_as(const json& v, const std::string& where) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: '" + where + "' has the wrong type");
    }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end())
            throw ConfigError("config: unknown key '" + where + key + "'");
    }
}

std::uint64_t nonnegative(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError("config: '" + where + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

}  // namespace

ChainModel ExperimentConfig::model() const {
    try {
        return ChainModel{TransitionMatrix::from_diagonal(p00, p11), Distribution::make(initial[0], initial[1])};
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

IndexSetSpec ExperimentConfig::parsed_spec() const { return parse_spec(spec, base_dir); }

ExperimentConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown(doc,
                   {"chain", "n", "spec", "blocks", "k", "monte_carlo", "classify_blocks", "density_points",
                    "output_dir"},
                   "");
    ExperimentConfig cfg;
    if (doc.contains("chain")) {
        const json& chain = field(doc, "chain");
        if (!chain.is_object()) throw ConfigError("config: 'chain' must be an object");
        reject_unknown(chain, {"p00", "p11", "initial"}, "chain.");
        if (chain.contains("p00")) cfg.p00 = get_as<double>(chain["p00"], "chain.p00");
        if (chain.contains("p11")) cfg.p11 = get_as<double>(chain["p11"], "chain.p11");
        if (chain.contains("initial")) {
            const auto q = get_as<std::vector<double>>(chain["initial"], "chain.initial");
            if (q.size() != 2) throw ConfigError("config: 'chain.initial' must hold two probabilities");
            cfg.initial = {q[0], q[1]};
        }
    }
    if (doc.contains("n")) cfg.n = nonnegative(doc["n"], "n");
    if (doc.contains("spec")) cfg.spec = get_as<std::string>(doc["spec"], "spec");
    if (doc.contains("blocks")) {
        const auto b = get_as<std::vector<int>>(doc["blocks"], "blocks");
        if (b.size() != 2) throw ConfigError("config: 'blocks' must be [p_min, p_max]");
        cfg.p_min = b[0];
        cfg.p_max = b[1];
    }
    if (doc.contains("k")) {
        if (!doc["k"].is_array()) throw ConfigError("config: 'k' must be an array");
        for (const json& v : doc["k"]) cfg.k_list.push_back(nonnegative(v, "k"));
    }
    if (doc.contains("monte_carlo")) {
        const json& mc = doc["monte_carlo"];
        if (!mc.is_object()) throw ConfigError("config: 'monte_carlo' must be an object");
        reject_unknown(mc, {"trials", "seed"}, "monte_carlo.");
        if (mc.contains("trials")) cfg.mc_trials = nonnegative(mc["trials"], "monte_carlo.trials");
        if (mc.contains("seed")) cfg.mc_seed = nonnegative(mc["seed"], "monte_carlo.seed");
    }
    if (doc.contains("classify_blocks")) cfg.classify_blocks = get_as<int>(doc["classify_blocks"], "classify_blocks");
    if (doc.contains("density_points")) {
        if (!doc["density_points"].is_array()) throw ConfigError("config: 'density_points' must be an array");
        for (const json& v : doc["density_points"]) cfg.density_points.push_back(nonnegative(v, "density_points"));
    }
    if (doc.contains("output_dir")) cfg.output_dir = get_as<std::string>(doc["output_dir"], "output_dir");
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["chain"] = {{"p00", cfg.p00}, {"p11", cfg.p11}, {"initial", {cfg.initial[0], cfg.initial[1]}}};
    doc["n"] = cfg.n;
    doc["spec"] = cfg.spec;
    doc["blocks"] = {cfg.p_min, cfg.p_max};
    doc["k"] = cfg.k_list;
    doc["monte_carlo"] = {{"trials", cfg.mc_trials}, {"seed", cfg.mc_seed}};
    doc["classify_blocks"] = cfg.classify_blocks;
    doc["density_points"] = cfg.density_points;
    if (!cfg.output_dir.empty()) doc["output_dir"] = cfg.output_dir;
    return doc;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    ExperimentConfig cfg = config_from_json(doc);
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

std::string resolve_output_dir(const ExperimentConfig& cfg) {
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return "results";
}

namespace {

std::vector<std::uint64_t> study_orders(const ExperimentConfig& cfg, const IndexSetSpec& spec) {
    std::vector<std::uint64_t> ks;
    if (!cfg.k_list.empty()) {
        ks = cfg.k_list;
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        if (ks.front() == 0) throw ConfigError("config: orders in 'k' must be >= 1");
    } else {
        if (cfg.p_min < 0 || cfg.p_max < cfg.p_min || cfg.p_max > kMaxBlock)
            throw ConfigError("config: blocks must satisfy 0 <= p_min <= p_max <= " + std::to_string(kMaxBlock));
        for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
            const auto members = members_in_block(spec, p);
            ks.insert(ks.end(), members.begin(), members.end());
        }
    }
    if (!ks.empty() && ks.back() > kMaxOrder)
        throw CapabilityRefused("order " + std::to_string(ks.back()) + " exceeds the engine bound " +
                                std::to_string(kMaxOrder));
    return ks;
}

void validate_run(const ExperimentConfig& cfg) {
    if (cfg.n > kMaxMarginalTime)
        throw CapabilityRefused("n = " + std::to_string(cfg.n) + " exceeds " + std::to_string(kMaxMarginalTime));
    if (cfg.mc_trials != 0 && cfg.mc_trials < 100)
        throw ConfigError("config: monte_carlo.trials must be 0 or at least 100");
}

}  // namespace

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
    validate_run(cfg);
    const ChainModel model = cfg.model();
    const IndexSetSpec spec = cfg.parsed_spec();
    const std::vector<std::uint64_t> ks = study_orders(cfg, spec);

    ConvergenceResult result;
    result.condition = check_condition_E(model.transition);
    result.classification = classify(spec, cfg.classify_blocks);

    const auto exact = exact_prob_batch(model, cfg.n, ks);
    result.records.resize(ks.size());
    result.log2_deviations.resize(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        ConvergenceRecord& r = result.records[i];
        r.k = ks[i];
        r.p_block = bits::block_of(ks[i]);
        r.nu = bits::trailing_ones(ks[i]);
        r.popcount = bits::popcount(ks[i]);
        r.p1_exact = exact[i].p1;
        r.deviation = exact[i].deviation();
        result.log2_deviations[i] = exact[i].log2_deviation();
    }
    if (cfg.mc_trials > 0) {
        for (ConvergenceRecord& r : result.records) {
            const McEstimate mc = mc_estimate(model, cfg.n, r.k, cfg.mc_trials, derive_seed(cfg.mc_seed, r.k));
            r.mc_estimate = mc.estimate;
            r.mc_stderr = mc.standard_error;
        }
    }

    result.blocks = summarize_blocks(result.records);
    // Replace log2 extrema with the unclamped values from the engine.
    std::size_t i = 0;
    for (BlockSummary& b : result.blocks) {
        b.max_log2_deviation = -std::numeric_limits<double>::infinity();
        b.min_log2_deviation = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.count; ++j, ++i) {
            b.max_log2_deviation = std::max(b.max_log2_deviation, result.log2_deviations[i]);
            b.min_log2_deviation = std::min(b.min_log2_deviation, result.log2_deviations[i]);
        }
    }
    return result;
}

std::string format_double(double x) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string convergence_csv(const ConvergenceResult& result) {
    std::string out(kConvergenceCsvHeader);
    out += '\n';
    for (const ConvergenceRecord& r : result.records) {
        out += std::to_string(r.k) + ',' + std::to_string(r.p_block) + ',' + std::to_string(r.nu) + ',' +
               std::to_string(r.popcount) + ',' + format_double(r.p1_exact) + ',' + format_double(r.deviation) +
               ',';
        if (r.mc_estimate) out += format_double(*r.mc_estimate);
        out += ',';
        if (r.mc_stderr) out += format_double(*r.mc_stderr);
        out += '\n';
    }
    return out;
}

namespace {

// json stores doubles by value; -inf (an all-zero block) is written as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json diagnostics_json(const WienerDiagnostics& d) {
    json blocks = json::array();
    for (std::size_t i = 0; i < d.terms.size(); ++i) {
        blocks.push_back({{"p", d.first_block + static_cast<int>(i)},
                          {"capacity", d.block_capacities[i]},
                          {"term", d.terms[i]},
                          {"partial_sum", d.partial_sums[i]}});
    }
    return blocks;
}

json classification_json(const Classification& c) {
    return {{"verdict", to_string(c.verdict)}, {"rationale", c.rationale}, {"evidence", diagnostics_json(c.evidence)}};
}

}  // namespace

json convergence_summary(const ExperimentConfig& cfg, const ConvergenceResult& result) {
    json doc;
    doc["config"] = config_to_json(cfg);
    doc["condition_E"] = {{"positivity", result.condition.positivity},
                          {"asymmetry", result.condition.asymmetry},
                          {"nondegeneracy", result.condition.nondegeneracy},
                          {"lambda", result.condition.lambda},
                          {"satisfied", result.condition.all_pass()}};
    doc["classification"] = classification_json(result.classification);
    doc["records"] = result.records.size();
    json blocks = json::array();
    for (const BlockSummary& b : result.blocks) {
        blocks.push_back({{"p", b.p},
                          {"count", b.count},
                          {"max_deviation", b.max_deviation},
                          {"min_deviation", b.min_deviation},
                          {"max_log2_deviation", finite_or_null(b.max_log2_deviation)},
                          {"min_log2_deviation", finite_or_null(b.min_log2_deviation)}});
    }
    doc["blocks"] = std::move(blocks);
    return doc;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

template <class T>
T parse_number(std::string_view s, std::size_t row) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw InvalidArgument("convergence csv row " + std::to_string(row) + ": bad field '" + std::string(s) + "'");
    return v;
}

std::optional<double> parse_optional(std::string_view s, std::size_t row) {
    if (s.empty()) return std::nullopt;
    return parse_number<double>(s, row);
}

}  // namespace

std::vector<ConvergenceRecord> parse_convergence_csv(std::string_view text) {
    std::vector<ConvergenceRecord> records;
    std::size_t row = 0;
    bool header = true;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (header) {
            if (line != kConvergenceCsvHeader) throw InvalidArgument("convergence csv: unexpected header");
            header = false;
            continue;
        }
        ++row;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 8) throw InvalidArgument("convergence csv row " + std::to_string(row) + ": expected 8 fields");
        ConvergenceRecord r;
        r.k = parse_number<std::uint64_t>(f[0], row);
        r.p_block = parse_number<int>(f[1], row);
        r.nu = parse_number<int>(f[2], row);
        r.popcount = parse_number<int>(f[3], row);
        r.p1_exact = parse_number<double>(f[4], row);
        r.deviation = parse_number<double>(f[5], row);
        r.mc_estimate = parse_optional(f[6], row);
        r.mc_stderr = parse_optional(f[7], row);
        records.push_back(r);
    }
    if (header) throw InvalidArgument("convergence csv: missing header");
    return records;
}

std::vector<BlockSummary> summarize_blocks(const std::vector<ConvergenceRecord>& records) {
    std::vector<BlockSummary> out;
    for (const ConvergenceRecord& r : records) {
        const double l2 = std::log2(r.deviation);
        if (out.empty() || out.back().p != r.p_block) {
            out.push_back({r.p_block, 0, r.deviation, r.deviation, l2, l2});
        }
        BlockSummary& b = out.back();
        ++b.count;
        b.max_deviation = std::max(b.max_deviation, r.deviation);
        b.min_deviation = std::min(b.min_deviation, r.deviation);
        b.max_log2_deviation = std::max(b.max_log2_deviation, l2);
        b.min_log2_deviation = std::min(b.min_log2_deviation, l2);
    }
    return out;
}

json run_classification(const ExperimentConfig& cfg) {
    const IndexSetSpec spec = cfg.parsed_spec();
    const Classification c = classify(spec, cfg.classify_blocks);
    json doc = classification_json(c);
    doc["spec"] = spec.to_string();
    return doc;
}

DensityReport run_density(const ExperimentConfig& cfg) {
    const IndexSetSpec spec = cfg.parsed_spec();
    const std::vector<std::uint64_t> points =
        cfg.density_points.empty() ? default_density_points() : cfg.density_points;
    try {
        return density_report(spec, points);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("density: ") + e.what());
    }
}

std::string density_csv(const DensityReport& report) {
    std::string out = "m,count,rho\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        out += std::to_string(report.points[i]) + ',' + std::to_string(report.rho[i].num) + ',' +
               format_double(report.rho[i].value()) + '\n';
    }
    return out;
}

void write_text_file(const std::string& path, std::string_view text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace capdiff

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairtopk/core.hpp"

namespace fairtopk {

class ParseError : public DomainError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : DomainError(source + ":" + std::to_string(line) + ": " + message), line(line)
    {
    }
    std::size_t line;
};

struct ProtectedBound {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
};

struct RunConfig {
    int k = 10;
    double epsilon = 0.05;
    Objective objective = Objective::WDifference;
    std::string engine = "auto";
    std::vector<ProtectedBound> protected_groups;
    std::optional<std::vector<double>> wo;
    // [a_1..a_d, b] meaning a . w + b >= 0
    std::vector<std::vector<double>> extra_halfspaces;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool stable = false;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
std::vector<std::string> protected_names(const RunConfig& config);

/// CSV with header id,<attributes>,groups; groups are '|'-separated names.
/// Protected names take ids 0.. in the given order, other names follow in
/// order of first appearance.
Dataset parse_csv(std::istream& in, std::span<const std::string> protected_groups, const std::string& source = "csv");
Dataset load_csv(const std::string& path, std::span<const std::string> protected_groups);
void write_csv(std::ostream& out, const Dataset& data, std::span<const std::string> attribute_names = {});

// Per-attribute min-max scaling to [0, 1]; constant attributes become 0.
Dataset normalize(const Dataset& data);

// Candidates dominated by fewer than k others, in their original order.
Dataset kskyband(const Dataset& data, int k);

struct SampleReport {
    std::vector<WeightVector> unfair;
    std::size_t tried = 0;
};

/// Uniform weights on the simplex, kept when no fair top-k exists for them.
/// Throws RefusalError after max_tries draws without collecting count.
SampleReport sample_unfair(const Dataset& data, int k, const FairnessSpec& spec, std::size_t count, std::uint64_t seed,
                           std::size_t max_tries = 100'000);

FairnessSpec spec_from_config(const Dataset& data, const RunConfig& config, int k);
FairnessSpec spec_from_config(const Dataset& data, const RunConfig& config);
WeightRegion build_region(const RunConfig& config, const WeightVector& reference);
WeightVector reference_weight(const RunConfig& config, std::size_t dimension);

// The engine "auto" resolves to for this shape.
std::string auto_engine(std::size_t dimension, int k, Objective objective);

struct SelectOutcome {
    std::optional<FairResult> result;
    std::string engine;
    double elapsed_ms = 0.0;
};

/// Engine dispatch over the epsilon box around the reference (config.wo, or
/// uniform), with optional stability post-processing.
SelectOutcome select(const Dataset& data, const RunConfig& config);
SelectOutcome select(const Dataset& data, const RunConfig& config, const WeightVector& reference);

nlohmann::json result_json(const Dataset& data, const RunConfig& config, const SelectOutcome& outcome);

struct BenchGrid {
    std::vector<int> ks;
    std::vector<double> epsilons;
    std::vector<double> n_fractions{1.0};
    std::vector<std::size_t> dimensions;  // leading attributes; empty means all
    std::size_t samples = 20;
    double cell_timeout_ms = 600'000.0;
};

struct BenchRow {
    std::string dataset, engine, objective;
    int k = 0;
    double epsilon = 0.0;
    std::size_t n = 0, d = 0;
    std::optional<double> mean_ms;  // absent on timeout
    std::size_t found = 0, unfair_sampled = 0;
    std::uint64_t seed = 0;
    std::vector<std::optional<double>> objectives;  // per sample, not written to the CSV
};

std::vector<BenchRow> bench(const std::string& name, const Dataset& data, const RunConfig& base, const BenchGrid& grid);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace fairtopk

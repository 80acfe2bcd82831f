#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairtopk/core.hpp"
#include "fairtopk/lp.hpp"

namespace fairtopk {

/// Indicator formulation: w, cutoff lambda, w-difference slacks phi (only
/// under WDifference) and one binary delta per candidate.
struct MilpModel {
    Dataset data;
    int k = 0;
    FairnessSpec spec;
    WeightRegion region;
    LpProblem relaxation;
    std::vector<std::string> column_names;
    std::vector<std::string> row_names;

    std::size_t dimension() const { return data.dimension(); }
    std::size_t w_column(std::size_t i) const { return i; }
    std::size_t lambda_column() const { return data.dimension(); }
    std::size_t phi_column(std::size_t i) const { return data.dimension() + 1 + i; }
    std::size_t delta_column(CandidateIndex c) const
    {
        return data.dimension() + 1 + (region.objective == Objective::WDifference ? data.dimension() : 0) + c;
    }
};

MilpModel build_milp(const Dataset& data, int k, const FairnessSpec& spec, const WeightRegion& region);

// LP-format text: objective, constraints in build order, bounds, binaries.
std::string export_lp_format(const MilpModel& model);

struct MilpOptions {
    std::uint64_t seed = 0;
    std::size_t node_budget = 200'000;
};

struct MilpStats {
    std::size_t nodes = 0;
    std::size_t incumbents = 0;
    std::size_t cuts = 0;  // integral nodes whose rounded subset failed re-verification
    double gap = 0.0;
};

class MilpRefusal : public RefusalError {
public:
    MilpRefusal(const std::string& what, std::optional<FairResult> incumbent, double gap)
        : RefusalError(what), incumbent(std::move(incumbent)), gap(gap)
    {
    }
    std::optional<FairResult> incumbent;
    double gap;
};

/// Best-first branch and bound. Throws MilpRefusal when the node budget runs
/// out.
std::optional<FairResult> solve_milp(const MilpModel& model, const MilpOptions& options = {},
                                     MilpStats* stats = nullptr);

}  // namespace fairtopk

#pragma once

#include <cstdint>
#include <vector>

#include "fairtopk/core.hpp"

namespace fairtopk {

struct StableResult {
    WeightVector weight;
    // Projected max-norm radius around weight inside which the subset stays the top-k.
    double margin = 0.0;
    std::vector<CandidateIndex> subset;
    bool degenerate = false;  // no positive margin exists; weight is the witness
};

// Members whose score at witness ties the lowest member score.
std::vector<CandidateIndex> pivot_candidates(const Dataset& data, std::span<const CandidateIndex> subset,
                                             const WeightVector& witness);

/// Midpoint of the widest interval of x = w_1 over which subset stays
/// above the pivot line and every other line stays below it.
StableResult stable_weight_2d(const Dataset& data, std::span<const CandidateIndex> subset, const WeightRegion& region,
                              const WeightVector& witness);

/// Maximum-margin weight for subset in any dimension.
StableResult stable_weight_md(const Dataset& data, std::span<const CandidateIndex> subset, const WeightRegion& region,
                              const WeightVector& witness, std::uint64_t seed = 0);

}  // namespace fairtopk

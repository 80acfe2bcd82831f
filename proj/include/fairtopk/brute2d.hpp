#pragma once

#include <optional>
#include <vector>

#include "fairtopk/core.hpp"

namespace fairtopk {

// Abscissae examined by brute_select_2d, ascending.
std::vector<double> brute_abscissae(const Dataset& data, const WeightRegion& region);

/// Reference answer for d = 2: evaluates every region endpoint, the
/// reference, every pairwise dual-line crossing in the region and the
/// midpoints between consecutive ones.
std::optional<FairResult> brute_select_2d(const Dataset& data, int k, const FairnessSpec& spec,
                                          const WeightRegion& region);

}  // namespace fairtopk

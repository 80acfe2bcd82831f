#pragma once

#include <optional>
#include <string>

#include "fairtopk/core.hpp"
#include "fairtopk/verify.hpp"

namespace fairtopk {

// Utility of any top-k subset under the reference weights.
double reference_utility(const Dataset& data, int k, const WeightVector& reference);

/// Fair witness and objective value at w for a given decomposition, or
/// nothing when no top-k subset at w is fair.
std::optional<FairResult> evaluate_decomposition(const Dataset& data, const FairnessSpec& spec,
                                                 const WeightRegion& region, const WeightVector& w,
                                                 const TieDecomposition& dec, double ref_utility);

std::optional<FairResult> evaluate_weight(const Dataset& data, int k, const FairnessSpec& spec,
                                          const WeightRegion& region, const WeightVector& w, double ref_utility);

// Objective value of a fixed subset at w.
double objective_value(const WeightRegion& region, const WeightVector& w, double subset_utility, double ref_utility);

}  // namespace fairtopk

#include "fairtopk/objective.hpp"

#include <algorithm>
#include <functional>

namespace fairtopk {

double reference_utility(const Dataset& data, int k, const WeightVector& reference)
{
    if (k < 1 || static_cast<std::size_t>(k) > data.size()) throw DomainError("k must satisfy 1 <= k <= n");
    auto s = scores(reference, data);
    std::partial_sort(s.begin(), s.begin() + k, s.end(), std::greater<>());
    double u = 0.0;
    for (int i = 0; i < k; ++i) u += s[static_cast<std::size_t>(i)];
    return u;
}

double objective_value(const WeightRegion& region, const WeightVector& w, double subset_utility, double ref_utility)
{
    if (region.objective == Objective::WDifference) return w_difference(w, region.reference);
    return utility_loss(subset_utility, ref_utility);
}

std::optional<FairResult> evaluate_decomposition(const Dataset& data, const FairnessSpec& spec,
                                                 const WeightRegion& region, const WeightVector& w,
                                                 const TieDecomposition& dec, double ref_utility)
{
    const auto tally = build_tally(data, dec.strict, dec.tied(), &region.reference);
    const auto assignment = region.objective == Objective::UtilityLoss ? max_utility_tiebreak(tally, dec.slack, spec)
                                                                       : first_fair_assignment(tally, dec.slack, spec);
    if (!assignment) return std::nullopt;
    FairResult r;
    r.weight = w;
    r.subset = dec.strict;
    const auto chosen = materialize(tally, *assignment);
    r.subset.insert(r.subset.end(), chosen.begin(), chosen.end());
    std::sort(r.subset.begin(), r.subset.end());
    r.utility = utility(r.subset, region.reference, data);
    r.objective_value = objective_value(region, w, r.utility, ref_utility);
    return r;
}

std::optional<FairResult> evaluate_weight(const Dataset& data, int k, const FairnessSpec& spec,
                                          const WeightRegion& region, const WeightVector& w, double ref_utility)
{
    return evaluate_decomposition(data, spec, region, w, decompose_topk(data, k, w), ref_utility);
}

}  // namespace fairtopk

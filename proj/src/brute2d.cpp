#include "fairtopk/brute2d.hpp"

#include <algorithm>

#include "fairtopk/geometry.hpp"
#include "fairtopk/objective.hpp"
#include "fairtopk/sweep2d.hpp"

namespace fairtopk {

std::vector<double> brute_abscissae(const Dataset& data, const WeightRegion& region)
{
    const auto interval = region_interval(region);
    if (!interval) return {};
    const auto [lb, ub] = *interval;
    std::vector<double> xs{lb, ub};
    const double wo_x = region.reference[0];
    if (wo_x >= lb && wo_x <= ub) xs.push_back(wo_x);
    const auto lines = dual_lines(data);
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (lines[i].slope == lines[j].slope) continue;
            const double x = crossing(lines[i], lines[j]);
            if (x >= lb && x <= ub) xs.push_back(x);
        }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const std::size_t m = xs.size();
    for (std::size_t i = 0; i + 1 < m; ++i) xs.push_back(0.5 * (xs[i] + xs[i + 1]));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

std::optional<FairResult> brute_select_2d(const Dataset& data, int k, const FairnessSpec& spec,
                                          const WeightRegion& region)
{
    if (data.dimension() != 2) throw DomainError("brute_select_2d needs d = 2");
    const double ref_utility = reference_utility(data, k, region.reference);
    std::optional<FairResult> best;
    for (double x : brute_abscissae(data, region)) {
        auto r = evaluate_weight(data, k, spec, region, weight_at(x, region), ref_utility);
        if (r && (!best || r->objective_value < best->objective_value)) best = std::move(r);
    }
    if (best) best->engine = "brute2d";
    return best;
}

}  // namespace fairtopk

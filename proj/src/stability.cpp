#include "fairtopk/stability.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fairtopk/geometry.hpp"
#include "fairtopk/lp.hpp"

namespace fairtopk {

namespace {

constexpr double kZeroRow = 1e-12;

bool identical(const Candidate& a, const Candidate& b)
{
    for (std::size_t i = 0; i < a.point.size(); ++i)
        if (std::abs(a.point[i] - b.point[i]) > kZeroRow) return false;
    return true;
}

std::vector<bool> membership(const Dataset& data, std::span<const CandidateIndex> subset)
{
    std::vector<bool> in(data.size(), false);
    for (auto i : subset) in[i] = true;
    return in;
}

StableResult degenerate_result(std::span<const CandidateIndex> subset, const WeightVector& witness)
{
    return {witness, 0.0, std::vector<CandidateIndex>(subset.begin(), subset.end()), true};
}

// Projected rows "coeffs . y + offset >= margin" that keep subset on top with
// pivot as the lowest member, or nothing when some non-member coincides with it.
std::optional<std::vector<Halfspace>> pivot_rows(const Dataset& data, const std::vector<bool>& in, CandidateIndex pivot)
{
    const std::size_t d = data.dimension();
    std::vector<Halfspace> rows;
    if (std::all_of(in.begin(), in.end(), [](bool b) { return b; })) return rows;
    for (std::size_t c = 0; c < data.size(); ++c) {
        if (c == pivot) continue;
        if (identical(data[c], data[pivot])) {
            if (!in[c]) return std::nullopt;
            continue;
        }
        RegionHalfspace h{std::vector<double>(d), 0.0};
        const double sign = in[c] ? 1.0 : -1.0;
        for (std::size_t i = 0; i < d; ++i) h.coeffs[i] = sign * (data[c].point[i] - data[pivot].point[i]);
        rows.push_back(project_halfspace(h));
    }
    return rows;
}

}  // namespace

std::vector<CandidateIndex> pivot_candidates(const Dataset& data, std::span<const CandidateIndex> subset,
                                             const WeightVector& witness)
{
    double low = kInfinity;
    for (auto i : subset) low = std::min(low, score(witness, data[i]));
    std::vector<CandidateIndex> out;
    for (auto i : subset)
        if (score(witness, data[i]) <= low + kTieTolerance) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

StableResult stable_weight_2d(const Dataset& data, std::span<const CandidateIndex> subset, const WeightRegion& region,
                              const WeightVector& witness)
{
    if (data.dimension() != 2) throw DomainError("stable_weight_2d needs d = 2");
    const auto interval = region_interval(region);
    if (!interval) throw DomainError("empty weight region");
    const auto in = membership(data, subset);

    std::optional<StableResult> best;
    for (auto pivot : pivot_candidates(data, subset, witness)) {
        const auto rows = pivot_rows(data, in, pivot);
        if (!rows) continue;
        double lo = interval->first, hi = interval->second;
        for (const auto& h : *rows) {
            const double a = h.coeffs[0], b = h.offset;
            if (std::abs(a) <= kZeroRow) {
                if (b < -kTieTolerance) lo = kInfinity;
                continue;
            }
            if (a > 0)
                lo = std::max(lo, -b / a);
            else
                hi = std::min(hi, -b / a);
        }
        if (hi - lo <= 2 * kTieTolerance) continue;
        const double mid = 0.5 * (lo + hi);
        StableResult r{WeightVector::from_solver({mid, 1.0 - mid}), 0.5 * (hi - lo),
                       std::vector<CandidateIndex>(subset.begin(), subset.end()), false};
        if (!best || r.margin > best->margin) best = std::move(r);
    }
    return best ? *best : degenerate_result(subset, witness);
}

StableResult stable_weight_md(const Dataset& data, std::span<const CandidateIndex> subset, const WeightRegion& region,
                              const WeightVector& witness, std::uint64_t seed)
{
    const std::size_t d = data.dimension();
    if (d < 2) throw DomainError("stable_weight_md needs d >= 2");
    const auto in = membership(data, subset);
    const auto region_rows = projected_region(region);

    std::optional<StableResult> best;
    for (auto pivot : pivot_candidates(data, subset, witness)) {
        auto rows = pivot_rows(data, in, pivot);
        if (!rows) continue;
        rows->insert(rows->end(), region_rows.begin(), region_rows.end());

        // variables y_1..y_{d-1}, xi
        LpProblem lp(d);
        lp.objective[d - 1] = 1.0;
        for (std::size_t i = 0; i + 1 < d; ++i) lp.set_bounds(i, 0.0, 1.0);
        lp.set_bounds(d - 1, -kInfinity, 1.0);
        bool broken = false;
        for (const auto& h : *rows) {
            double norm = 0.0;
            for (double c : h.coeffs) norm += std::abs(c);
            if (norm <= kZeroRow) {
                broken = broken || h.offset < -kTieTolerance;
                continue;
            }
            std::vector<double> row(d);
            for (std::size_t i = 0; i + 1 < d; ++i) row[i] = h.coeffs[i] / norm;
            row[d - 1] = -1.0;
            lp.add_row(std::move(row), RowSense::GreaterEqual, -h.offset / norm);
        }
        if (broken) throw DomainError("subset is not a top-k anywhere in the region");
        const auto out = solve_lp(lp, seed);
        if (!out.optimal()) throw DomainError("stability program has no optimum");
        const double xi = out.x[d - 1];
        if (xi < -kLpFeasibilityTolerance) throw DomainError("subset is not a top-k anywhere in the region");
        if (xi <= kTieTolerance) continue;
        std::vector<double> y(out.x.begin(), out.x.end() - 1);
        for (auto& v : y) v = std::max(0.0, v);
        double sum = 0.0;
        for (double v : y) sum += v;
        if (sum > 1.0)
            for (auto& v : y) v /= sum;
        StableResult r{lift_weight(y), xi, std::vector<CandidateIndex>(subset.begin(), subset.end()), false};
        if (!best || r.margin > best->margin) best = std::move(r);
    }
    return best ? *best : degenerate_result(subset, witness);
}

}  // namespace fairtopk

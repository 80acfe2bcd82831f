#include "fairtopk/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairtopk/log.hpp"

namespace fairtopk {

Dataset::Dataset(std::vector<Candidate> candidates, std::size_t dimension, std::size_t group_count,
                 std::size_t protected_count, std::vector<std::string> group_names)
    : candidates_(std::move(candidates)),
      dimension_(dimension),
      group_count_(group_count),
      protected_count_(protected_count),
      group_names_(std::move(group_names))
{
    if (dimension_ < 1) throw DomainError("dataset dimension must be at least 1");
    if (protected_count_ > group_count_) throw DomainError("more protected groups than groups");
    if (protected_count_ > 63) throw DomainError("at most 63 protected groups are supported");
    if (!group_names_.empty() && group_names_.size() != group_count_)
        throw DomainError("group name count does not match group count");

    std::vector<std::int64_t> ids;
    ids.reserve(candidates_.size());
    profiles_.reserve(candidates_.size());
    for (auto& c : candidates_) {
        if (c.point.size() != dimension_)
            throw DomainError("candidate " + std::to_string(c.id) + " has wrong dimension");
        std::sort(c.groups.begin(), c.groups.end());
        c.groups.erase(std::unique(c.groups.begin(), c.groups.end()), c.groups.end());
        if (!c.groups.empty() && c.groups.back() >= group_count_)
            throw DomainError("candidate " + std::to_string(c.id) + " has unknown group id");
        ids.push_back(c.id);
        profiles_.push_back(encode_profile(c.groups, protected_count_));
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw DomainError("candidate ids must be unique");
}

Dataset Dataset::subset(std::span<const CandidateIndex> indices) const
{
    std::vector<Candidate> kept;
    kept.reserve(indices.size());
    for (auto i : indices) kept.push_back(candidates_.at(i));
    return Dataset(std::move(kept), dimension_, group_count_, protected_count_, group_names_);
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights))
{
    if (weights_.empty()) throw DomainError("weight vector is empty");
    double sum = 0.0;
    for (double v : weights_) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("weight components must be finite and non-negative");
        sum += v;
    }
    if (sum <= 0.0) throw DomainError("weight vector sums to zero");
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
        if (std::abs(sum - 1.0) > 1e-9) warn("weight vector sums to " + std::to_string(sum) + "; renormalizing");
        for (double& v : weights_) v /= sum;
    }
}

WeightVector WeightVector::from_solver(std::vector<double> weights)
{
    for (double& v : weights) v = std::max(v, 0.0);
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw DomainError("solver weight vector sums to zero");
    for (double& v : weights) v /= sum;
    WeightVector w;
    w.weights_ = std::move(weights);
    return w;
}

FairnessSpec::FairnessSpec(std::vector<GroupBound> bounds, int k) : bounds_(std::move(bounds)), k_(k)
{
    if (k < 0) throw DomainError("k must be non-negative");
    for (auto& b : bounds_) {
        b.upper = std::min(b.upper, k);
        if (b.lower < 0 || b.lower > b.upper)
            throw DomainError("fairness bounds must satisfy 0 <= lower <= upper <= k");
    }
}

FairnessSpec FairnessSpec::from_fractions(std::span<const std::pair<double, double>> fractions, int k)
{
    std::vector<GroupBound> bounds;
    bounds.reserve(fractions.size());
    for (auto [lo, hi] : fractions) {
        if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw DomainError("fairness fractions must satisfy 0 <= lower <= upper <= 1");
        // Absorb representation error such as 0.35 * 20 = 7.000000000000001.
        const int lower = static_cast<int>(std::ceil(lo * k - 1e-9));
        const int upper = static_cast<int>(std::floor(hi * k + 1e-9));
        bounds.push_back({std::max(lower, 0), upper});
    }
    return FairnessSpec(std::move(bounds), k);
}

FairnessSpec FairnessSpec::vacuous(std::size_t protected_count, int k)
{
    return FairnessSpec(std::vector<GroupBound>(protected_count, GroupBound{0, k}), k);
}

std::string to_string(Objective objective)
{
    return objective == Objective::WDifference ? "wdiff" : "utility";
}

Objective objective_from_string(const std::string& name)
{
    if (name == "wdiff") return Objective::WDifference;
    if (name == "utility") return Objective::UtilityLoss;
    throw DomainError("unknown objective '" + name + "'");
}

bool WeightRegion::contains(const WeightVector& w, double tolerance) const
{
    for (const auto& h : halfspaces) {
        double v = h.offset;
        for (std::size_t i = 0; i < h.coeffs.size(); ++i) v += h.coeffs[i] * w[i];
        if (v < -tolerance) return false;
    }
    return true;
}

WeightRegion WeightRegion::epsilon_box(const WeightVector& reference, double epsilon, Objective objective)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
    WeightRegion region;
    region.reference = reference;
    region.objective = objective;
    const std::size_t d = reference.dimension();
    for (std::size_t i = 0; i < d; ++i) {
        RegionHalfspace above{std::vector<double>(d, 0.0), epsilon - reference[i]};
        above.coeffs[i] = 1.0;  // w_i >= wo_i - eps
        RegionHalfspace below{std::vector<double>(d, 0.0), epsilon + reference[i]};
        below.coeffs[i] = -1.0;  // w_i <= wo_i + eps
        region.halfspaces.push_back(std::move(above));
        region.halfspaces.push_back(std::move(below));
    }
    return region;
}

ProfileCode encode_profile(std::span<const GroupId> groups, std::size_t protected_count)
{
    ProfileCode code = 0;
    for (GroupId g : groups)
        if (g < protected_count) code |= ProfileCode{1} << g;
    return code;
}

std::vector<GroupId> decode_profile(ProfileCode code, std::size_t protected_count)
{
    if (protected_count < 64 && code >= (ProfileCode{1} << protected_count))
        throw DomainError("profile code out of range");
    std::vector<GroupId> groups;
    for (std::size_t j = 0; j < protected_count; ++j)
        if (code >> j & 1U) groups.push_back(static_cast<GroupId>(j));
    return groups;
}

double score(const WeightVector& w, std::span<const double> point)
{
    if (point.size() != w.dimension()) throw DomainError("weight and point dimensions differ");
    double s = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) s += w[i] * point[i];
    return s;
}

double score(const WeightVector& w, const Candidate& c) { return score(w, c.point); }

std::vector<double> scores(const WeightVector& w, const Dataset& data)
{
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& c : data.candidates()) out.push_back(score(w, c));
    return out;
}

double w_difference(const WeightVector& w, const WeightVector& reference)
{
    if (w.dimension() != reference.dimension()) throw DomainError("weight dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < w.dimension(); ++i) sum += std::abs(w[i] - reference[i]);
    return sum;
}

double utility(std::span<const CandidateIndex> subset, const WeightVector& reference, const Dataset& data)
{
    double sum = 0.0;
    for (auto i : subset) sum += score(reference, data[i]);
    return sum;
}

double utility_loss(double fair_utility, double reference_utility)
{
    if (reference_utility == 0.0) {
        if (fair_utility == 0.0) return 0.0;
        throw DomainError("utility loss undefined for zero reference utility");
    }
    return 1.0 - fair_utility / reference_utility;
}

bool is_fair_counts(std::span<const int> counts, const FairnessSpec& spec)
{
    for (std::size_t j = 0; j < spec.size(); ++j)
        if (counts[j] < spec[j].lower || counts[j] > spec[j].upper) return false;
    return true;
}

std::vector<int> group_counts(const Dataset& data, std::span<const CandidateIndex> subset)
{
    std::vector<int> counts(data.protected_count(), 0);
    for (auto i : subset)
        for (GroupId g : data[i].groups)
            if (g < counts.size()) ++counts[g];
    return counts;
}

}  // namespace fairtopk

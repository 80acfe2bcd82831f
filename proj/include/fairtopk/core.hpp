#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairtopk {

// Components of a weight vector must sum to one within this bound.
inline constexpr double kSimplexTolerance = 1e-12;
// Two scores tie iff they differ by at most this much.
inline constexpr double kTieTolerance = 1e-9;

using GroupId = std::uint32_t;
using CandidateIndex = std::size_t;
using ProfileCode = std::uint64_t;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when a bounded computation would exceed its work budget.
class RefusalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Candidate {
    std::int64_t id = 0;
    std::vector<double> point;
    std::vector<GroupId> groups;  // sorted, unique
};

/// A set of candidates sharing one dimension and one group universe.
///
/// Group ids are dense: 0..group_count-1, and the protected groups occupy
/// 0..protected_count-1. Membership profiles are cached at construction.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Candidate> candidates, std::size_t dimension, std::size_t group_count,
            std::size_t protected_count, std::vector<std::string> group_names = {});

    std::size_t size() const { return candidates_.size(); }
    std::size_t dimension() const { return dimension_; }
    std::size_t group_count() const { return group_count_; }
    std::size_t protected_count() const { return protected_count_; }

    const Candidate& operator[](CandidateIndex i) const { return candidates_[i]; }
    const std::vector<Candidate>& candidates() const { return candidates_; }
    const std::vector<std::string>& group_names() const { return group_names_; }
    ProfileCode profile(CandidateIndex i) const { return profiles_[i]; }

    // Dataset restricted to the given candidate indices, in the given order.
    Dataset subset(std::span<const CandidateIndex> indices) const;

private:
    std::vector<Candidate> candidates_;
    std::size_t dimension_ = 0;
    std::size_t group_count_ = 0;
    std::size_t protected_count_ = 0;
    std::vector<std::string> group_names_;
    std::vector<ProfileCode> profiles_;
};

/// Non-negative weights summing to one.
class WeightVector {
public:
    WeightVector() = default;
    // Throws on negative or all-zero input; renormalizes (with a warning)
    // when the sum is off by more than kSimplexTolerance.
    explicit WeightVector(std::vector<double> weights);

    // Clamps round-off negatives and renormalizes silently. For solver output.
    static WeightVector from_solver(std::vector<double> weights);

    std::size_t dimension() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& values() const { return weights_; }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    std::vector<double> weights_;
};

struct GroupBound {
    int lower = 0;
    int upper = 0;
};

/// Per-protected-group bounds on top-k membership counts.
class FairnessSpec {
public:
    FairnessSpec() = default;
    // Upper bounds above k are clamped to k.
    FairnessSpec(std::vector<GroupBound> bounds, int k);

    // lower = ceil(lo * k), upper = floor(hi * k).
    static FairnessSpec from_fractions(std::span<const std::pair<double, double>> fractions, int k);
    // lower = 0 and upper = k for every group.
    static FairnessSpec vacuous(std::size_t protected_count, int k);

    std::size_t size() const { return bounds_.size(); }
    int k() const { return k_; }
    const GroupBound& operator[](std::size_t j) const { return bounds_[j]; }
    const std::vector<GroupBound>& bounds() const { return bounds_; }

private:
    std::vector<GroupBound> bounds_;
    int k_ = 0;
};

enum class Objective { WDifference, UtilityLoss };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& name);

/// a . w + offset >= 0 over the full (unprojected) weight vector.
struct RegionHalfspace {
    std::vector<double> coeffs;
    double offset = 0.0;
};

/// Allowable weights: the simplex intersected with the listed halfspaces.
struct WeightRegion {
    std::vector<RegionHalfspace> halfspaces;
    WeightVector reference;
    Objective objective = Objective::WDifference;

    std::size_t dimension() const { return reference.dimension(); }
    bool contains(const WeightVector& w, double tolerance = 1e-9) const;

    // |w_i - reference_i| <= epsilon for every i, including the last.
    static WeightRegion epsilon_box(const WeightVector& reference, double epsilon, Objective objective);
};

struct FairResult {
    WeightVector weight;
    double objective_value = 0.0;
    std::vector<CandidateIndex> subset;  // sorted
    double utility = 0.0;                // of subset under the reference weights
    std::optional<WeightVector> stable_weight;
    std::optional<double> margin;
    std::string engine;
};

ProfileCode encode_profile(std::span<const GroupId> groups, std::size_t protected_count);
std::vector<GroupId> decode_profile(ProfileCode code, std::size_t protected_count);

double score(const WeightVector& w, const Candidate& c);
double score(const WeightVector& w, std::span<const double> point);
std::vector<double> scores(const WeightVector& w, const Dataset& data);

double w_difference(const WeightVector& w, const WeightVector& reference);
double utility(std::span<const CandidateIndex> subset, const WeightVector& reference, const Dataset& data);
double utility_loss(double fair_utility, double reference_utility);

bool is_fair_counts(std::span<const int> counts, const FairnessSpec& spec);
// Protected-group member counts of the subset.
std::vector<int> group_counts(const Dataset& data, std::span<const CandidateIndex> subset);

}  // namespace fairtopk

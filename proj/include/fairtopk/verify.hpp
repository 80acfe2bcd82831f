#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairtopk/core.hpp"

namespace fairtopk {

/// One arbitrary top-k split into the part every top-k subset shares and
/// the candidates tied with the k-th score.
struct TieDecomposition {
    std::vector<CandidateIndex> strict;  // strictly above the pivot score
    std::vector<CandidateIndex> m1;      // tied, inside the chosen top-k
    std::vector<CandidateIndex> m2;      // tied, outside the chosen top-k
    CandidateIndex pivot = 0;
    double pivot_score = 0.0;
    int slack = 0;  // |m1|, the number of seats filled from the ties

    std::vector<CandidateIndex> tied() const;
};

TieDecomposition decompose_topk(const Dataset& data, int k, const WeightVector& w);

// Same split over an explicit list of (candidate, score); ordering is by
// score descending then candidate index ascending.
TieDecomposition decompose_scores(std::span<const CandidateIndex> candidates, std::span<const double> scores, int k);

/// Tied candidates grouped by membership profile. Only nonempty profiles
/// are stored.
struct ProfileTally {
    std::size_t protected_count = 0;
    std::vector<ProfileCode> codes;
    std::vector<int> available;
    // members[j] sorted by reference score descending (index ascending on ties)
    std::vector<std::vector<CandidateIndex>> members;
    // score_prefix[j][c] = reference utility of the best c members of profile j
    std::vector<std::vector<double>> score_prefix;
    std::vector<int> base_counts;  // per protected group, from the strict part

    int total_available() const;
    std::size_t profile_count() const { return codes.size(); }
};

// reference may be null when only feasibility is needed.
ProfileTally build_tally(const Dataset& data, std::span<const CandidateIndex> strict,
                         std::span<const CandidateIndex> tied, const WeightVector* reference);

struct SearchStats {
    std::uint64_t leaves = 0;  // complete assignments reached
    std::uint64_t nodes = 0;
};

struct TieAssignment {
    std::vector<int> counts;  // per profile, aligned with ProfileTally::codes
    double utility = 0.0;     // tied-part utility from the prefix sums
};

struct GroupInterval {
    int lower = 0;
    int upper = 0;
};

// Tight per-group count ranges over all ways of filling the slack.
std::vector<GroupInterval> greedy_group_bounds(const ProfileTally& tally, int slack);

bool backtrack_tiebreak(const ProfileTally& tally, int slack, const FairnessSpec& spec, SearchStats* stats = nullptr);

std::optional<TieAssignment> first_fair_assignment(const ProfileTally& tally, int slack, const FairnessSpec& spec,
                                                   SearchStats* stats = nullptr);

std::optional<TieAssignment> max_utility_tiebreak(const ProfileTally& tally, int slack, const FairnessSpec& spec,
                                                  SearchStats* stats = nullptr);

bool verify_fair(const Dataset& data, int k, const FairnessSpec& spec, const WeightVector& w);

// Candidates of tally chosen by an assignment, best reference score first.
std::vector<CandidateIndex> materialize(const ProfileTally& tally, const TieAssignment& assignment);

/// A concrete fair top-k subset at w (sorted indices), or nothing if w is
/// unfair. Under UtilityLoss the subset maximizes utility under reference.
std::optional<std::vector<CandidateIndex>> fair_topk_witness(const Dataset& data, int k, const FairnessSpec& spec,
                                                             const WeightVector& w, Objective objective,
                                                             const WeightVector& reference);

/// Exhaustive tie-break enumeration. Throws RefusalError when the number of
/// combinations exceeds budget.
bool naive_verify_oracle(const Dataset& data, int k, const FairnessSpec& spec, const WeightVector& w,
                         std::uint64_t budget = 5'000'000);

}  // namespace fairtopk

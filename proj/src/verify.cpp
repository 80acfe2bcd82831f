#include "fairtopk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairtopk {

std::vector<CandidateIndex> TieDecomposition::tied() const
{
    std::vector<CandidateIndex> all(m1);
    all.insert(all.end(), m2.begin(), m2.end());
    return all;
}

TieDecomposition decompose_scores(std::span<const CandidateIndex> candidates, std::span<const double> scores, int k)
{
    const std::size_t n = candidates.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw DomainError("k must satisfy 1 <= k <= n");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return candidates[a] < candidates[b];
    });

    TieDecomposition dec;
    const std::size_t kth = order[static_cast<std::size_t>(k) - 1];
    dec.pivot = candidates[kth];
    dec.pivot_score = scores[kth];
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t i = order[pos];
        if (pos < static_cast<std::size_t>(k)) {
            if (scores[i] > dec.pivot_score + kTieTolerance)
                dec.strict.push_back(candidates[i]);
            else
                dec.m1.push_back(candidates[i]);
        } else {
            if (scores[i] < dec.pivot_score - kTieTolerance) break;
            dec.m2.push_back(candidates[i]);
        }
    }
    dec.slack = static_cast<int>(dec.m1.size());
    return dec;
}

TieDecomposition decompose_topk(const Dataset& data, int k, const WeightVector& w)
{
    std::vector<CandidateIndex> all(data.size());
    std::iota(all.begin(), all.end(), CandidateIndex{0});
    const auto s = scores(w, data);
    return decompose_scores(all, s, k);
}

int ProfileTally::total_available() const { return std::accumulate(available.begin(), available.end(), 0); }

ProfileTally build_tally(const Dataset& data, std::span<const CandidateIndex> strict,
                         std::span<const CandidateIndex> tied, const WeightVector* reference)
{
    ProfileTally tally;
    tally.protected_count = data.protected_count();
    tally.base_counts = group_counts(data, strict);

    std::vector<std::pair<double, CandidateIndex>> keyed;
    keyed.reserve(tied.size());
    for (auto i : tied) keyed.emplace_back(reference ? score(*reference, data[i]) : 0.0, i);
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        if (data.profile(a.second) != data.profile(b.second)) return data.profile(a.second) < data.profile(b.second);
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    for (const auto& [s, i] : keyed) {
        const ProfileCode code = data.profile(i);
        if (tally.codes.empty() || tally.codes.back() != code) {
            tally.codes.push_back(code);
            tally.available.push_back(0);
            tally.members.emplace_back();
            if (reference) tally.score_prefix.push_back({0.0});
        }
        ++tally.available.back();
        tally.members.back().push_back(i);
        if (reference) tally.score_prefix.back().push_back(tally.score_prefix.back().back() + s);
    }
    return tally;
}

std::vector<GroupInterval> greedy_group_bounds(const ProfileTally& tally, int slack)
{
    const int total = tally.total_available();
    std::vector<GroupInterval> out(tally.protected_count);
    for (std::size_t g = 0; g < tally.protected_count; ++g) {
        int in_group = 0;
        for (std::size_t j = 0; j < tally.codes.size(); ++j)
            if (tally.codes[j] >> g & 1U) in_group += tally.available[j];
        const int base = tally.base_counts[g];
        out[g].lower = base + std::max(0, slack - (total - in_group));
        out[g].upper = base + std::min(slack, in_group);
    }
    return out;
}

namespace {

bool greedy_prune(const ProfileTally& tally, int slack, const FairnessSpec& spec)
{
    const auto bounds = greedy_group_bounds(tally, slack);
    for (std::size_t g = 0; g < spec.size(); ++g)
        if (bounds[g].upper < spec[g].lower || bounds[g].lower > spec[g].upper) return true;
    return false;
}

double assignment_utility(const ProfileTally& tally, const std::vector<int>& counts)
{
    if (tally.score_prefix.empty()) return 0.0;
    // Recomputed from the prefix sums at every fair leaf.
    double u = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) u += tally.score_prefix[j][static_cast<std::size_t>(counts[j])];
    return u;
}

// Enumerates per-profile counts summing to slack with an explicit stack.
// Profiles are visited by descending availability. A level's count must
// leave at most as many seats as the later levels can fill, and a level is
// abandoned once it pushes any group over its upper bound (counts only grow
// deeper in the tree). on_fair_leaf returns true to stop.
template <class OnFairLeaf>
void search_assignments(const ProfileTally& tally, int slack, const FairnessSpec& spec, SearchStats* stats,
                        OnFairLeaf&& on_fair_leaf)
{
    const std::size_t beta = tally.profile_count();
    if (slack < 0 || slack > tally.total_available()) return;

    std::vector<std::size_t> order(beta);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return tally.available[a] > tally.available[b];
    });

    std::vector<int> suffix(beta + 1, 0);
    for (std::size_t l = beta; l-- > 0;) suffix[l] = suffix[l + 1] + tally.available[order[l]];

    std::vector<std::vector<GroupId>> level_groups(beta);
    for (std::size_t l = 0; l < beta; ++l) level_groups[l] = decode_profile(tally.codes[order[l]], tally.protected_count);

    std::vector<int> counts = tally.base_counts;
    std::vector<int> chosen(beta, -1);  // -1 marks a level not yet entered
    auto apply = [&](std::size_t level, int delta) {
        for (GroupId g : level_groups[level]) counts[g] += delta;
    };
    auto over_upper = [&](std::size_t level) {
        for (GroupId g : level_groups[level])
            if (counts[g] > spec[g].upper) return true;
        return false;
    };

    struct Frame {
        std::size_t level;
        int remaining;
    };
    std::vector<Frame> stack;
    stack.reserve(beta + 1);
    stack.push_back({0, slack});
    std::vector<int> assignment(beta, 0);

    while (!stack.empty()) {
        const Frame frame = stack.back();
        if (frame.level == beta) {
            if (stats) ++stats->leaves;
            if (is_fair_counts(counts, spec)) {
                for (std::size_t l = 0; l < beta; ++l) assignment[order[l]] = chosen[l];
                if (on_fair_leaf(assignment)) return;
            }
            stack.pop_back();
            continue;
        }

        const std::size_t level = frame.level;
        const int lo = std::max(0, frame.remaining - suffix[level + 1]);
        const int hi = std::min(tally.available[order[level]], frame.remaining);
        int& c = chosen[level];
        if (c < 0) {
            if (lo > hi) {
                stack.pop_back();
                continue;
            }
            c = lo;
            apply(level, lo);
        } else if (c >= hi) {
            apply(level, -c);
            c = -1;
            stack.pop_back();
            continue;
        } else {
            ++c;
            apply(level, 1);
        }
        if (stats) ++stats->nodes;
        if (over_upper(level)) {
            apply(level, -c);
            c = -1;
            stack.pop_back();
            continue;
        }
        stack.push_back({level + 1, frame.remaining - c});
    }
}

bool single_group(const ProfileTally& tally) { return tally.protected_count == 1; }

// n_p = 1: choose x protected and slack - x unprotected tied candidates,
// taking the best reference scores within each profile.
std::optional<TieAssignment> single_group_best(const ProfileTally& tally, int slack, const FairnessSpec& spec)
{
    std::optional<std::size_t> unprot, prot;
    for (std::size_t j = 0; j < tally.codes.size(); ++j) (tally.codes[j] == 0 ? unprot : prot) = j;
    const int a0 = unprot ? tally.available[*unprot] : 0;
    const int a1 = prot ? tally.available[*prot] : 0;
    const int base = tally.base_counts[0];
    const int lo = std::max({0, slack - a0, spec[0].lower - base});
    const int hi = std::min({slack, a1, spec[0].upper - base});
    if (lo > hi) return std::nullopt;

    auto prefix = [&](const std::optional<std::size_t>& j, int c) {
        if (!j || tally.score_prefix.empty()) return 0.0;
        return tally.score_prefix[*j][static_cast<std::size_t>(c)];
    };
    int best_x = lo;
    double best = prefix(prot, lo) + prefix(unprot, slack - lo);
    for (int x = lo + 1; x <= hi; ++x) {
        const double u = prefix(prot, x) + prefix(unprot, slack - x);
        if (u > best) {
            best = u;
            best_x = x;
        }
    }
    TieAssignment out;
    out.counts.assign(tally.codes.size(), 0);
    if (prot) out.counts[*prot] = best_x;
    if (unprot) out.counts[*unprot] = slack - best_x;
    out.utility = best;
    return out;
}

void check_spec(const ProfileTally& tally, const FairnessSpec& spec)
{
    if (spec.size() != tally.protected_count) throw DomainError("fairness spec size differs from protected group count");
}

}  // namespace

bool backtrack_tiebreak(const ProfileTally& tally, int slack, const FairnessSpec& spec, SearchStats* stats)
{
    return first_fair_assignment(tally, slack, spec, stats).has_value();
}

std::optional<TieAssignment> first_fair_assignment(const ProfileTally& tally, int slack, const FairnessSpec& spec,
                                                   SearchStats* stats)
{
    check_spec(tally, spec);
    if (greedy_prune(tally, slack, spec)) return std::nullopt;
    std::optional<TieAssignment> found;
    search_assignments(tally, slack, spec, stats, [&](const std::vector<int>& counts) {
        found = TieAssignment{counts, assignment_utility(tally, counts)};
        return true;
    });
    return found;
}

std::optional<TieAssignment> max_utility_tiebreak(const ProfileTally& tally, int slack, const FairnessSpec& spec,
                                                  SearchStats* stats)
{
    check_spec(tally, spec);
    if (slack < 0 || slack > tally.total_available()) return std::nullopt;
    if (greedy_prune(tally, slack, spec)) return std::nullopt;
    if (single_group(tally)) return single_group_best(tally, slack, spec);
    std::optional<TieAssignment> best;
    search_assignments(tally, slack, spec, stats, [&](const std::vector<int>& counts) {
        const double u = assignment_utility(tally, counts);
        if (!best || u > best->utility) best = TieAssignment{counts, u};
        return false;
    });
    return best;
}

bool verify_fair(const Dataset& data, int k, const FairnessSpec& spec, const WeightVector& w)
{
    const auto dec = decompose_topk(data, k, w);
    const auto tally = build_tally(data, dec.strict, dec.tied(), nullptr);
    check_spec(tally, spec);
    if (spec.size() == 0) return true;
    if (greedy_prune(tally, dec.slack, spec)) return false;
    // With one protected group the greedy interval is exact.
    if (spec.size() == 1) return true;
    return backtrack_tiebreak(tally, dec.slack, spec);
}

std::vector<CandidateIndex> materialize(const ProfileTally& tally, const TieAssignment& assignment)
{
    std::vector<CandidateIndex> out;
    for (std::size_t j = 0; j < assignment.counts.size(); ++j)
        for (int c = 0; c < assignment.counts[j]; ++c) out.push_back(tally.members[j][static_cast<std::size_t>(c)]);
    return out;
}

std::optional<std::vector<CandidateIndex>> fair_topk_witness(const Dataset& data, int k, const FairnessSpec& spec,
                                                             const WeightVector& w, Objective objective,
                                                             const WeightVector& reference)
{
    const auto dec = decompose_topk(data, k, w);
    const auto tally = build_tally(data, dec.strict, dec.tied(), &reference);
    const auto assignment = objective == Objective::UtilityLoss ? max_utility_tiebreak(tally, dec.slack, spec)
                                                                : first_fair_assignment(tally, dec.slack, spec);
    if (!assignment) return std::nullopt;
    std::vector<CandidateIndex> subset = dec.strict;
    const auto chosen = materialize(tally, *assignment);
    subset.insert(subset.end(), chosen.begin(), chosen.end());
    std::sort(subset.begin(), subset.end());
    return subset;
}

bool naive_verify_oracle(const Dataset& data, int k, const FairnessSpec& spec, const WeightVector& w,
                         std::uint64_t budget)
{
    const std::size_t n = data.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw DomainError("k must satisfy 1 <= k <= n");
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t a = 0; a < data.dimension(); ++a) v += w[a] * data[i].point[a];
        s[i] = v;
    }
    std::vector<double> sorted = s;
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(), std::greater<>());
    const double kth = sorted[static_cast<std::size_t>(k) - 1];

    std::vector<CandidateIndex> fixed, tied;
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] > kth + kTieTolerance)
            fixed.push_back(i);
        else if (s[i] >= kth - kTieTolerance)
            tied.push_back(i);
    }
    const std::size_t t = static_cast<std::size_t>(k) - fixed.size();
    if (t > tied.size()) return false;

    double combos = 1.0;
    for (std::size_t i = 0; i < t; ++i) combos = combos * static_cast<double>(tied.size() - i) / static_cast<double>(i + 1);
    if (combos > static_cast<double>(budget)) throw RefusalError("naive verification would enumerate too many subsets");

    const std::size_t np = data.protected_count();
    std::vector<int> base(np, 0);
    for (auto i : fixed)
        for (auto g : data[i].groups)
            if (g < np) ++base[g];

    std::vector<std::size_t> pick(t);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
        std::vector<int> counts = base;
        for (auto p : pick)
            for (auto g : data[tied[p]].groups)
                if (g < np) ++counts[g];
        bool ok = true;
        for (std::size_t g = 0; g < np && ok; ++g) ok = counts[g] >= spec[g].lower && counts[g] <= spec[g].upper;
        if (ok) return true;

        // next combination in lexicographic order
        std::size_t i = t;
        while (i > 0 && pick[i - 1] == tied.size() - t + i - 1) --i;
        if (i == 0) return false;
        ++pick[i - 1];
        for (std::size_t j = i; j < t; ++j) pick[j] = pick[j - 1] + 1;
    }
}

}  // namespace fairtopk

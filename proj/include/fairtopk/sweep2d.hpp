#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "fairtopk/core.hpp"
#include "fairtopk/geometry.hpp"
#include "fairtopk/verify.hpp"

namespace fairtopk {

// Lines closer than this in value are ordered as they will be just after x.
inline constexpr double kOrderTolerance = 1e-12;

// True when line a ranks above line b just after abscissa x.
bool ranks_above(const DualLine& a, const DualLine& b, double x);

/// A tournament tree over dual lines whose root is the lowest-ranked
/// (Min) or highest-ranked (Max) line, maintained kinetically in x.
class KineticTournament {
public:
    enum class Kind { Min, Max };

    KineticTournament() = default;
    KineticTournament(const std::vector<DualLine>* lines, Kind kind, std::vector<CandidateIndex> members, double x);

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    // -1 when empty
    long long root() const { return winner_[1]; }
    std::vector<CandidateIndex> members() const;

    // Time of the earliest pending certificate failure.
    double next_failure();
    // Repairs the node whose certificate fails first; x becomes its failure time.
    void process_failure();
    // Puts line incoming into the leaf holding outgoing, at abscissa x.
    void replace(CandidateIndex outgoing, CandidateIndex incoming, double x);

    // Leaves whose value at x lies within threshold of the winning side:
    // value <= threshold for Min, value >= threshold for Max.
    void collect(double x, double threshold, std::vector<CandidateIndex>& out) const;

    // Root agrees with a direct scan at x.
    bool consistent(double x) const;

private:
    struct Certificate {
        double time;
        std::size_t node;
        std::uint64_t version;
        bool operator>(const Certificate& o) const { return time > o.time || (time == o.time && node > o.node); }
    };

    bool better(long long a, long long b, double x) const;
    void refresh(std::size_t node, double x);
    void collect_from(std::size_t node, double x, double threshold, std::vector<CandidateIndex>& out) const;

    const std::vector<DualLine>* lines_ = nullptr;
    Kind kind_ = Kind::Min;
    std::size_t count_ = 0;
    std::size_t leaves_ = 1;
    std::vector<long long> winner_;
    std::vector<std::uint64_t> version_;
    std::vector<std::size_t> slot_;  // leaf node per line, indexed by line
    std::priority_queue<Certificate, std::vector<Certificate>, std::greater<>> certificates_;
};

struct ExchangeEvent {
    double x = 0.0;
    CandidateIndex leaving = 0;   // left the upper set
    CandidateIndex entering = 0;  // joined the upper set
};

/// The k highest dual lines (upper set) against the rest, swept rightwards.
class KineticSweep {
public:
    // The upper set starts as the top-k just after x0.
    KineticSweep(const Dataset& data, int k, double x0);

    double x() const { return x_; }
    int k() const { return k_; }
    const std::vector<DualLine>& lines() const { return lines_; }
    const KineticTournament& upper() const { return upper_; }
    const KineticTournament& lower() const { return lower_; }
    // Protected-group counts of the upper set.
    const std::vector<int>& counts() const { return counts_; }
    bool in_upper(CandidateIndex i) const { return in_upper_[i]; }

    // Processes internal certificate failures up to min(limit, next exchange)
    // and returns the abscissa of the next exchange (infinity if none).
    double advance(double limit);
    // Performs the next exchange; call only when advance returned a finite value.
    ExchangeEvent exchange();

    // Tie decomposition at p, which must not lie past the next pending event.
    TieDecomposition ties_at(double p) const;

private:
    double exchange_time() const;

    const Dataset& data_;
    int k_;
    double x_;
    std::vector<DualLine> lines_;
    std::vector<bool> in_upper_;
    std::vector<int> counts_;
    KineticTournament upper_;
    KineticTournament lower_;
};

// Weight (x, 1 - x); exactly the reference when x is its first component.
WeightVector weight_at(double x, const WeightRegion& region);

struct SweepOptions {
    bool early_termination = true;
};

struct SweepStats {
    std::size_t exchanges = 0;
    std::size_t evaluations = 0;
};

/// Fair weight in a 2-D region minimizing the region's objective.
std::optional<FairResult> sweep_select(const Dataset& data, int k, const FairnessSpec& spec, const WeightRegion& region,
                                       const SweepOptions& options = {}, SweepStats* stats = nullptr);

}  // namespace fairtopk

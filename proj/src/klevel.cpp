#include "fairtopk/klevel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "fairtopk/geometry.hpp"
#include "fairtopk/lp.hpp"
#include "fairtopk/objective.hpp"

namespace fairtopk {

namespace {

struct SubsetHash {
    std::size_t operator()(const std::vector<CandidateIndex>& s) const
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto i : s) {
            h ^= static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ULL;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

std::vector<bool> membership(std::size_t n, std::span<const CandidateIndex> subset)
{
    std::vector<bool> in(n, false);
    for (auto i : subset) in[i] = true;
    return in;
}

// Lower result first: objective, then subset, then witness.
bool preferred(const FairResult& a, const FairResult& b)
{
    if (a.objective_value != b.objective_value) return a.objective_value < b.objective_value;
    if (a.subset != b.subset) return a.subset < b.subset;
    return a.weight.values() < b.weight.values();
}

}  // namespace

CellNode initial_cell(const Dataset& data, int k, const WeightRegion& region)
{
    const auto centre = region_center(region);
    if (!centre) throw DomainError("empty weight region");
    const auto dec = decompose_topk(data, k, *centre);
    CellNode node{dec.strict, *centre};
    node.subset.insert(node.subset.end(), dec.m1.begin(), dec.m1.end());
    std::sort(node.subset.begin(), node.subset.end());
    return node;
}

namespace {

std::vector<CandidateIndex> everyone(std::size_t n)
{
    std::vector<CandidateIndex> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
}

// Only the candidates in rows get constraints.
std::optional<WeightVector> witness_over(const Dataset& data, std::span<const CandidateIndex> subset,
                                         std::span<const CandidateIndex> rows, const WeightRegion& region,
                                         std::uint64_t seed, std::optional<CandidateIndex> tied = std::nullopt)
{
    const std::size_t d = data.dimension();
    const std::size_t lam = d - 1, sig = d;
    const auto in = membership(data.size(), subset);

    // variables y_1..y_{d-1}, lambda, sigma
    LpProblem lp(d + 1);
    lp.objective[sig] = 1.0;
    for (std::size_t i = 0; i + 1 < d; ++i) lp.set_bounds(i, 0.0, 1.0);
    lp.set_bounds(lam, -1.0, 2.0);
    lp.set_bounds(sig, -1.0, 1.0);
    for (auto c : rows) {
        const auto& p = data[c].point;
        const double sign = in[c] ? 1.0 : -1.0;
        std::vector<double> row(d + 1, 0.0);
        for (std::size_t i = 0; i + 1 < d; ++i) row[i] = sign * (p[i] - p[d - 1]);
        row[lam] = -sign;
        row[sig] = -1.0;
        // members: p.w - lambda - sigma >= 0; others: lambda - p.w - sigma >= 0
        if (tied == c) {
            // Also on the other side of the cutoff.
            std::vector<double> flip(row);
            for (std::size_t i = 0; i < d; ++i) flip[i] = -flip[i];
            flip[sig] = -1.0;
            lp.add_row(std::move(flip), RowSense::GreaterEqual, sign * p[d - 1]);
        }
        lp.add_row(std::move(row), RowSense::GreaterEqual, -sign * p[d - 1]);
    }
    for (const auto& h : projected_region(region)) {
        std::vector<double> row(d + 1, 0.0);
        std::copy(h.coeffs.begin(), h.coeffs.end(), row.begin());
        lp.add_row(std::move(row), RowSense::GreaterEqual, -h.offset);
    }
    std::uint64_t s = seed ^ SubsetHash{}(std::vector<CandidateIndex>(subset.begin(), subset.end()));
    const auto out = solve_lp(lp, s);
    if (!out.optimal() || out.x[sig] < -0.5 * kTieTolerance) return std::nullopt;
    std::vector<double> y(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(d - 1));
    double sum = 0.0;
    for (auto& v : y) sum += (v = std::max(0.0, v));
    if (sum > 1.0)
        for (auto& v : y) v /= sum;
    return lift_weight(y);
}

std::optional<std::pair<WeightVector, double>> min_wdiff_over(const Dataset& data,
                                                              std::span<const CandidateIndex> subset,
                                                              std::span<const CandidateIndex> rows,
                                                              const WeightRegion& region)
{
    const std::size_t d = data.dimension();
    const std::size_t lam = d;
    const auto in = membership(data.size(), subset);
    const auto& wo = region.reference;

    // variables w_1..w_d, lambda, phi_1..phi_d
    LpProblem lp(2 * d + 1);
    lp.maximize = false;
    for (std::size_t i = 0; i < d; ++i) lp.objective[lam + 1 + i] = 1.0;
    add_region_rows(lp, region, 0);
    lp.set_bounds(lam, -1.0, 2.0);
    for (std::size_t i = 0; i < d; ++i) lp.set_bounds(lam + 1 + i, 0.0, 2.0);
    for (auto c : rows) {
        const double sign = in[c] ? 1.0 : -1.0;
        std::vector<double> row(2 * d + 1, 0.0);
        for (std::size_t i = 0; i < d; ++i) row[i] = sign * data[c].point[i];
        row[lam] = -sign;
        lp.add_row(std::move(row), RowSense::GreaterEqual, 0.0);
    }
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> above(2 * d + 1, 0.0), below(2 * d + 1, 0.0);
        above[lam + 1 + i] = 1.0;
        above[i] = -1.0;
        lp.add_row(std::move(above), RowSense::GreaterEqual, -wo[i]);
        below[lam + 1 + i] = 1.0;
        below[i] = 1.0;
        lp.add_row(std::move(below), RowSense::GreaterEqual, wo[i]);
    }
    const auto out = simplex_lp(lp);
    if (!out.optimal()) return std::nullopt;
    const WeightVector w = WeightVector::from_solver(
        std::vector<double>(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(d)));
    return std::make_pair(w, w_difference(w, wo));
}

}  // namespace

std::optional<WeightVector> cell_witness(const Dataset& data, std::span<const CandidateIndex> subset,
                                         const WeightRegion& region, std::uint64_t seed)
{
    return witness_over(data, subset, everyone(data.size()), region, seed);
}

std::optional<WeightVector> swap_feasible(const Dataset& data, std::span<const CandidateIndex> subset,
                                          CandidateIndex out, CandidateIndex in, const WeightRegion& region,
                                          std::uint64_t seed)
{
    std::vector<CandidateIndex> next;
    next.reserve(subset.size());
    for (auto i : subset)
        if (i != out) next.push_back(i);
    if (next.size() == subset.size()) throw DomainError("swapped-out candidate is not a member");
    if (std::find(next.begin(), next.end(), in) != next.end()) throw DomainError("swapped-in candidate is a member");
    next.insert(std::upper_bound(next.begin(), next.end(), in), in);
    return cell_witness(data, next, region, seed);
}

std::optional<std::pair<WeightVector, double>> cell_min_wdiff(const Dataset& data,
                                                              std::span<const CandidateIndex> subset,
                                                              const WeightRegion& region)
{
    return min_wdiff_over(data, subset, everyone(data.size()), region);
}

std::optional<FairResult> traverse(const Dataset& data, int k, const FairnessSpec& spec, const WeightRegion& region,
                                   const TraverseOptions& options, TraverseStats* stats)
{
    const std::size_t n = data.size();
    const std::size_t d = data.dimension();
    if (d < 2) throw DomainError("traverse needs d >= 2");
    if (k < 1 || static_cast<std::size_t>(k) > n) throw DomainError("k must satisfy 1 <= k <= n");
    const auto vertices = region_extreme_points(region);
    if (vertices.empty()) return std::nullopt;
    const double ref_utility = reference_utility(data, k, region.reference);

    // Scores at the region's vertices, for skipping swaps that cannot happen inside it.
    std::vector<std::vector<double>> at_vertex(n, std::vector<double>(vertices.size()));
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        std::vector<double> y = vertices[v];
        double sum = 0.0;
        for (auto& x : y) sum += (x = std::max(0.0, x));
        if (sum > 1.0)
            for (auto& x : y) x /= sum;
        const auto w = lift_weight(y);
        for (std::size_t c = 0; c < n; ++c) at_vertex[c][v] = score(w, data[c]);
    }
    auto always_above = [&](CandidateIndex a, CandidateIndex b) {
        for (std::size_t v = 0; v < vertices.size(); ++v)
            if (at_vertex[a][v] <= at_vertex[b][v] + kTieTolerance) return false;
        return true;
    };

    // Candidates that are outside (or inside) every top-k in the region never move; their rows are implied.
    std::vector<CandidateIndex> band;
    std::vector<bool> movable(n, false);
    for (CandidateIndex c = 0; c < n; ++c) {
        std::size_t above = 0, below = 0;
        for (CandidateIndex o = 0; o < n; ++o) {
            if (o == c) continue;
            if (always_above(o, c))
                ++above;
            else if (always_above(c, o))
                ++below;
        }
        if (above < static_cast<std::size_t>(k) && below < n - static_cast<std::size_t>(k)) {
            band.push_back(c);
            movable[c] = true;
        }
    }

    std::mutex mutex;
    std::condition_variable wake;
    std::deque<CellNode> frontier;
    std::unordered_set<std::vector<CandidateIndex>, SubsetHash> claimed;
    std::size_t active = 0;
    std::atomic<std::uint64_t> tests{0}, skipped{0}, cells{0};
    std::atomic<bool> exhausted{false};
    std::vector<std::vector<CandidateIndex>> visited;

    auto claim = [&](const std::vector<CandidateIndex>& s) {
        std::lock_guard lock(mutex);
        return claimed.insert(s).second;
    };
    auto push = [&](CellNode node) {
        {
            std::lock_guard lock(mutex);
            frontier.push_back(std::move(node));
        }
        wake.notify_one();
    };

    // Seeds: the centre and every vertex, each with its canonical witness.
    {
        std::vector<WeightVector> seeds{initial_cell(data, k, region).witness};
        for (const auto& v : vertices) {
            std::vector<double> y = v;
            double sum = 0.0;
            for (auto& x : y) sum += (x = std::max(0.0, x));
            if (sum > 1.0)
                for (auto& x : y) x /= sum;
            seeds.push_back(lift_weight(y));
        }
        for (const auto& w : seeds) {
            const auto dec = decompose_topk(data, k, w);
            std::vector<CandidateIndex> s = dec.strict;
            s.insert(s.end(), dec.m1.begin(), dec.m1.end());
            std::sort(s.begin(), s.end());
            if (!claim(s)) continue;
            ++tests;
            auto witness = witness_over(data, s, band, region, options.seed);
            frontier.push_back({s, witness ? *witness : w});
        }
    }

    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    std::vector<std::optional<FairResult>> best(workers);

    auto evaluate = [&](const CellNode& node, std::optional<FairResult>& local) {
        if (!is_fair_counts(group_counts(data, node.subset), spec)) return;
        FairResult r;
        r.subset = node.subset;
        r.utility = utility(node.subset, region.reference, data);
        r.engine = "klevel";
        if (region.objective == Objective::WDifference) {
            const auto closest = min_wdiff_over(data, node.subset, band, region);
            if (!closest) return;
            r.weight = closest->first;
            r.objective_value = closest->second;
        } else {
            r.weight = node.witness;
            r.objective_value = utility_loss(r.utility, ref_utility);
        }
        if (!local || preferred(r, *local)) local = std::move(r);
    };

    auto expand = [&](const CellNode& node) {
        const auto in = membership(n, node.subset);
        // Only candidates that can sit at the cutoff somewhere in this cell take part in a swap.
        std::vector<CandidateIndex> outs, ins;
        for (auto c : band) {
            if (++tests > options.budget) {
                exhausted = true;
                return;
            }
            if (witness_over(data, node.subset, band, region, options.seed, c)) (in[c] ? outs : ins).push_back(c);
        }
        for (auto out : outs) {
            for (auto c : ins) {
                if (always_above(out, c)) {
                    ++skipped;
                    continue;
                }
                std::vector<CandidateIndex> next;
                next.reserve(node.subset.size());
                for (auto i : node.subset)
                    if (i != out) next.push_back(i);
                next.insert(std::upper_bound(next.begin(), next.end(), c), c);
                if (!claim(next)) continue;
                if (++tests > options.budget) {
                    exhausted = true;
                    return;
                }
                if (auto w = witness_over(data, next, band, region, options.seed)) push({std::move(next), std::move(*w)});
            }
        }
    };

    auto work = [&](std::size_t id) {
        while (true) {
            CellNode node;
            {
                std::unique_lock lock(mutex);
                wake.wait(lock, [&] { return exhausted || !frontier.empty() || active == 0; });
                if (exhausted || frontier.empty()) {
                    wake.notify_all();
                    return;
                }
                node = std::move(frontier.front());
                frontier.pop_front();
                ++active;
                if (options.record_cells) visited.push_back(node.subset);
            }
            ++cells;
            evaluate(node, best[id]);
            expand(node);
            {
                std::lock_guard lock(mutex);
                --active;
            }
            wake.notify_all();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t id = 0; id < workers; ++id) pool.emplace_back(work, id);
        for (auto& t : pool) t.join();
    }

    if (stats) {
        stats->cells = cells;
        stats->swap_tests = tests;
        stats->skipped = skipped;
        if (options.record_cells) {
            std::sort(visited.begin(), visited.end());
            stats->visited = std::move(visited);
        }
    }
    if (exhausted) throw RefusalError("cell traversal exceeded its budget of " + std::to_string(options.budget) +
                                      " swap tests; the partial result is discarded");

    std::optional<FairResult> result;
    for (auto& b : best)
        if (b && (!result || preferred(*b, *result))) result = std::move(b);
    return result;
}

}  // namespace fairtopk

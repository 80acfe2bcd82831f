#include "fairtopk/sweep2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairtopk/objective.hpp"

namespace fairtopk {

namespace {
constexpr double kNever = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);
// Slack on pruning by line values, which round differently from scores.
constexpr double kCollectMargin = 4 * kOrderTolerance;
}  // namespace

bool ranks_above(const DualLine& a, const DualLine& b, double x)
{
    const double va = a.at(x), vb = b.at(x);
    if (std::abs(va - vb) > kOrderTolerance) return va > vb;
    if (a.slope != b.slope) return a.slope > b.slope;
    return a.owner < b.owner;
}

KineticTournament::KineticTournament(const std::vector<DualLine>* lines, Kind kind, std::vector<CandidateIndex> members,
                                     double x)
    : lines_(lines), kind_(kind), count_(members.size())
{
    while (leaves_ < count_) leaves_ *= 2;
    winner_.assign(2 * leaves_, -1);
    version_.assign(2 * leaves_, 0);
    slot_.assign(lines->size(), kNoSlot);
    for (std::size_t i = 0; i < members.size(); ++i) {
        winner_[leaves_ + i] = static_cast<long long>(members[i]);
        slot_[members[i]] = leaves_ + i;
    }
    for (std::size_t node = leaves_; node-- > 1;) refresh(node, x);
}

std::vector<CandidateIndex> KineticTournament::members() const
{
    std::vector<CandidateIndex> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < leaves_; ++i)
        if (winner_[leaves_ + i] >= 0) out.push_back(static_cast<CandidateIndex>(winner_[leaves_ + i]));
    return out;
}

bool KineticTournament::better(long long a, long long b, double x) const
{
    if (a < 0) return false;
    if (b < 0) return true;
    const auto& la = (*lines_)[static_cast<std::size_t>(a)];
    const auto& lb = (*lines_)[static_cast<std::size_t>(b)];
    return kind_ == Kind::Max ? ranks_above(la, lb, x) : ranks_above(lb, la, x);
}

void KineticTournament::refresh(std::size_t node, double x)
{
    const long long l = winner_[2 * node], r = winner_[2 * node + 1];
    const long long w = better(r, l, x) ? r : l;
    const long long o = w == l ? r : l;
    winner_[node] = w;
    ++version_[node];
    if (w < 0 || o < 0) return;

    const auto& lw = (*lines_)[static_cast<std::size_t>(w)];
    const auto& lo = (*lines_)[static_cast<std::size_t>(o)];
    double t = kNever;
    // The loser takes over once its line passes the winner's.
    if (kind_ == Kind::Min ? lo.slope < lw.slope : lo.slope > lw.slope) t = std::max(x, crossing(lw, lo));
    if (t < kNever) certificates_.push({t, node, version_[node]});
}

double KineticTournament::next_failure()
{
    while (!certificates_.empty() && certificates_.top().version != version_[certificates_.top().node])
        certificates_.pop();
    return certificates_.empty() ? kNever : certificates_.top().time;
}

void KineticTournament::process_failure()
{
    if (next_failure() == kNever) return;
    const Certificate c = certificates_.top();
    certificates_.pop();
    for (std::size_t node = c.node; node >= 1; node /= 2) refresh(node, c.time);
}

void KineticTournament::replace(CandidateIndex outgoing, CandidateIndex incoming, double x)
{
    const std::size_t s = slot_[outgoing];
    if (s == kNoSlot) throw DomainError("line is not in this tournament");
    winner_[s] = static_cast<long long>(incoming);
    slot_[incoming] = s;
    slot_[outgoing] = kNoSlot;
    for (std::size_t node = s / 2; node >= 1; node /= 2) refresh(node, x);
}

void KineticTournament::collect(double x, double threshold, std::vector<CandidateIndex>& out) const
{
    if (count_ > 0) collect_from(1, x, threshold, out);
}

void KineticTournament::collect_from(std::size_t node, double x, double threshold,
                                     std::vector<CandidateIndex>& out) const
{
    const long long w = winner_[node];
    if (w < 0) return;
    const double v = (*lines_)[static_cast<std::size_t>(w)].at(x);
    if (kind_ == Kind::Min ? v > threshold + kCollectMargin : v < threshold - kCollectMargin) return;
    if (node >= leaves_) {
        out.push_back(static_cast<CandidateIndex>(w));
        return;
    }
    collect_from(2 * node, x, threshold, out);
    collect_from(2 * node + 1, x, threshold, out);
}

bool KineticTournament::consistent(double x) const
{
    long long best = -1;
    for (std::size_t i = 0; i < leaves_; ++i)
        if (better(winner_[leaves_ + i], best, x)) best = winner_[leaves_ + i];
    if (best < 0 || root() < 0) return best == root();
    const double a = (*lines_)[static_cast<std::size_t>(best)].at(x);
    const double b = (*lines_)[static_cast<std::size_t>(root())].at(x);
    return std::abs(a - b) <= kOrderTolerance;
}

KineticSweep::KineticSweep(const Dataset& data, int k, double x0) : data_(data), k_(k), x_(x0)
{
    if (data.dimension() != 2) throw DomainError("the sweep needs two scoring attributes");
    if (k < 1 || static_cast<std::size_t>(k) > data.size()) throw DomainError("k must satisfy 1 <= k <= n");
    lines_ = dual_lines(data);
    std::vector<CandidateIndex> order(data.size());
    std::iota(order.begin(), order.end(), CandidateIndex{0});
    std::sort(order.begin(), order.end(), [&](CandidateIndex a, CandidateIndex b) {
        const double va = lines_[a].at(x0), vb = lines_[b].at(x0);
        if (va != vb) return va > vb;
        if (lines_[a].slope != lines_[b].slope) return lines_[a].slope > lines_[b].slope;
        return a < b;
    });
    std::vector<CandidateIndex> top(order.begin(), order.begin() + k), rest(order.begin() + k, order.end());
    in_upper_.assign(data.size(), false);
    counts_.assign(data.protected_count(), 0);
    for (auto i : top) {
        in_upper_[i] = true;
        for (auto g : data[i].groups)
            if (g < counts_.size()) ++counts_[g];
    }
    upper_ = KineticTournament(&lines_, KineticTournament::Kind::Min, top, x0);
    lower_ = KineticTournament(&lines_, KineticTournament::Kind::Max, rest, x0);
}

double KineticSweep::exchange_time() const
{
    if (upper_.empty() || lower_.empty()) return kNever;
    const auto& a = lines_[static_cast<std::size_t>(upper_.root())];
    const auto& b = lines_[static_cast<std::size_t>(lower_.root())];
    if (ranks_above(b, a, x_)) return x_;
    if (b.slope > a.slope) return std::max(x_, crossing(a, b));
    return kNever;
}

double KineticSweep::advance(double limit)
{
    while (true) {
        const double te = exchange_time();
        const double tu = upper_.next_failure(), tl = lower_.next_failure();
        const double tc = std::min(tu, tl);
        if (tc > te || tc > limit) return te;
        x_ = std::max(x_, tc);
        (tu <= tl ? upper_ : lower_).process_failure();
    }
}

ExchangeEvent KineticSweep::exchange()
{
    const double te = exchange_time();
    if (te == kNever) throw DomainError("no exchange is pending");
    x_ = te;
    const auto a = static_cast<CandidateIndex>(upper_.root());
    const auto b = static_cast<CandidateIndex>(lower_.root());
    upper_.replace(a, b, x_);
    lower_.replace(b, a, x_);
    in_upper_[a] = false;
    in_upper_[b] = true;
    for (auto g : data_[a].groups)
        if (g < counts_.size()) --counts_[g];
    for (auto g : data_[b].groups)
        if (g < counts_.size()) ++counts_[g];
    return {x_, a, b};
}

TieDecomposition KineticSweep::ties_at(double p) const
{
    const WeightVector w = WeightVector::from_solver({p, 1.0 - p});
    TieDecomposition dec;
    const auto root = static_cast<CandidateIndex>(upper_.root());
    std::vector<CandidateIndex> near;
    upper_.collect(p, lines_[root].at(p) + kTieTolerance, near);

    dec.pivot = root;
    dec.pivot_score = score(w, data_[root]);
    for (auto i : near) {
        const double s = score(w, data_[i]);
        if (s < dec.pivot_score || (s == dec.pivot_score && i > dec.pivot)) {
            dec.pivot_score = s;
            dec.pivot = i;
        }
    }
    for (auto i : near)
        if (score(w, data_[i]) <= dec.pivot_score + kTieTolerance) dec.m1.push_back(i);
    std::sort(dec.m1.begin(), dec.m1.end());
    for (auto i : upper_.members())
        if (!std::binary_search(dec.m1.begin(), dec.m1.end(), i)) dec.strict.push_back(i);
    std::sort(dec.strict.begin(), dec.strict.end());

    std::vector<CandidateIndex> below;
    lower_.collect(p, dec.pivot_score - kTieTolerance, below);
    for (auto i : below)
        if (score(w, data_[i]) >= dec.pivot_score - kTieTolerance) dec.m2.push_back(i);
    std::sort(dec.m2.begin(), dec.m2.end());
    dec.slack = static_cast<int>(dec.m1.size());
    return dec;
}

WeightVector weight_at(double x, const WeightRegion& region)
{
    if (x == region.reference[0]) return region.reference;
    return WeightVector::from_solver({x, 1.0 - x});
}

std::optional<FairResult> sweep_select(const Dataset& data, int k, const FairnessSpec& spec, const WeightRegion& region,
                                       const SweepOptions& options, SweepStats* stats)
{
    if (data.dimension() != 2 || region.dimension() != 2) throw DomainError("sweep_select needs d = 2");
    const auto interval = region_interval(region);
    if (!interval) return std::nullopt;
    const auto [lb, ub] = *interval;
    const double wo_x = region.reference[0];
    const double ref_utility = reference_utility(data, k, region.reference);
    const bool wdiff = region.objective == Objective::WDifference;

    KineticSweep sweep(data, k, lb);
    std::optional<FairResult> best;
    double last = -kNever;
    bool stop = false;

    auto evaluate = [&](double p) {
        if (p <= last) return;
        last = p;
        const WeightVector w = weight_at(p, region);
        auto r = evaluate_decomposition(data, spec, region, w, sweep.ties_at(p), ref_utility);
        const bool fair = r.has_value();
        if (stats) ++stats->evaluations;
        if (fair && (!best || r->objective_value < best->objective_value)) best = std::move(r);
        if (!options.early_termination || p < wo_x || !best) return;
        // Past the reference every later position is farther away, and
        // its top-k utility can only be lower.
        if (fair || (wdiff && w_difference(w, region.reference) > best->objective_value)) stop = true;
    };

    std::vector<double> targets;
    if (wo_x >= lb && wo_x <= ub) targets.push_back(wo_x);
    targets.push_back(ub);

    evaluate(lb);
    for (double target : targets) {
        while (!stop) {
            const double te = sweep.advance(target);
            if (te > target) break;
            evaluate(te);
            if (stop) break;
            sweep.exchange();
            if (stats) ++stats->exchanges;
        }
        if (stop) break;
        evaluate(target);
        if (stop) break;
    }
    if (best) best->engine = "sweep2d";
    return best;
}

}  // namespace fairtopk

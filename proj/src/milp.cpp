#include "fairtopk/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <set>
#include <sstream>

#include "fairtopk/geometry.hpp"
#include "fairtopk/klevel.hpp"
#include "fairtopk/objective.hpp"
#include "fairtopk/verify.hpp"

namespace fairtopk {

namespace {

constexpr double kIntegrality = 1e-6;

std::string number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Node {
    double bound = 0.0;  // on the minimized key
    std::size_t depth = 0;
    std::size_t order = 0;
    std::vector<std::pair<std::size_t, double>> fixings;  // column, value
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const
    {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.order > b.order;
    }
};

}  // namespace

MilpModel build_milp(const Dataset& data, int k, const FairnessSpec& spec, const WeightRegion& region)
{
    const std::size_t n = data.size(), d = data.dimension();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw DomainError("k must satisfy 1 <= k <= n");
    for (const auto& c : data.candidates())
        for (double v : c.point)
            if (v < -1e-12 || v > 1.0 + 1e-12)
                throw DomainError("the indicator model needs attributes normalized to [0, 1]");

    MilpModel m{data, k, spec, region, LpProblem(), {}, {}};
    const bool wdiff = region.objective == Objective::WDifference;
    const std::size_t cols = d + 1 + (wdiff ? d : 0) + n;
    m.relaxation = LpProblem(cols);
    auto& lp = m.relaxation;
    for (std::size_t i = 0; i < d; ++i) m.column_names.push_back("w" + std::to_string(i + 1));
    m.column_names.push_back("lambda");
    if (wdiff)
        for (std::size_t i = 0; i < d; ++i) m.column_names.push_back("phi" + std::to_string(i + 1));
    for (std::size_t c = 0; c < n; ++c) m.column_names.push_back("delta" + std::to_string(data[c].id));

    for (std::size_t i = 0; i < d; ++i) lp.set_bounds(m.w_column(i), 0.0, 1.0);
    lp.set_bounds(m.lambda_column(), 0.0, 1.0);
    if (wdiff)
        for (std::size_t i = 0; i < d; ++i) lp.set_bounds(m.phi_column(i), 0.0, kInfinity);
    for (std::size_t c = 0; c < n; ++c) lp.set_bounds(m.delta_column(c), 0.0, 1.0);

    if (wdiff) {
        lp.maximize = false;
        for (std::size_t i = 0; i < d; ++i) lp.objective[m.phi_column(i)] = 1.0;
    } else {
        lp.maximize = true;
        for (std::size_t c = 0; c < n; ++c) lp.objective[m.delta_column(c)] = score(region.reference, data[c]);
    }

    auto add = [&](std::string name, std::vector<double> row, RowSense sense, double rhs) {
        lp.add_row(std::move(row), sense, rhs);
        m.row_names.push_back(std::move(name));
    };
    // -1 <= w.p - lambda - delta <= 0
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> row(cols, 0.0);
        for (std::size_t i = 0; i < d; ++i) row[m.w_column(i)] = data[c].point[i];
        row[m.lambda_column()] = -1.0;
        row[m.delta_column(c)] = -1.0;
        const std::string id = std::to_string(data[c].id);
        add("below_" + id, row, RowSense::LessEqual, 0.0);
        add("above_" + id, std::move(row), RowSense::GreaterEqual, -1.0);
    }
    {
        std::vector<double> row(cols, 0.0);
        for (std::size_t c = 0; c < n; ++c) row[m.delta_column(c)] = 1.0;
        add("cardinality", std::move(row), RowSense::Equal, static_cast<double>(k));
    }
    for (std::size_t g = 0; g < spec.size(); ++g) {
        std::vector<double> row(cols, 0.0);
        for (std::size_t c = 0; c < n; ++c)
            for (GroupId h : data[c].groups)
                if (h == g) row[m.delta_column(c)] = 1.0;
        const std::string name = data.group_names().empty() ? std::to_string(g) : data.group_names()[g];
        add("lower_" + name, row, RowSense::GreaterEqual, spec[g].lower);
        add("upper_" + name, std::move(row), RowSense::LessEqual, spec[g].upper);
    }
    {
        std::vector<double> row(cols, 0.0);
        for (std::size_t i = 0; i < d; ++i) row[m.w_column(i)] = 1.0;
        add("simplex", std::move(row), RowSense::Equal, 1.0);
    }
    for (std::size_t h = 0; h < region.halfspaces.size(); ++h) {
        std::vector<double> row(cols, 0.0);
        for (std::size_t i = 0; i < d; ++i) row[m.w_column(i)] = region.halfspaces[h].coeffs[i];
        add("region_" + std::to_string(h), std::move(row), RowSense::GreaterEqual, -region.halfspaces[h].offset);
    }
    if (wdiff) {
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<double> above(cols, 0.0), below(cols, 0.0);
            above[m.phi_column(i)] = 1.0;
            above[m.w_column(i)] = -1.0;
            add("phi_above_" + std::to_string(i + 1), std::move(above), RowSense::GreaterEqual, -region.reference[i]);
            below[m.phi_column(i)] = 1.0;
            below[m.w_column(i)] = 1.0;
            add("phi_below_" + std::to_string(i + 1), std::move(below), RowSense::GreaterEqual, region.reference[i]);
        }
    }
    return m;
}

std::string export_lp_format(const MilpModel& model)
{
    const auto& lp = model.relaxation;
    const auto& names = model.column_names;
    std::ostringstream out;
    auto expression = [&](const std::vector<double>& coeffs) {
        std::string s;
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            if (coeffs[j] == 0.0) continue;
            s += coeffs[j] < 0 ? " - " : (s.empty() ? " " : " + ");
            s += number(std::abs(coeffs[j])) + " " + names[j];
        }
        return s.empty() ? std::string(" 0 ") + names[0] : s;
    };
    out << (lp.maximize ? "Maximize\n" : "Minimize\n");
    out << " obj:" << expression(lp.objective) << "\n";
    out << "Subject To\n";
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        const auto& row = lp.rows[r];
        const char* sense = row.sense == RowSense::LessEqual ? "<=" : row.sense == RowSense::GreaterEqual ? ">=" : "=";
        out << " " << model.row_names[r] << ":" << expression(row.coeffs) << " " << sense << " " << number(row.rhs)
            << "\n";
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < lp.variables(); ++j) {
        const double lo = lp.lower_bound(j), hi = lp.upper_bound(j);
        if (std::isinf(hi))
            out << " " << names[j] << " >= " << number(lo) << "\n";
        else
            out << " " << number(lo) << " <= " << names[j] << " <= " << number(hi) << "\n";
    }
    out << "Binaries\n";
    for (std::size_t c = 0; c < model.data.size(); ++c) out << " " << names[model.delta_column(c)] << "\n";
    out << "End\n";
    return out.str();
}

std::optional<FairResult> solve_milp(const MilpModel& model, const MilpOptions& options, MilpStats* stats)
{
    const auto& data = model.data;
    const auto& region = model.region;
    const std::size_t n = data.size(), d = data.dimension();
    const bool wdiff = region.objective == Objective::WDifference;
    const double ref_utility = reference_utility(data, model.k, region.reference);

    // Everything is minimized internally: the w-difference, or minus the utility.
    auto key_of = [&](const FairResult& r) { return wdiff ? r.objective_value : -r.utility; };

    std::optional<FairResult> incumbent;
    double best = kInfinity;
    MilpStats local;
    std::set<std::vector<CandidateIndex>> tried;

    auto offer = [&](FairResult r) {
        const double key = key_of(r);
        if (!incumbent || key < best || (key == best && r.subset < incumbent->subset)) {
            best = key;
            incumbent = std::move(r);
            ++local.incumbents;
        }
    };

    // Exact weight for a subset, with its objective; absent when the subset is not a top-k in the region.
    auto settle = [&](std::vector<CandidateIndex> subset) -> std::optional<FairResult> {
        FairResult r;
        r.engine = "milp";
        r.utility = utility(subset, region.reference, data);
        if (wdiff) {
            const auto closest = cell_min_wdiff(data, subset, region);
            if (!closest) return std::nullopt;
            r.weight = closest->first;
            r.objective_value = closest->second;
        } else {
            const auto w = cell_witness(data, subset, region, options.seed);
            if (!w) return std::nullopt;
            r.weight = *w;
            r.objective_value = utility_loss(r.utility, ref_utility);
        }
        r.subset = std::move(subset);
        return r;
    };

    // Fair witness at the relaxation's weights.
    auto heuristic = [&](const WeightVector& w) {
        const auto r = evaluate_weight(data, model.k, model.spec, region, w, ref_utility);
        if (!r) return;
        if (!wdiff || !tried.insert(r->subset).second) {
            if (!wdiff) offer(*r);
            return;
        }
        if (auto s = settle(r->subset))
            offer(std::move(*s));
        else
            offer(*r);
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::size_t created = 0;
    open.push(Node{-kInfinity, 0, created++, {}});
    const double eps = 1e-9;

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound >= best - eps * (1.0 + std::abs(best))) continue;
        if (local.nodes >= options.node_budget) {
            local.gap = best - node.bound;
            if (stats) *stats = local;
            throw MilpRefusal("branch and bound exceeded its budget of " + std::to_string(options.node_budget) +
                                  " nodes with gap " + number(local.gap),
                              incumbent, local.gap);
        }
        ++local.nodes;

        LpProblem lp = model.relaxation;
        for (auto [col, v] : node.fixings) lp.set_bounds(col, v, v);
        const auto out = simplex_lp(lp);
        if (!out.optimal()) continue;
        const double bound = lp.maximize ? -out.objective : out.objective;
        if (bound >= best - eps * (1.0 + std::abs(best))) continue;

        const WeightVector w = WeightVector::from_solver(
            std::vector<double>(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(d)));
        heuristic(w);

        std::size_t branch = n;
        double worst = kIntegrality;
        std::vector<CandidateIndex> rounded;
        for (std::size_t c = 0; c < n; ++c) {
            const double v = out.x[model.delta_column(c)];
            const double frac = std::min(v, 1.0 - v);
            if (frac > worst) {
                worst = frac;
                branch = c;
            }
            if (v > 0.5) rounded.push_back(c);
        }

        if (branch == n) {
            // Integral: re-verify the rounded subset before accepting it.
            std::optional<FairResult> r;
            if (rounded.size() == static_cast<std::size_t>(model.k) &&
                is_fair_counts(group_counts(data, rounded), model.spec))
                r = settle(rounded);
            if (r && verify_fair(data, model.k, model.spec, r->weight))
                offer(std::move(*r));
            else
                ++local.cuts;
            continue;
        }

        for (double v : {1.0, 0.0}) {
            Node child{bound, node.depth + 1, created++, node.fixings};
            child.fixings.emplace_back(model.delta_column(branch), v);
            open.push(std::move(child));
        }
    }

    local.gap = 0.0;
    if (stats) *stats = local;
    return incumbent;
}

}  // namespace fairtopk

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "fairtopk/core.hpp"
#include "fairtopk/lp.hpp"

namespace fairtopk {

namespace {

constexpr double kBox = 1e4;
constexpr double kWideBox = 1e6;

// a . x <= b
struct Halfplane {
    std::vector<double> a;
    double b = 0.0;
};

// Rows stored flat: each row is dim coefficients followed by the bound.
struct RowSet {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t size() const { return data.size() / (dim + 1); }
    const double* row(std::size_t i) const { return data.data() + i * (dim + 1); }
    double* row(std::size_t i) { return data.data() + i * (dim + 1); }
};

bool violated(const double* h, const std::vector<double>& x)
{
    const std::size_t dim = x.size();
    double v = 0.0, scale = std::abs(h[dim]);
    for (std::size_t j = 0; j < dim; ++j) {
        v += h[j] * x[j];
        scale = std::max(scale, std::abs(h[j] * x[j]));
    }
    return v > h[dim] + kLpFeasibilityTolerance * (1.0 + scale);
}

std::optional<std::vector<double>> solve_1d(const RowSet& rows, std::size_t count, double c, double box)
{
    double lo = -box, hi = box;
    for (std::size_t i = 0; i < count; ++i) {
        const double a = rows.row(i)[0], b = rows.row(i)[1];
        if (std::abs(a) <= 1e-14) {
            if (b < -kLpFeasibilityTolerance * (1.0 + std::abs(b))) return std::nullopt;
            continue;
        }
        if (a > 0)
            hi = std::min(hi, b / a);
        else
            lo = std::max(lo, b / a);
    }
    if (lo > hi + kLpFeasibilityTolerance * (1.0 + std::abs(hi))) return std::nullopt;
    if (lo > hi) lo = hi;
    double x;
    if (c > 0)
        x = hi;
    else if (c < 0)
        x = lo;
    else
        x = std::clamp(0.0, lo, hi);
    return std::vector<double>{x};
}

// max c . x over the box [-box, box]^dim and rows[0..count).
std::optional<std::vector<double>> solve(const RowSet& rows, std::size_t count, const std::vector<double>& c,
                                         double box)
{
    const std::size_t dim = c.size();
    if (dim == 1) return solve_1d(rows, count, c[0], box);

    std::vector<double> x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = c[j] > 0 ? box : (c[j] < 0 ? -box : 0.0);

    RowSet sub;
    sub.dim = dim - 1;
    for (std::size_t i = 0; i < count; ++i) {
        const double* h = rows.row(i);
        if (!violated(h, x)) continue;

        std::size_t e = 0;
        for (std::size_t j = 1; j < dim; ++j)
            if (std::abs(h[j]) > std::abs(h[e])) e = j;
        const double pivot = h[e];
        if (std::abs(pivot) <= 1e-14) return std::nullopt;  // 0 <= b fails

        // x_e = (b - sum_{j != e} a_j x_j) / pivot
        auto reduce = [&](const double* a, double b, double* out) {
            const double f = a[e] / pivot;
            for (std::size_t j = 0, q = 0; j < dim; ++j) {
                if (j == e) continue;
                out[q++] = a[j] - f * h[j];
            }
            out[dim - 1] = b - f * h[dim];
        };

        sub.data.resize((i + 2) * dim);
        std::vector<double> unit(dim, 0.0);
        unit[e] = 1.0;
        reduce(unit.data(), box, sub.row(0));
        unit[e] = -1.0;
        reduce(unit.data(), box, sub.row(1));
        for (std::size_t r = 0; r < i; ++r) reduce(rows.row(r), rows.row(r)[dim], sub.row(r + 2));

        std::vector<double> objective(dim);
        reduce(c.data(), 0.0, objective.data());
        objective.pop_back();
        auto y = solve(sub, i + 2, objective, box);
        if (!y) return std::nullopt;

        double rest = h[dim];
        for (std::size_t j = 0, q = 0; j < dim; ++j) {
            if (j == e) continue;
            x[j] = (*y)[q++];
            rest -= h[j] * x[j];
        }
        x[e] = rest / pivot;
    }
    return x;
}

std::vector<Halfplane> to_halfplanes(const LpProblem& problem)
{
    const std::size_t n = problem.variables();
    std::vector<Halfplane> out;
    for (const auto& r : problem.rows) {
        if (r.sense != RowSense::GreaterEqual) out.push_back({r.coeffs, r.rhs});
        if (r.sense != RowSense::LessEqual) {
            Halfplane h{r.coeffs, -r.rhs};
            for (double& v : h.a) v = -v;
            out.push_back(std::move(h));
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> a(n, 0.0);
        if (std::isfinite(problem.upper_bound(j))) {
            a[j] = 1.0;
            out.push_back({a, problem.upper_bound(j)});
        }
        if (std::isfinite(problem.lower_bound(j))) {
            a[j] = -1.0;
            out.push_back({a, -problem.lower_bound(j)});
        }
    }
    return out;
}

}  // namespace

LpOutcome seidel_lp(const LpProblem& problem, std::uint64_t seed)
{
    const std::size_t n = problem.variables();
    if (n > kSeidelMaxVariables) throw RefusalError("seidel_lp supports at most 8 variables");
    if (n == 0) throw DomainError("LP has no variables");

    auto planes = to_halfplanes(problem);
    std::mt19937_64 rng(seed);
    std::shuffle(planes.begin(), planes.end(), rng);
    RowSet rows;
    rows.dim = n;
    rows.data.reserve(planes.size() * (n + 1));
    for (const auto& h : planes) {
        rows.data.insert(rows.data.end(), h.a.begin(), h.a.end());
        rows.data.push_back(h.b);
    }

    std::vector<double> c = problem.objective;
    if (!problem.maximize)
        for (double& v : c) v = -v;

    LpOutcome out;
    auto x = solve(rows, rows.size(), c, kBox);
    if (!x) {
        out.status = LpStatus::Infeasible;
        return out;
    }
    auto value = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += problem.objective[j] * v[j];
        return s;
    };
    bool at_box = false;
    for (double v : *x) at_box = at_box || std::abs(v) >= kBox * (1.0 - 1e-9);
    if (at_box) {
        auto wide = solve(rows, rows.size(), c, kWideBox);
        if (wide && std::abs(value(*wide) - value(*x)) > kLpOptimalityTolerance * (1.0 + std::abs(value(*x)))) {
            out.status = LpStatus::Unbounded;
            return out;
        }
    }
    out.status = LpStatus::Optimal;
    out.objective = value(*x);
    out.x = std::move(*x);
    return out;
}

}  // namespace fairtopk

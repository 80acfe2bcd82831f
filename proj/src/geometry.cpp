#include "fairtopk/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairtopk {

DualLine dual_line(const Candidate& c, CandidateIndex owner)
{
    if (c.point.size() != 2) throw DomainError("dual lines need two scoring attributes");
    return {c.point[0] - c.point[1], c.point[1], owner};
}

std::vector<DualLine> dual_lines(const Dataset& data)
{
    std::vector<DualLine> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(dual_line(data[i], i));
    return out;
}

double crossing(const DualLine& a, const DualLine& b) { return (b.intercept - a.intercept) / (a.slope - b.slope); }

double Halfspace::evaluate(std::span<const double> y) const
{
    double v = offset;
    for (std::size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * y[i];
    return v;
}

std::vector<double> project_weight(const WeightVector& w)
{
    return std::vector<double>(w.values().begin(), w.values().end() - 1);
}

WeightVector lift_weight(std::span<const double> y)
{
    double sum = 0.0;
    for (double v : y) {
        if (v < 0.0) throw DomainError("projected weight has a negative component");
        sum += v;
    }
    if (sum > 1.0 + kSimplexTolerance) throw DomainError("projected weight sums above one");
    std::vector<double> w(y.begin(), y.end());
    w.push_back(std::max(0.0, 1.0 - sum));
    return WeightVector::from_solver(std::move(w));
}

Halfspace project_halfspace(const RegionHalfspace& h)
{
    const std::size_t d = h.coeffs.size();
    Halfspace out;
    out.coeffs.resize(d - 1);
    for (std::size_t i = 0; i + 1 < d; ++i) out.coeffs[i] = h.coeffs[i] - h.coeffs[d - 1];
    out.offset = h.offset + h.coeffs[d - 1];
    return out;
}

std::vector<Halfspace> projected_region(const WeightRegion& region)
{
    const std::size_t d = region.dimension();
    std::vector<Halfspace> out;
    for (const auto& h : region.halfspaces) out.push_back(project_halfspace(h));
    for (std::size_t i = 0; i + 1 < d; ++i) {
        Halfspace nonneg{std::vector<double>(d - 1, 0.0), 0.0};
        nonneg.coeffs[i] = 1.0;
        out.push_back(std::move(nonneg));
    }
    out.push_back({std::vector<double>(d - 1, -1.0), 1.0});
    return out;
}

std::vector<std::vector<double>> region_extreme_points(const WeightRegion& region)
{
    const auto hs = projected_region(region);
    const std::size_t dim = region.dimension() - 1;
    const std::size_t m = hs.size();
    std::vector<std::vector<double>> out;
    if (dim == 0) return out;

    auto inside = [&](const std::vector<double>& y) {
        for (const auto& h : hs) {
            double scale = std::abs(h.offset);
            for (double c : h.coeffs) scale = std::max(scale, std::abs(c));
            if (h.evaluate(y) < -1e-9 * (1.0 + scale)) return false;
        }
        return true;
    };
    auto known = [&](const std::vector<double>& y) {
        for (const auto& v : out) {
            double diff = 0.0;
            for (std::size_t i = 0; i < dim; ++i) diff = std::max(diff, std::abs(v[i] - y[i]));
            if (diff <= 1e-9) return true;
        }
        return false;
    };

    // Every choice of dim tight halfspaces.
    std::vector<std::size_t> pick(dim);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    if (m < dim) return out;
    Eigen::MatrixXd a(dim, dim);
    Eigen::VectorXd b(dim);
    while (true) {
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) a(r, c) = hs[pick[r]].coeffs[c];
            b(r) = -hs[pick[r]].offset;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        lu.setThreshold(1e-12);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(b);
            std::vector<double> y(x.data(), x.data() + dim);
            if (inside(y) && !known(y)) out.push_back(std::move(y));
        }
        std::size_t i = dim;
        while (i > 0 && pick[i - 1] == m - dim + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < dim; ++j) pick[j] = pick[j - 1] + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<WeightVector> region_center(const WeightRegion& region)
{
    const auto vertices = region_extreme_points(region);
    if (vertices.empty()) return std::nullopt;
    std::vector<double> mean(vertices.front().size(), 0.0);
    for (const auto& v : vertices)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    for (auto& m : mean) m = std::max(0.0, m / static_cast<double>(vertices.size()));
    double sum = std::accumulate(mean.begin(), mean.end(), 0.0);
    if (sum > 1.0)
        for (auto& m : mean) m /= sum;
    return lift_weight(mean);
}

std::optional<std::pair<double, double>> region_interval(const WeightRegion& region)
{
    if (region.dimension() != 2) throw DomainError("region_interval needs a 2-D region");
    const auto vertices = region_extreme_points(region);
    if (vertices.empty()) return std::nullopt;
    return std::make_pair(vertices.front()[0], vertices.back()[0]);
}

RegionSide side_of_region(const Halfspace& h, std::span<const std::vector<double>> vertices, double tolerance)
{
    bool all_pos = true, all_neg = true;
    for (const auto& v : vertices) {
        const double s = h.evaluate(v);
        all_pos = all_pos && s > tolerance;
        all_neg = all_neg && s < -tolerance;
    }
    if (vertices.empty()) return RegionSide::Straddles;
    if (all_pos) return RegionSide::Positive;
    if (all_neg) return RegionSide::Negative;
    return RegionSide::Straddles;
}

bool hyperplane_misses_region(const Halfspace& h, std::span<const std::vector<double>> vertices)
{
    return side_of_region(h, vertices) != RegionSide::Straddles;
}

void add_region_rows(LpProblem& problem, const WeightRegion& region, std::size_t first)
{
    const std::size_t d = region.dimension();
    const std::size_t n = problem.variables();
    std::vector<double> sum(n, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        sum[first + i] = 1.0;
        problem.set_bounds(first + i, 0.0, 1.0);
    }
    problem.add_row(std::move(sum), RowSense::Equal, 1.0);
    for (const auto& h : region.halfspaces) {
        std::vector<double> row(n, 0.0);
        for (std::size_t i = 0; i < d; ++i) row[first + i] = h.coeffs[i];
        problem.add_row(std::move(row), RowSense::GreaterEqual, -h.offset);
    }
}

}  // namespace fairtopk

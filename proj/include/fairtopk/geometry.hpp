#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fairtopk/core.hpp"
#include "fairtopk/lp.hpp"

namespace fairtopk {

/// Score of a 2-D candidate as a function of x = w_1: y = slope * x + intercept.
struct DualLine {
    double slope = 0.0;
    double intercept = 0.0;
    CandidateIndex owner = 0;

    double at(double x) const { return slope * x + intercept; }
};

DualLine dual_line(const Candidate& c, CandidateIndex owner);
std::vector<DualLine> dual_lines(const Dataset& data);

// Abscissa where two non-parallel lines meet.
double crossing(const DualLine& a, const DualLine& b);

/// coeffs . y + offset >= 0 over projected weights y = (w_1, ..., w_{d-1}).
struct Halfspace {
    std::vector<double> coeffs;
    double offset = 0.0;

    double evaluate(std::span<const double> y) const;
};

std::vector<double> project_weight(const WeightVector& w);
WeightVector lift_weight(std::span<const double> y);

Halfspace project_halfspace(const RegionHalfspace& h);
// The region's halfspaces plus y_i >= 0 and 1 - sum(y) >= 0.
std::vector<Halfspace> projected_region(const WeightRegion& region);

/// Vertices of the projected region, deduplicated. Empty iff the region is empty.
std::vector<std::vector<double>> region_extreme_points(const WeightRegion& region);

// Mean of the extreme points, lifted.
std::optional<WeightVector> region_center(const WeightRegion& region);

// [lower, upper] of w_1 over a 2-D region.
std::optional<std::pair<double, double>> region_interval(const WeightRegion& region);

enum class RegionSide { Positive, Negative, Straddles };

// Side of coeffs . y + offset = 0 on which all vertices lie strictly.
RegionSide side_of_region(const Halfspace& h, std::span<const std::vector<double>> vertices, double tolerance = 1e-12);
bool hyperplane_misses_region(const Halfspace& h, std::span<const std::vector<double>> vertices);

// Adds the region's rows (and w >= 0, sum w = 1) for weights stored at
// variables [first, first + d) of problem.
void add_region_rows(LpProblem& problem, const WeightRegion& region, std::size_t first);

}  // namespace fairtopk

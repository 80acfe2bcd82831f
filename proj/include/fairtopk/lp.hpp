#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace fairtopk {

inline constexpr double kLpFeasibilityTolerance = 1e-9;
inline constexpr double kLpOptimalityTolerance = 1e-8;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LpRow {
    std::vector<double> coeffs;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

/// Optimize objective . x subject to rows and per-variable bounds.
/// Variables are free unless bounded.
struct LpProblem {
    std::vector<double> objective;
    bool maximize = true;
    std::vector<LpRow> rows;
    std::vector<double> lower;  // empty means all -inf
    std::vector<double> upper;  // empty means all +inf

    explicit LpProblem(std::size_t variables = 0) : objective(variables, 0.0) {}

    std::size_t variables() const { return objective.size(); }
    double lower_bound(std::size_t j) const { return lower.empty() ? -kInfinity : lower[j]; }
    double upper_bound(std::size_t j) const { return upper.empty() ? kInfinity : upper[j]; }
    void set_bounds(std::size_t j, double lo, double hi);
    void add_row(std::vector<double> coeffs, RowSense sense, double rhs);

    // Largest violation of any row or bound at x.
    double max_violation(const std::vector<double>& x) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t pivots = 0;

    bool optimal() const { return status == LpStatus::Optimal; }
};

inline constexpr std::size_t kSeidelMaxVariables = 8;

/// Randomized incremental LP for few variables. Deterministic for a fixed
/// seed. Throws RefusalError above kSeidelMaxVariables variables.
LpOutcome seidel_lp(const LpProblem& problem, std::uint64_t seed);

struct SimplexOptions {
    std::size_t max_pivots = 0;          // 0 selects a size-based budget
    std::size_t degenerate_streak = 25;  // consecutive degenerate pivots before least-index pivoting
};

/// Two-phase dense tableau simplex with implicit variable bounds.
/// Throws RefusalError when the pivot budget runs out.
LpOutcome simplex_lp(const LpProblem& problem, const SimplexOptions& options = {});

// seidel_lp up to max_seidel_variables variables, simplex_lp beyond.
LpOutcome solve_lp(const LpProblem& problem, std::uint64_t seed, std::size_t max_seidel_variables = 6);

}  // namespace fairtopk

#include <algorithm>
#include <cmath>

#include "fairtopk/core.hpp"
#include "fairtopk/lp.hpp"

namespace fairtopk {

void LpProblem::set_bounds(std::size_t j, double lo, double hi)
{
    if (lower.empty()) lower.assign(variables(), -kInfinity);
    if (upper.empty()) upper.assign(variables(), kInfinity);
    lower[j] = lo;
    upper[j] = hi;
}

void LpProblem::add_row(std::vector<double> coeffs, RowSense sense, double rhs)
{
    if (coeffs.size() != variables()) throw DomainError("LP row has wrong length");
    rows.push_back({std::move(coeffs), sense, rhs});
}

double LpProblem::max_violation(const std::vector<double>& x) const
{
    double worst = 0.0;
    for (const auto& r : rows) {
        double v = -r.rhs;
        for (std::size_t j = 0; j < r.coeffs.size(); ++j) v += r.coeffs[j] * x[j];
        switch (r.sense) {
        case RowSense::LessEqual: worst = std::max(worst, v); break;
        case RowSense::GreaterEqual: worst = std::max(worst, -v); break;
        case RowSense::Equal: worst = std::max(worst, std::abs(v)); break;
        }
    }
    for (std::size_t j = 0; j < variables(); ++j) {
        worst = std::max(worst, lower_bound(j) - x[j]);
        worst = std::max(worst, x[j] - upper_bound(j));
    }
    return worst;
}

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kCostTolerance = 1e-9;

enum class Status : unsigned char { Basic, AtLower, AtUpper };

// How an original variable is expressed through nonnegative columns.
struct VarMap {
    enum Kind { Shift, Mirror, Split, Fixed } kind = Shift;
    double offset = 0.0;
    std::size_t col = 0;  // first column; Split uses col and col + 1
};

class Tableau {
public:
    Tableau(const LpProblem& problem, const SimplexOptions& options) : problem_(problem), options_(options)
    {
        build();
    }

    LpOutcome run()
    {
        LpOutcome out;
        // Phase one: minimize the sum of artificials.
        std::vector<double> cost(cols_, 0.0);
        for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = 1.0;
        if (first_artificial_ < cols_) {
            set_costs(cost);
            if (iterate() == Step::Unbounded) throw DomainError("phase one cannot be unbounded");
            double infeasibility = 0.0;
            for (std::size_t i = 0; i < m_; ++i)
                if (basis_[i] >= first_artificial_) infeasibility += beta_[i];
            if (infeasibility > 1e-8 * (1.0 + rhs_scale_)) {
                out.status = LpStatus::Infeasible;
                out.pivots = pivots_;
                return out;
            }
            drive_out_artificials();
        }
        set_costs(phase_two_cost_);
        banned_from_ = first_artificial_;
        degenerate_ = 0;
        bland_ = false;
        if (iterate() == Step::Unbounded) {
            out.status = LpStatus::Unbounded;
            out.pivots = pivots_;
            return out;
        }
        out.status = LpStatus::Optimal;
        out.x = extract();
        out.objective = 0.0;
        for (std::size_t j = 0; j < out.x.size(); ++j) out.objective += problem_.objective[j] * out.x[j];
        out.pivots = pivots_;
        return out;
    }

private:
    enum class Step { Optimal, Unbounded };

    void build()
    {
        const std::size_t n = problem_.variables();
        maps_.resize(n);
        std::vector<double> col_upper;
        for (std::size_t j = 0; j < n; ++j) {
            const double lo = problem_.lower_bound(j);
            const double hi = problem_.upper_bound(j);
            auto& vm = maps_[j];
            if (std::isfinite(lo) && std::isfinite(hi) && hi - lo <= 0.0) {
                vm.kind = VarMap::Fixed;
                vm.offset = lo;
            } else if (std::isfinite(lo)) {
                vm.kind = VarMap::Shift;
                vm.offset = lo;
                vm.col = col_upper.size();
                col_upper.push_back(hi - lo);
            } else if (std::isfinite(hi)) {
                vm.kind = VarMap::Mirror;
                vm.offset = hi;
                vm.col = col_upper.size();
                col_upper.push_back(kInfinity);
            } else {
                vm.kind = VarMap::Split;
                vm.col = col_upper.size();
                col_upper.push_back(kInfinity);
                col_upper.push_back(kInfinity);
            }
        }
        const std::size_t structural = col_upper.size();

        // Rows over structural columns, rhs made nonnegative.
        struct StdRow {
            std::vector<double> a;
            RowSense sense;
            double rhs;
        };
        std::vector<StdRow> rows;
        rows.reserve(problem_.rows.size());
        for (const auto& r : problem_.rows) {
            StdRow s{std::vector<double>(structural, 0.0), r.sense, r.rhs};
            for (std::size_t j = 0; j < n; ++j) {
                const double a = r.coeffs[j];
                if (a == 0.0) continue;
                const auto& vm = maps_[j];
                s.rhs -= a * vm.offset;
                switch (vm.kind) {
                case VarMap::Shift: s.a[vm.col] += a; break;
                case VarMap::Mirror: s.a[vm.col] -= a; break;
                case VarMap::Split:
                    s.a[vm.col] += a;
                    s.a[vm.col + 1] -= a;
                    break;
                case VarMap::Fixed: break;
                }
            }
            if (s.rhs < 0.0) {
                for (double& v : s.a) v = -v;
                s.rhs = -s.rhs;
                if (s.sense == RowSense::LessEqual)
                    s.sense = RowSense::GreaterEqual;
                else if (s.sense == RowSense::GreaterEqual)
                    s.sense = RowSense::LessEqual;
            }
            rhs_scale_ = std::max(rhs_scale_, s.rhs);
            rows.push_back(std::move(s));
        }

        m_ = rows.size();
        std::size_t slacks = 0, artificials = 0;
        for (const auto& r : rows) {
            if (r.sense != RowSense::Equal) ++slacks;
            if (r.sense != RowSense::LessEqual) ++artificials;
        }
        first_artificial_ = structural + slacks;
        cols_ = first_artificial_ + artificials;
        upper_ = col_upper;
        upper_.resize(cols_, kInfinity);

        t_.assign(m_ * cols_, 0.0);
        beta_.assign(m_, 0.0);
        basis_.assign(m_, 0);
        status_.assign(cols_, Status::AtLower);
        std::size_t slack = structural, art = first_artificial_;
        for (std::size_t i = 0; i < m_; ++i) {
            double* row = &t_[i * cols_];
            std::copy(rows[i].a.begin(), rows[i].a.end(), row);
            beta_[i] = rows[i].rhs;
            switch (rows[i].sense) {
            case RowSense::LessEqual:
                row[slack] = 1.0;
                basis_[i] = slack++;
                break;
            case RowSense::GreaterEqual:
                row[slack++] = -1.0;
                row[art] = 1.0;
                basis_[i] = art++;
                break;
            case RowSense::Equal:
                row[art] = 1.0;
                basis_[i] = art++;
                break;
            }
            status_[basis_[i]] = Status::Basic;
        }

        // Minimization costs over columns.
        phase_two_cost_.assign(cols_, 0.0);
        const double sign = problem_.maximize ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = sign * problem_.objective[j];
            const auto& vm = maps_[j];
            switch (vm.kind) {
            case VarMap::Shift: phase_two_cost_[vm.col] += c; break;
            case VarMap::Mirror: phase_two_cost_[vm.col] -= c; break;
            case VarMap::Split:
                phase_two_cost_[vm.col] += c;
                phase_two_cost_[vm.col + 1] -= c;
                break;
            case VarMap::Fixed: break;
            }
        }

        budget_ = options_.max_pivots ? options_.max_pivots : 50 * (m_ + cols_) + 1000;
    }

    void set_costs(const std::vector<double>& cost)
    {
        cost_ = cost;
        reduced_ = cost;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &t_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= cb * row[j];
        }
    }

    bool eligible(std::size_t j, double& rate) const
    {
        if (status_[j] == Status::Basic || j >= banned_from_ || upper_[j] <= 0.0) return false;
        const double d = reduced_[j];
        if (status_[j] == Status::AtLower && d < -kCostTolerance) {
            rate = -d;
            return true;
        }
        if (status_[j] == Status::AtUpper && d > kCostTolerance) {
            rate = d;
            return true;
        }
        return false;
    }

    Step iterate()
    {
        while (true) {
            std::size_t enter = cols_;
            double best_rate = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                double rate;
                if (!eligible(j, rate)) continue;
                if (bland_) {
                    enter = j;
                    break;
                }
                if (rate > best_rate) {
                    best_rate = rate;
                    enter = j;
                }
            }
            if (enter == cols_) return Step::Optimal;

            const double dir = status_[enter] == Status::AtLower ? 1.0 : -1.0;
            double theta = upper_[enter];
            std::size_t leave_row = m_;
            bool leave_to_upper = false;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = t_[i * cols_ + enter] * dir;
                double limit;
                bool to_upper;
                if (alpha > kPivotTolerance) {
                    limit = std::max(beta_[i], 0.0) / alpha;
                    to_upper = false;
                } else if (alpha < -kPivotTolerance && std::isfinite(upper_[basis_[i]])) {
                    limit = std::max(upper_[basis_[i]] - beta_[i], 0.0) / -alpha;
                    to_upper = true;
                } else {
                    continue;
                }
                if (limit < theta || (limit == theta && leave_row < m_ && basis_[i] < basis_[leave_row])) {
                    theta = limit;
                    leave_row = i;
                    leave_to_upper = to_upper;
                }
            }
            if (!std::isfinite(theta)) return Step::Unbounded;

            if (++pivots_ > budget_) throw RefusalError("simplex pivot budget exhausted");
            if (theta <= 1e-12) {
                if (++degenerate_ >= options_.degenerate_streak) bland_ = true;
            } else {
                degenerate_ = 0;
            }

            for (std::size_t i = 0; i < m_; ++i) beta_[i] -= t_[i * cols_ + enter] * dir * theta;

            if (leave_row == m_) {
                status_[enter] = status_[enter] == Status::AtLower ? Status::AtUpper : Status::AtLower;
                continue;
            }
            const double entering_value = (dir > 0 ? 0.0 : upper_[enter]) + dir * theta;
            const std::size_t leaving = basis_[leave_row];
            status_[leaving] = leave_to_upper ? Status::AtUpper : Status::AtLower;
            pivot(leave_row, enter);
            beta_[leave_row] = entering_value;
        }
    }

    void pivot(std::size_t r, std::size_t e)
    {
        double* prow = &t_[r * cols_];
        const double inv = 1.0 / prow[e];
        for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
        prow[e] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &t_[i * cols_];
            const double f = row[e];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
            row[e] = 0.0;
        }
        const double f = reduced_[e];
        if (f != 0.0) {
            for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= f * prow[j];
            reduced_[e] = 0.0;
        }
        basis_[r] = e;
        status_[e] = Status::Basic;
    }

    void drive_out_artificials()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < first_artificial_) continue;
            const double* row = &t_[i * cols_];
            std::size_t best = first_artificial_;
            double best_mag = kPivotTolerance;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (status_[j] == Status::Basic || upper_[j] <= 0.0) continue;
                if (std::abs(row[j]) > best_mag) {
                    best_mag = std::abs(row[j]);
                    best = j;
                }
            }
            // A row with no usable entry is redundant; its artificial stays at zero.
            if (best == first_artificial_) continue;
            const double value = status_[best] == Status::AtUpper ? upper_[best] : 0.0;
            status_[basis_[i]] = Status::AtLower;
            pivot(i, best);
            beta_[i] = value;
        }
    }

    std::vector<double> extract() const
    {
        std::vector<double> y(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j)
            if (status_[j] == Status::AtUpper) y[j] = upper_[j];
        for (std::size_t i = 0; i < m_; ++i) y[basis_[i]] = beta_[i];
        std::vector<double> x(maps_.size(), 0.0);
        for (std::size_t j = 0; j < maps_.size(); ++j) {
            const auto& vm = maps_[j];
            switch (vm.kind) {
            case VarMap::Shift: x[j] = vm.offset + y[vm.col]; break;
            case VarMap::Mirror: x[j] = vm.offset - y[vm.col]; break;
            case VarMap::Split: x[j] = y[vm.col] - y[vm.col + 1]; break;
            case VarMap::Fixed: x[j] = vm.offset; break;
            }
        }
        return x;
    }

    const LpProblem& problem_;
    SimplexOptions options_;
    std::vector<VarMap> maps_;
    std::size_t m_ = 0, cols_ = 0, first_artificial_ = 0;
    std::size_t banned_from_ = static_cast<std::size_t>(-1);
    std::vector<double> t_, beta_, upper_, cost_, reduced_, phase_two_cost_;
    std::vector<std::size_t> basis_;
    std::vector<Status> status_;
    double rhs_scale_ = 0.0;
    std::size_t pivots_ = 0, budget_ = 0, degenerate_ = 0;
    bool bland_ = false;
};

}  // namespace

LpOutcome simplex_lp(const LpProblem& problem, const SimplexOptions& options)
{
    for (const auto& r : problem.rows)
        if (r.coeffs.size() != problem.variables()) throw DomainError("LP row has wrong length");
    for (std::size_t j = 0; j < problem.variables(); ++j)
        if (problem.lower_bound(j) > problem.upper_bound(j)) {
            LpOutcome out;
            out.status = LpStatus::Infeasible;
            return out;
        }
    Tableau tableau(problem, options);
    return tableau.run();
}

LpOutcome solve_lp(const LpProblem& problem, std::uint64_t seed, std::size_t max_seidel_variables)
{
    if (problem.variables() <= std::min(max_seidel_variables, kSeidelMaxVariables)) return seidel_lp(problem, seed);
    return simplex_lp(problem);
}

}  // namespace fairtopk

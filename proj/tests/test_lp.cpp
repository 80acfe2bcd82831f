#include <doctest.h>

#include <random>

#include "fairtopk/core.hpp"
#include "fairtopk/lp.hpp"

using namespace fairtopk;

TEST_CASE("trivial LPs")
{
    LpProblem p(1);
    p.objective = {1.0};
    p.add_row({1.0}, RowSense::LessEqual, 3.0);
    p.add_row({1.0}, RowSense::GreaterEqual, 0.0);
    for (auto out : {seidel_lp(p, 1), simplex_lp(p)}) {
        REQUIRE(out.optimal());
        CHECK(out.objective == doctest::Approx(3.0));
    }

    LpProblem inf(1);
    inf.objective = {1.0};
    inf.add_row({1.0}, RowSense::GreaterEqual, 1.0);
    inf.add_row({1.0}, RowSense::LessEqual, 0.0);
    CHECK(seidel_lp(inf, 1).status == LpStatus::Infeasible);
    CHECK(simplex_lp(inf).status == LpStatus::Infeasible);

    LpProblem unb(1);
    unb.objective = {1.0};
    unb.add_row({1.0}, RowSense::GreaterEqual, 0.0);
    CHECK(seidel_lp(unb, 1).status == LpStatus::Unbounded);
    CHECK(simplex_lp(unb).status == LpStatus::Unbounded);

    CHECK_THROWS_AS(seidel_lp(LpProblem(9), 1), RefusalError);
}

TEST_CASE("bounds, equalities and minimization")
{
    // min x + 2y s.t. x + y = 1, x <= 0.7, y free but >= -1
    LpProblem p(2);
    p.objective = {1.0, 2.0};
    p.maximize = false;
    p.add_row({1.0, 1.0}, RowSense::Equal, 1.0);
    p.set_bounds(0, -kInfinity, 0.7);
    p.set_bounds(1, -1.0, kInfinity);
    for (auto out : {seidel_lp(p, 4), simplex_lp(p)}) {
        REQUIRE(out.optimal());
        CHECK(out.objective == doctest::Approx(1.3));
        CHECK(out.x[0] == doctest::Approx(0.7));
        CHECK(p.max_violation(out.x) <= 1e-9);
    }
}

TEST_CASE("seidel and simplex agree on random LPs")
{
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int feasible = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t dims = 1 + rng() % 4;
        const std::size_t rows = 1 + rng() % 50;
        LpProblem p(dims);
        for (auto& c : p.objective) c = g(rng);
        p.maximize = rng() % 2;
        for (std::size_t j = 0; j < dims; ++j) p.set_bounds(j, -5.0, 5.0);
        std::vector<double> anchor(dims);
        for (auto& a : anchor) a = 2.0 * g(rng);
        const bool force_feasible = rep % 4 != 0;
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> a(dims);
            double at = 0.0;
            for (std::size_t j = 0; j < dims; ++j) at += (a[j] = g(rng)) * anchor[j];
            const double rhs = force_feasible ? at + u(rng) : g(rng) * 2.0;
            p.add_row(a, RowSense::LessEqual, rhs);
        }
        const auto s = seidel_lp(p, static_cast<std::uint64_t>(rep));
        const auto x = simplex_lp(p);
        REQUIRE(s.status == x.status);
        if (!s.optimal()) continue;
        ++feasible;
        CHECK(std::abs(s.objective - x.objective) <= 1e-8 * (1.0 + std::abs(x.objective)));
        CHECK(p.max_violation(s.x) <= 1e-8);
        CHECK(p.max_violation(x.x) <= 1e-8);
    }
    CHECK(feasible > 300);
}

TEST_CASE("degenerate LP terminates")
{
    // Many redundant constraints through one vertex.
    LpProblem p(3);
    p.objective = {1.0, 1.0, 1.0};
    for (int i = 1; i <= 40; ++i) {
        const double t = i / 40.0;
        p.add_row({t, 1.0 - t, 0.5}, RowSense::LessEqual, 0.0);
    }
    for (std::size_t j = 0; j < 3; ++j) p.set_bounds(j, 0.0, kInfinity);
    const auto out = simplex_lp(p);
    REQUIRE(out.optimal());
    CHECK(out.objective == doctest::Approx(0.0));
}

TEST_CASE("solve_lp picks the solver by size")
{
    LpProblem p(2);
    p.objective = {1.0, 1.0};
    p.add_row({1.0, 1.0}, RowSense::LessEqual, 1.0);
    p.set_bounds(0, 0.0, 1.0);
    p.set_bounds(1, 0.0, 1.0);
    CHECK(solve_lp(p, 0).objective == doctest::Approx(1.0));
    CHECK(solve_lp(p, 0, 1).objective == doctest::Approx(1.0));
}

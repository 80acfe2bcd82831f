#include <doctest.h>

#include <random>

#include "fairtopk/geometry.hpp"
#include "fixtures.hpp"

using namespace fairtopk;

TEST_CASE("dual lines reproduce scores")
{
    const auto data = fixtures::example3();
    const auto top = dual_line(data[4], 4);
    CHECK(top.slope == 0.0);
    CHECK(top.intercept == 0.9);
    CHECK(dual_line(data[2], 2).at(0.6) == doctest::Approx(0.56).epsilon(1e-14));
    CHECK_THROWS_AS(dual_line(Candidate{0, {0.1, 0.2, 0.3}, {}}, 0), DomainError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Candidate c{0, {u(rng), u(rng)}, {}};
        const double x = u(rng);
        CHECK(std::abs(dual_line(c, 0).at(x) - score(WeightVector::from_solver({x, 1 - x}), c)) <= 1e-12);
    }
}

TEST_CASE("projection round trip")
{
    CHECK(project_weight(WeightVector({0.5, 0.5})) == std::vector<double>{0.5});
    CHECK(lift_weight(std::vector<double>{0.5}) == WeightVector({0.5, 0.5}));
    CHECK(project_weight(WeightVector({0.2, 0.3, 0.5})) == std::vector<double>{0.2, 0.3});
    CHECK_THROWS_AS(lift_weight(std::vector<double>{0.7, 0.5}), DomainError);
    CHECK_THROWS_AS(lift_weight(std::vector<double>{-0.1, 0.5}), DomainError);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const WeightVector w(fixtures::random_simplex(rng, 1 + (i % 6) + 1));
        const auto back = lift_weight(project_weight(w));
        for (std::size_t j = 0; j < w.dimension(); ++j) REQUIRE(std::abs(back[j] - w[j]) <= 1e-12);
    }
}

TEST_CASE("projected halfspaces agree with full ones")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t d = 2 + i % 4;
        RegionHalfspace h{std::vector<double>(d), g(rng)};
        for (auto& c : h.coeffs) c = g(rng);
        const WeightVector w(fixtures::random_simplex(rng, d));
        double full = h.offset;
        for (std::size_t j = 0; j < d; ++j) full += h.coeffs[j] * w[j];
        CHECK(std::abs(project_halfspace(h).evaluate(project_weight(w)) - full) <= 1e-12);
    }
}

TEST_CASE("region extreme points")
{
    const auto box = WeightRegion::epsilon_box(WeightVector({0.5, 0.5}), 0.1, Objective::WDifference);
    const auto v = region_extreme_points(box);
    REQUIRE(v.size() == 2);
    CHECK(v[0][0] == doctest::Approx(0.4));
    CHECK(v[1][0] == doctest::Approx(0.6));
    const auto interval = region_interval(box);
    REQUIRE(interval);
    CHECK(interval->first == doctest::Approx(0.4));

    WeightRegion simplex;
    simplex.reference = WeightVector({0.2, 0.3, 0.5});
    const auto tri = region_extreme_points(simplex);
    REQUIRE(tri.size() == 3);
    CHECK(tri[0] == std::vector<double>{0.0, 0.0});
    CHECK(tri[1] == std::vector<double>{0.0, 1.0});
    CHECK(tri[2] == std::vector<double>{1.0, 0.0});

    WeightRegion empty = box;
    empty.halfspaces.push_back({{1.0, 0.0}, -0.9});  // w_1 >= 0.9
    CHECK(region_extreme_points(empty).empty());
    CHECK_FALSE(region_center(empty));
    const auto centre = region_center(box);
    REQUIRE(centre);
    CHECK((*centre)[0] == doctest::Approx(0.5));
}

TEST_CASE("extreme points are tight, feasible and order independent")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> eps(0.02, 0.4);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t d = 2 + rep % 3;
        auto region = WeightRegion::epsilon_box(WeightVector(fixtures::random_simplex(rng, d)), eps(rng),
                                                Objective::WDifference);
        const auto v = region_extreme_points(region);
        REQUIRE_FALSE(v.empty());
        const auto hs = projected_region(region);
        for (const auto& p : v) {
            std::size_t tight = 0;
            for (const auto& h : hs) {
                const double s = h.evaluate(p);
                CHECK(s >= -1e-9);
                tight += std::abs(s) <= 1e-9;
            }
            CHECK(tight >= d - 1);
        }
        std::shuffle(region.halfspaces.begin(), region.halfspaces.end(), rng);
        const auto w = region_extreme_points(region);
        REQUIRE(w.size() == v.size());
        for (const auto& p : v) {
            bool matched = false;
            for (const auto& q : w) {
                double diff = 0.0;
                for (std::size_t j = 0; j + 1 < d; ++j) diff = std::max(diff, std::abs(p[j] - q[j]));
                matched = matched || diff <= 1e-9;
            }
            CHECK(matched);
        }
    }
}

TEST_CASE("hyperplane side tests")
{
    const auto box = WeightRegion::epsilon_box(WeightVector({0.5, 0.5}), 0.1, Objective::WDifference);
    const auto v = region_extreme_points(box);
    CHECK(hyperplane_misses_region({{1.0}, -0.7}, v));
    CHECK(side_of_region({{1.0}, -0.7}, v) == RegionSide::Negative);
    CHECK_FALSE(hyperplane_misses_region({{1.0}, -0.5}, v));

    // Grid sampling agrees in 3-D.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto region =
            WeightRegion::epsilon_box(WeightVector(fixtures::random_simplex(rng, 3)), 0.15, Objective::WDifference);
        const auto verts = region_extreme_points(region);
        const Halfspace h{{g(rng), g(rng)}, 0.2 * g(rng)};
        bool pos = false, neg = false;
        for (int a = 0; a <= 60; ++a)
            for (int b = 0; a + b <= 60; ++b) {
                const std::vector<double> y{a / 60.0, b / 60.0};
                if (!region.contains(lift_weight(y))) continue;
                const double s = h.evaluate(y);
                pos = pos || s > 1e-9;
                neg = neg || s < -1e-9;
            }
        if (pos && neg) CHECK_FALSE(hyperplane_misses_region(h, verts));
        if (hyperplane_misses_region(h, verts)) CHECK_FALSE((pos && neg));
    }
}

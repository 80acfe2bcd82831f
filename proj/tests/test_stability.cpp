#include <doctest.h>

#include <random>

#include "fairtopk/geometry.hpp"
#include "fairtopk/objective.hpp"
#include "fairtopk/stability.hpp"
#include "fairtopk/sweep2d.hpp"
#include "fixtures.hpp"

using namespace fairtopk;

namespace {

// Exact top-k membership with a positive gap between members and the rest.
bool unique_topk(const Dataset& data, std::span<const CandidateIndex> subset, const WeightVector& w)
{
    std::vector<bool> in(data.size(), false);
    for (auto i : subset) in[i] = true;
    double low = kInfinity, high = -kInfinity;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double s = score(w, data[i]);
        if (in[i])
            low = std::min(low, s);
        else
            high = std::max(high, s);
    }
    return low > high;
}

}  // namespace

TEST_CASE("worked example stable interval")
{
    const auto data = fixtures::example3();
    WeightRegion region;
    region.reference = WeightVector({0.5, 0.5});
    const std::vector<CandidateIndex> subset{2, 4};
    const WeightVector witness({0.58, 0.42});
    const auto r = stable_weight_2d(data, subset, region, witness);
    CHECK_FALSE(r.degenerate);
    CHECK(std::abs(r.weight[0] - 26.0 / 45.0) <= 1e-12);
    CHECK(std::abs(r.margin - 1.0 / 45.0) <= 1e-12);
    CHECK(std::abs((r.weight[0] - r.margin) - 5.0 / 9.0) <= 1e-12);
    CHECK(std::abs((r.weight[0] + r.margin) - 0.6) <= 1e-12);

    const auto m = stable_weight_md(data, subset, region, witness);
    CHECK(std::abs(m.weight[0] - 26.0 / 45.0) <= 1e-9);
    CHECK(std::abs(m.margin - 1.0 / 45.0) <= 1e-9);

    std::vector<CandidateIndex> everyone{0, 1, 2, 3, 4};
    const auto all = stable_weight_2d(data, everyone, region, witness);
    CHECK(all.weight[0] == doctest::Approx(0.5));
    CHECK(all.margin == doctest::Approx(0.5));
}

TEST_CASE("coincident pivot and non-member has no margin")
{
    std::vector<Candidate> c{{0, {0.9, 0.9}, {}}, {1, {0.5, 0.5}, {}}, {2, {0.5, 0.5}, {}}};
    const Dataset data(c, 2, 0, 0);
    WeightRegion region;
    region.reference = WeightVector({0.5, 0.5});
    const std::vector<CandidateIndex> subset{0, 1};
    CHECK(stable_weight_2d(data, subset, region, region.reference).degenerate);
    CHECK(stable_weight_md(data, subset, region, region.reference).degenerate);
}

TEST_CASE("box centre is the maximum-margin point when every subset fits")
{
    const double eps = 0.1;
    const WeightVector wo({0.3, 0.3, 0.4});
    const auto region = WeightRegion::epsilon_box(wo, eps, Objective::UtilityLoss);
    std::vector<Candidate> c{{0, {0.2, 0.5, 0.1}, {}}, {1, {0.7, 0.1, 0.3}, {}}};
    const Dataset data(c, 3, 0, 0);
    const std::vector<CandidateIndex> subset{0, 1};
    const auto r = stable_weight_md(data, subset, region, wo);
    CHECK(r.margin == doctest::Approx(eps / 2).epsilon(1e-9));
    for (const auto& h : projected_region(region)) {
        double norm = 0.0;
        for (double v : h.coeffs) norm += std::abs(v);
        CHECK(h.evaluate(project_weight(r.weight)) / norm >= r.margin - 1e-10);
    }
}

TEST_CASE("stable weights survive perturbations and agree across methods")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    int checked = 0;
    for (int rep = 0; rep < 80; ++rep) {
        const auto inst = fixtures::random_instance(rng, 10 + rng() % 40, 2, 8, Objective::UtilityLoss);
        const auto fair = sweep_select(inst.data, inst.k, inst.spec, inst.region);
        if (!fair) continue;
        const auto a = stable_weight_2d(inst.data, fair->subset, inst.region, fair->weight);
        const auto b = stable_weight_md(inst.data, fair->subset, inst.region, fair->weight);
        REQUIRE(a.degenerate == b.degenerate);
        CHECK(std::abs(a.margin - b.margin) <= 1e-9);
        if (a.margin <= 1e-6) continue;
        ++checked;
        CHECK(std::abs(a.weight[0] - b.weight[0]) <= 1e-9);
        CHECK(inst.region.contains(a.weight));
        for (int t = 0; t < 100; ++t) {
            const double x = a.weight[0] + 0.9 * a.margin * unit(rng);
            CHECK(unique_topk(inst.data, fair->subset, WeightVector::from_solver({x, 1 - x})));
        }
    }
    CHECK(checked > 5);
}

TEST_CASE("multi-dimensional margins hold under max-norm perturbations")
{
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    int checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t d = 3 + rep % 2;
        const auto data = fixtures::random_tied(rng, 25, d, 0, 25);
        const int k = 1 + static_cast<int>(rng() % 6);
        const auto region =
            WeightRegion::epsilon_box(WeightVector(fixtures::random_simplex(rng, d)), 0.2, Objective::UtilityLoss);
        const auto w = *region_center(region);
        auto dec = decompose_topk(data, k, w);
        std::vector<CandidateIndex> subset = dec.strict;
        subset.insert(subset.end(), dec.m1.begin(), dec.m1.end());
        std::sort(subset.begin(), subset.end());
        const auto r = stable_weight_md(data, subset, region, w);
        if (r.margin <= 1e-6) continue;
        ++checked;
        CHECK(region.contains(r.weight));
        const auto y = project_weight(r.weight);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> z(y);
            for (auto& v : z) v += 0.9 * r.margin * unit(rng);
            CHECK(unique_topk(data, subset, lift_weight(z)));
        }
        // Shrinking the region cannot widen the margin.
        const auto smaller = WeightRegion::epsilon_box(region.reference, 0.1, Objective::UtilityLoss);
        if (smaller.contains(w)) CHECK(stable_weight_md(data, subset, smaller, w).margin <= r.margin + 1e-12);
    }
    CHECK(checked > 10);
}

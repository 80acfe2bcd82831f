#include <doctest.h>

#include <numeric>
#include <random>

#include "fairtopk/brute2d.hpp"
#include "fairtopk/objective.hpp"
#include "fairtopk/sweep2d.hpp"
#include "fixtures.hpp"

using namespace fairtopk;

TEST_CASE("initial tournaments on the worked example")
{
    const auto data = fixtures::example3();
    KineticSweep sweep(data, 2, 0.5);
    auto top = sweep.upper().members();
    std::sort(top.begin(), top.end());
    CHECK(top.size() == 2);
    CHECK(top[1] == 4);
    CHECK((top[0] == 0 || top[0] == 1));
    const auto dec = sweep.ties_at(0.5);
    CHECK(dec.strict == std::vector<CandidateIndex>{4});
    CHECK(dec.tied().size() == 2);

    KineticSweep all(data, 5, 0.5);
    CHECK(all.lower().empty());
}

TEST_CASE("exchange events on the worked example")
{
    const auto data = fixtures::example3();
    KineticSweep sweep(data, 2, 0.5);
    std::vector<double> xs;
    while (true) {
        const double te = sweep.advance(0.62);
        if (te > 0.62) break;
        xs.push_back(sweep.exchange().x);
    }
    // 7/13 is where (0.7,0.35) passes (0.4,0.7), below the k-th level.
    REQUIRE(xs.size() == 2);
    CHECK(xs[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    CHECK(xs[1] == doctest::Approx(0.6).epsilon(1e-12));
    const auto region = WeightRegion::epsilon_box(WeightVector({0.5, 0.5}), 0.5, Objective::UtilityLoss);
    const auto candidates = brute_abscissae(data, region);
    for (double x : {7.0 / 13.0, 5.0 / 9.0, 0.6})
        CHECK(std::any_of(candidates.begin(), candidates.end(), [&](double c) { return std::abs(c - x) <= 1e-12; }));

    std::vector<Candidate> parallel;
    for (int i = 0; i < 6; ++i) parallel.push_back({i, {0.1 * i, 0.1 * i}, {}});
    KineticSweep flat(Dataset(parallel, 2, 0, 0), 3, 0.0);
    CHECK(flat.advance(1.0) > 1.0);
}

TEST_CASE("tournaments stay sound and the upper set is a top-k")
{
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 5 + rng() % 60;
        const auto data = fixtures::random_tied(rng, n, 2, 2, n);
        const int k = 1 + static_cast<int>(rng() % n);
        KineticSweep sweep(data, k, 0.0);
        while (true) {
            const double te = sweep.advance(1.0);
            if (te > 1.0) break;
            sweep.exchange();
            const double after = std::min(1.0, sweep.x() + 1e-12);
            REQUIRE(sweep.upper().consistent(sweep.x()));
            REQUIRE(sweep.lower().consistent(sweep.x()));
            auto top = sweep.upper().members();
            std::sort(top.begin(), top.end());
            REQUIRE(top.size() == static_cast<std::size_t>(k));
            // A valid top-k at the perturbed abscissa.
            const auto w = WeightVector::from_solver({after, 1 - after});
            auto dec = decompose_topk(data, k, w);
            std::sort(dec.strict.begin(), dec.strict.end());
            for (auto i : dec.strict) CHECK(std::binary_search(top.begin(), top.end(), i));
            auto tied = dec.tied();
            for (auto i : top) CHECK((std::binary_search(dec.strict.begin(), dec.strict.end(), i) ||
                                      std::find(tied.begin(), tied.end(), i) != tied.end()));
            REQUIRE(group_counts(data, top) == sweep.counts());
        }
    }
}

TEST_CASE("worked example selection")
{
    const auto data = fixtures::example3(true);
    const FairnessSpec spec({{1, 2}}, 2);
    WeightRegion region;
    region.reference = WeightVector({0.5, 0.5});
    region.halfspaces = {{{1.0, 0.0}, -0.45}, {{-1.0, 0.0}, 0.65}};
    region.objective = Objective::WDifference;
    const auto r = sweep_select(data, 2, spec, region);
    REQUIRE(r);
    CHECK(r->weight[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    CHECK(r->objective_value == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(verify_fair(data, 2, spec, r->weight));
    const auto b = brute_select_2d(data, 2, spec, region);
    REQUIRE(b);
    CHECK(std::abs(b->objective_value - r->objective_value) <= 1e-12);

    region.objective = Objective::UtilityLoss;
    const auto u = sweep_select(data, 2, spec, region);
    REQUIRE(u);
    CHECK(u->subset == std::vector<CandidateIndex>{2, 4});
    CHECK(std::abs(u->objective_value - 0.025 / 1.45) <= 1e-12);
}

TEST_CASE("fair reference is returned unchanged")
{
    const auto data = fixtures::example3(true);
    const auto spec = FairnessSpec::vacuous(1, 2);
    for (auto obj : {Objective::WDifference, Objective::UtilityLoss}) {
        const auto region = WeightRegion::epsilon_box(WeightVector({0.5, 0.5}), 0.1, obj);
        const auto r = sweep_select(data, 2, spec, region);
        REQUIRE(r);
        CHECK(r->objective_value == 0.0);
        if (obj == Objective::WDifference) CHECK(r->weight == region.reference);
    }
}

TEST_CASE("sweep agrees with the breakpoint oracle")
{
    std::mt19937_64 rng(123);
    int found = 0;
    for (int rep = 0; rep < 120; ++rep) {
        const auto obj = rep % 2 ? Objective::UtilityLoss : Objective::WDifference;
        const auto inst = fixtures::random_instance(rng, 5 + rng() % 60, 2, 12, obj);
        const auto s = sweep_select(inst.data, inst.k, inst.spec, inst.region);
        const auto b = brute_select_2d(inst.data, inst.k, inst.spec, inst.region);
        REQUIRE(s.has_value() == b.has_value());
        if (!s) continue;
        ++found;
        CHECK(std::abs(s->objective_value - b->objective_value) <= 1e-9);
        CHECK(verify_fair(inst.data, inst.k, inst.spec, s->weight));
        CHECK(inst.region.contains(s->weight));

        SweepOptions full;
        full.early_termination = false;
        const auto f = sweep_select(inst.data, inst.k, inst.spec, inst.region, full);
        REQUIRE(f);
        CHECK(std::abs(f->objective_value - s->objective_value) <= 1e-12);
    }
    CHECK(found > 30);
}

TEST_CASE("utility is monotone away from the reference")
{
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        const auto data = fixtures::random_tied(rng, 30, 2, 1, 20);
        const int k = 1 + static_cast<int>(rng() % 10);
        const WeightVector wo(fixtures::random_simplex(rng, 2));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double a = u(rng), b = u(rng);
        const bool right = rng() % 2;
        auto place = [&](double t) { return right ? wo[0] + t * (1 - wo[0]) : wo[0] - t * wo[0]; };
        if (a > b) std::swap(a, b);
        const double xa = place(a), xb = place(b);
        WeightRegion region;
        region.reference = wo;
        region.objective = Objective::UtilityLoss;
        const auto spec = FairnessSpec::vacuous(1, k);
        const double ref = reference_utility(data, k, wo);
        const auto ra = evaluate_weight(data, k, spec, region, WeightVector::from_solver({xa, 1 - xa}), ref);
        const auto rb = evaluate_weight(data, k, spec, region, WeightVector::from_solver({xb, 1 - xb}), ref);
        REQUIRE(ra);
        REQUIRE(rb);
        CHECK(ra->utility >= rb->utility - 1e-12);
    }
}

#include <doctest.h>

#include <random>

#include "fairtopk/core.hpp"
#include "fairtopk/log.hpp"
#include "fixtures.hpp"

using namespace fairtopk;

TEST_CASE("profile encoding")
{
    std::vector<GroupId> g{0, 2, 4};
    CHECK(encode_profile(g, 5) == 21);
    CHECK(decode_profile(21, 5) == g);
    CHECK(encode_profile({}, 5) == 0);
    CHECK(decode_profile(0, 5).empty());
    std::vector<GroupId> with_unprotected{1, 7};
    CHECK(encode_profile(with_unprotected, 5) == 2);
    CHECK_THROWS_AS(decode_profile(32, 5), DomainError);

    for (std::size_t np = 1; np <= 10; ++np)
        for (ProfileCode code = 0; code < (ProfileCode{1} << np); ++code)
            REQUIRE(encode_profile(decode_profile(code, np), np) == code);
}

TEST_CASE("score and w difference")
{
    const auto data = fixtures::example3();
    CHECK(score(WeightVector({0.6, 0.4}), data[2]) == doctest::Approx(0.56).epsilon(1e-14));
    CHECK(score(WeightVector({0.5, 0.5}), std::vector<double>{0.4, 0.7}) == doctest::Approx(0.55).epsilon(1e-14));
    CHECK(score(WeightVector({1.0, 0.0}), data[3]) == 0.8);
    CHECK_THROWS_AS(score(WeightVector({0.2, 0.3, 0.5}), data[0]), DomainError);

    const WeightVector a({0.6, 0.4}), b({0.5, 0.5});
    CHECK(w_difference(a, a) == 0.0);
    CHECK(w_difference(a, b) == doctest::Approx(0.2).epsilon(1e-14));

    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const WeightVector x(fixtures::random_simplex(rng, 4)), y(fixtures::random_simplex(rng, 4)),
            z(fixtures::random_simplex(rng, 4));
        CHECK(w_difference(x, z) <= w_difference(x, y) + w_difference(y, z) + 1e-12);
        CHECK(std::abs(w_difference(x, y) - w_difference(y, x)) <= 1e-12);
        const double alpha = 0.3;
        std::vector<double> mix(4);
        for (std::size_t i = 0; i < 4; ++i) mix[i] = alpha * x[i] + (1 - alpha) * y[i];
        const std::vector<double> p{0.1, 0.9, 0.4, 0.3};
        CHECK(std::abs(score(WeightVector(mix), p) - (alpha * score(x, p) + (1 - alpha) * score(y, p))) <= 1e-12);
    }
}

TEST_CASE("utility and utility loss")
{
    const auto data = fixtures::example3();
    const WeightVector wo({0.5, 0.5});
    std::vector<CandidateIndex> s1{4, 0}, s2{4, 1}, f1{4, 2}, f2{4, 3};
    CHECK(utility(s1, wo, data) == doctest::Approx(1.45).epsilon(1e-14));
    CHECK(utility(s2, wo, data) == doctest::Approx(1.45).epsilon(1e-14));
    CHECK(utility(f1, wo, data) == doctest::Approx(1.425).epsilon(1e-14));
    CHECK(utility(f2, wo, data) == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(utility({}, wo, data) == 0.0);
    CHECK(std::abs(utility_loss(1.425, 1.45) - 0.025 / 1.45) <= 1e-12);
    CHECK(utility_loss(1.45, 1.45) == 0.0);
    CHECK(utility_loss(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(utility_loss(0.5, 0.0), DomainError);
}

TEST_CASE("fairness counts and specs")
{
    FairnessSpec spec({{1, 5}}, 5);
    CHECK(is_fair_counts(std::vector<int>{3}, spec));
    CHECK_FALSE(is_fair_counts(std::vector<int>{0}, spec));

    const std::vector<std::pair<double, double>> frac{{0.4, 0.6}, {0.7, 0.9}, {0.3, 0.55}};
    const auto f = FairnessSpec::from_fractions(frac, 50);
    CHECK(f[0].lower == 20);
    CHECK(f[0].upper == 30);
    CHECK(f[1].lower == 35);
    CHECK(f[1].upper == 45);
    CHECK(f[2].lower == 15);
    CHECK(f[2].upper == 27);

    FairnessSpec clamped({{0, 9}}, 3);
    CHECK(clamped[0].upper == 3);
    CHECK_THROWS_AS(FairnessSpec({{4, 9}}, 3), DomainError);

    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 300; ++rep) {
        const auto s = fixtures::random_spec(rng, 3, 6);
        std::vector<int> counts(3);
        std::uniform_int_distribution<int> u(0, 6);
        for (auto& c : counts) c = u(rng);
        bool expect = true;
        for (std::size_t g = 0; g < 3; ++g) expect = expect && s[g].lower <= counts[g] && counts[g] <= s[g].upper;
        CHECK(is_fair_counts(counts, s) == expect);
    }
}

TEST_CASE("weight vector validation")
{
    CHECK_THROWS_AS(WeightVector({-0.1, 1.1}), DomainError);
    std::vector<std::string> warnings;
    set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
    const WeightVector w({1.0, 1.0});
    set_warning_sink(nullptr);
    CHECK(w[0] == 0.5);
    CHECK(warnings.size() == 1);
    const auto s = WeightVector::from_solver({0.5 + 1e-15, 0.5, -1e-17});
    CHECK(s[2] == 0.0);
}

TEST_CASE("dataset validation")
{
    CHECK_THROWS_AS(Dataset({Candidate{0, {0.1}, {3}}}, 1, 2, 1), DomainError);
    CHECK_THROWS_AS(Dataset({Candidate{0, {0.1}, {}}, Candidate{0, {0.2}, {}}}, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(Dataset({Candidate{0, {0.1, 0.2}, {}}}, 1, 1, 1), DomainError);
    const Dataset d({Candidate{0, {0.1}, {1, 0, 1}}}, 1, 2, 2);
    CHECK(d[0].groups == std::vector<GroupId>{0, 1});
    CHECK(d.profile(0) == 3);
}

TEST_CASE("epsilon box region")
{
    const auto r = WeightRegion::epsilon_box(WeightVector({0.5, 0.5}), 0.1, Objective::WDifference);
    CHECK(r.contains(WeightVector({0.6, 0.4})));
    CHECK(r.contains(WeightVector({0.45, 0.55})));
    CHECK_FALSE(r.contains(WeightVector({0.7, 0.3})));
}

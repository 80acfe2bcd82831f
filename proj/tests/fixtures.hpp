#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fairtopk/core.hpp"

namespace fixtures {

using namespace fairtopk;

// The five-candidate dataset with k = 2 ties at (0.5,0.5) and (0.6,0.4).
// Candidates 2 and 3 form protected group 0 when protected is set.
inline Dataset example3(bool protected_group = false)
{
    const std::vector<std::vector<double>> pts{{0.4, 0.7}, {0.5, 0.6}, {0.7, 0.35}, {0.8, 0.2}, {0.9, 0.9}};
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Candidate c{static_cast<std::int64_t>(i), pts[i], {}};
        if (protected_group && (i == 2 || i == 3)) c.groups = {0};
        cands.push_back(c);
    }
    return Dataset(cands, 2, protected_group ? 1 : 0, protected_group ? 1 : 0);
}

// Points drawn from a small pool so that scores tie often.
inline Dataset random_tied(std::mt19937_64& rng, std::size_t n, std::size_t d, std::size_t np, std::size_t pool = 0)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (pool == 0) pool = std::max<std::size_t>(2, n / 3);
    std::vector<std::vector<double>> base(pool, std::vector<double>(d));
    for (auto& p : base)
        for (auto& v : p) v = std::round(unit(rng) * 20.0) / 20.0;
    std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
    std::bernoulli_distribution member(0.4);
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < n; ++i) {
        Candidate c{static_cast<std::int64_t>(i), base[pick(rng)], {}};
        for (std::size_t g = 0; g < np; ++g)
            if (member(rng)) c.groups.push_back(static_cast<GroupId>(g));
        cands.push_back(std::move(c));
    }
    return Dataset(cands, d, np, np);
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t d)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(d);
    double s = 0.0;
    for (auto& v : w) s += (v = e(rng));
    for (auto& v : w) v /= s;
    return w;
}

// A weight from a coarse grid, so that ties among grid-valued points are exact-ish.
inline WeightVector random_grid_weight(std::mt19937_64& rng, std::size_t d, int steps = 10)
{
    std::vector<int> cuts(d - 1);
    std::uniform_int_distribution<int> u(0, steps);
    for (auto& c : cuts) c = u(rng);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> w(d);
    int prev = 0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        w[i] = static_cast<double>(cuts[i] - prev) / steps;
        prev = cuts[i];
    }
    w[d - 1] = static_cast<double>(steps - prev) / steps;
    return WeightVector(w);
}

inline FairnessSpec random_spec(std::mt19937_64& rng, std::size_t np, int k)
{
    std::vector<GroupBound> b(np);
    std::uniform_int_distribution<int> u(0, k);
    for (auto& g : b) {
        int x = u(rng), y = u(rng);
        if (x > y) std::swap(x, y);
        g = {x, y};
    }
    return FairnessSpec(b, k);
}

}  // namespace fixtures

namespace fixtures {

// Random 2-D or d-D instance with repeated points and a random epsilon box.
struct Instance {
    Dataset data;
    int k = 1;
    FairnessSpec spec;
    WeightRegion region;
};

inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t d, int max_k, Objective objective,
                                std::size_t max_np = 3)
{
    Instance inst;
    const std::size_t np = 1 + rng() % max_np;
    inst.data = random_tied(rng, n, d, np, std::max<std::size_t>(3, n * 2 / 3));
    inst.k = 1 + static_cast<int>(rng() % static_cast<std::size_t>(std::min<int>(max_k, static_cast<int>(n))));
    // Bounds centred on the group's share of the data so that some but not all weights are fair.
    std::vector<GroupBound> b(np);
    for (std::size_t g = 0; g < np; ++g) {
        std::size_t members = 0;
        for (const auto& c : inst.data.candidates())
            members += std::count(c.groups.begin(), c.groups.end(), static_cast<GroupId>(g));
        const double share = static_cast<double>(members) / static_cast<double>(n) * inst.k;
        const int spread = static_cast<int>(rng() % 2);
        const int centre = static_cast<int>(std::lround(share)) + static_cast<int>(rng() % 3) - 1;
        b[g] = {std::clamp(centre - spread, 0, inst.k), std::clamp(centre + spread, 0, inst.k)};
    }
    inst.spec = FairnessSpec(b, inst.k);
    std::uniform_real_distribution<double> eps(0.05, 0.5);
    inst.region = WeightRegion::epsilon_box(WeightVector(random_simplex(rng, d)), eps(rng), objective);
    return inst;
}

}  // namespace fixtures

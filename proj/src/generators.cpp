#include "fairtopk/generators.hpp"

#include <algorithm>
#include <functional>

namespace fairtopk {

namespace {

const std::vector<double> kPoint{0.5, 0.5};

}  // namespace

std::optional<int> min_cover_size(std::size_t universe_size, const std::vector<std::vector<std::size_t>>& collection)
{
    if (universe_size > 63) throw DomainError("exhaustive cover search supports at most 63 elements");
    const std::uint64_t all = universe_size == 0 ? 0 : (~std::uint64_t{0} >> (64 - universe_size));
    std::vector<std::uint64_t> masks;
    std::uint64_t reach = 0;
    for (const auto& s : collection) {
        std::uint64_t m = 0;
        for (auto e : s) m |= std::uint64_t{1} << e;
        masks.push_back(m);
        reach |= m;
    }
    if (reach != all) return std::nullopt;
    if (all == 0) return 0;

    // Iterative deepening over combinations in index order.
    for (std::size_t size = 1; size <= masks.size(); ++size) {
        std::function<bool(std::size_t, std::size_t, std::uint64_t)> search = [&](std::size_t from, std::size_t left,
                                                                                  std::uint64_t covered) {
            if (covered == all) return true;
            if (left == 0) return false;
            for (std::size_t i = from; i + left <= masks.size(); ++i)
                if (search(i + 1, left - 1, covered | masks[i])) return true;
            return false;
        };
        if (search(0, size, 0)) return static_cast<int>(size);
    }
    return std::nullopt;
}

GeneratedInstance gen_setcover(std::size_t universe_size, const std::vector<std::vector<std::size_t>>& collection, int k)
{
    if (k < 1 || static_cast<std::size_t>(k) > collection.size()) throw DomainError("k must lie in 1..|collection|");
    std::vector<bool> covered(universe_size, false);
    std::vector<Candidate> cands;
    for (std::size_t s = 0; s < collection.size(); ++s) {
        Candidate c{static_cast<std::int64_t>(s), kPoint, {}};
        for (auto e : collection[s]) {
            if (e >= universe_size) throw DomainError("set element outside the universe");
            covered[e] = true;
            c.groups.push_back(static_cast<GroupId>(e));
        }
        cands.push_back(std::move(c));
    }
    for (std::size_t e = 0; e < universe_size; ++e)
        if (!covered[e]) throw DomainError("element " + std::to_string(e) + " is in no set");
    std::vector<std::string> names;
    for (std::size_t e = 0; e < universe_size; ++e) names.push_back("u" + std::to_string(e + 1));
    GeneratedInstance g{Dataset(std::move(cands), 2, universe_size, universe_size, names),
                        FairnessSpec(std::vector<GroupBound>(universe_size, GroupBound{1, k}), k), k, "setcover",
                        std::nullopt, std::nullopt};
    if (universe_size <= 20) g.min_cover = min_cover_size(universe_size, collection);
    return g;
}

GeneratedInstance gen_tov(const std::vector<std::vector<BinaryVector>>& lists)
{
    const std::size_t t = lists.size();
    if (t < 2) throw DomainError("need at least two vector lists");
    std::size_t length = 0;
    bool first = true;
    for (const auto& l : lists)
        for (const auto& v : l) {
            if (first) length = v.size();
            first = false;
            if (v.size() != length) throw DomainError("vectors must have equal length");
        }
    if (length + t > 63) throw DomainError("too many groups for a profile code");

    std::vector<Candidate> cands;
    std::int64_t id = 0;
    for (std::size_t i = 0; i < t; ++i)
        for (const auto& v : lists[i]) {
            Candidate c{id++, kPoint, {}};
            for (std::size_t j = 0; j < length; ++j)
                if (v[j]) c.groups.push_back(static_cast<GroupId>(j));
            c.groups.push_back(static_cast<GroupId>(length + i));  // marker for the list
            cands.push_back(std::move(c));
        }
    const int k = static_cast<int>(t);
    if (cands.size() < t) throw DomainError("every list needs a vector");
    std::vector<GroupBound> bounds(length, GroupBound{0, k - 1});
    for (std::size_t i = 0; i < t; ++i) bounds.push_back({1, 1});
    std::vector<std::string> names;
    for (std::size_t j = 0; j < length; ++j) names.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < t; ++i) names.push_back("list" + std::to_string(i + 1));
    return GeneratedInstance{Dataset(std::move(cands), 2, length + t, length + t, names), FairnessSpec(bounds, k), k,
                             t == 2 ? "ov" : "tov", std::nullopt, has_orthogonal_tuple(lists)};
}

GeneratedInstance gen_ov(const std::vector<BinaryVector>& a, const std::vector<BinaryVector>& b)
{
    return gen_tov({a, b});
}

bool has_orthogonal_tuple(const std::vector<std::vector<BinaryVector>>& lists)
{
    if (lists.empty()) return false;
    for (const auto& l : lists)
        if (l.empty()) return false;
    const std::size_t length = lists[0][0].size();
    std::vector<int> product(length, 1);
    std::function<bool(std::size_t, std::vector<int>&)> scan = [&](std::size_t i, std::vector<int>& acc) {
        if (i == lists.size()) return std::all_of(acc.begin(), acc.end(), [](int x) { return x == 0; });
        for (const auto& v : lists[i]) {
            std::vector<int> next(acc);
            for (std::size_t j = 0; j < length; ++j) next[j] *= v[j];
            if (scan(i + 1, next)) return true;
        }
        return false;
    };
    return scan(0, product);
}

std::vector<std::vector<std::size_t>> random_collection(std::mt19937_64& rng, std::size_t universe_size,
                                                        std::size_t sets, double density)
{
    std::bernoulli_distribution take(density);
    std::uniform_int_distribution<std::size_t> pick(0, sets - 1);
    std::vector<std::vector<std::size_t>> out(sets);
    for (auto& s : out)
        for (std::size_t e = 0; e < universe_size; ++e)
            if (take(rng)) s.push_back(e);
    // Make sure everything is covered.
    for (std::size_t e = 0; e < universe_size; ++e) {
        bool hit = false;
        for (const auto& s : out) hit = hit || std::find(s.begin(), s.end(), e) != s.end();
        if (!hit) {
            auto& s = out[pick(rng)];
            s.insert(std::upper_bound(s.begin(), s.end(), e), e);
        }
    }
    return out;
}

std::vector<BinaryVector> random_vectors(std::mt19937_64& rng, std::size_t count, std::size_t length, double density)
{
    std::bernoulli_distribution bit(density);
    std::vector<BinaryVector> out(count, BinaryVector(length));
    for (auto& v : out)
        for (auto& x : v) x = bit(rng) ? 1 : 0;
    return out;
}

}  // namespace fairtopk

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairtopk/core.hpp"

namespace fairtopk {

/// An adversarial verification instance. Every candidate has the same point,
/// so the whole top-k is one tie.
struct GeneratedInstance {
    Dataset data;
    FairnessSpec spec;
    int k = 0;
    std::string kind;               // setcover, ov or tov
    std::optional<int> min_cover;   // setcover, when small enough to search
    std::optional<bool> orthogonal; // ov and tov
};

using BinaryVector = std::vector<int>;

// One candidate per set and one protected group per element; every element needs a member.
GeneratedInstance gen_setcover(std::size_t universe_size, const std::vector<std::vector<std::size_t>>& collection, int k);

// Exhaustive minimum cover size; nothing when some element is uncovered.
std::optional<int> min_cover_size(std::size_t universe_size, const std::vector<std::vector<std::size_t>>& collection);

// Pick one vector from A and one from B sharing no coordinate; k = 2.
GeneratedInstance gen_ov(const std::vector<BinaryVector>& a, const std::vector<BinaryVector>& b);

// One vector from each list with no coordinate set in all of them; k = t.
GeneratedInstance gen_tov(const std::vector<std::vector<BinaryVector>>& lists);

bool has_orthogonal_tuple(const std::vector<std::vector<BinaryVector>>& lists);

// Random inputs for the generators.
std::vector<std::vector<std::size_t>> random_collection(std::mt19937_64& rng, std::size_t universe_size,
                                                        std::size_t sets, double density);
std::vector<BinaryVector> random_vectors(std::mt19937_64& rng, std::size_t count, std::size_t length, double density);

}  // namespace fairtopk

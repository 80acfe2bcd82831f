#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fairtopk/core.hpp"

namespace fairtopk {

struct CellNode {
    std::vector<CandidateIndex> subset;  // sorted
    WeightVector witness;
};

CellNode initial_cell(const Dataset& data, int k, const WeightRegion& region);

/// A weight in the region at which subset is a top-k (ties allowed), chosen
/// to maximize the gap between members and the rest. Deterministic for a
/// given subset and seed.
std::optional<WeightVector> cell_witness(const Dataset& data, std::span<const CandidateIndex> subset,
                                         const WeightRegion& region, std::uint64_t seed = 0);

// cell_witness for subset with out replaced by in.
std::optional<WeightVector> swap_feasible(const Dataset& data, std::span<const CandidateIndex> subset,
                                          CandidateIndex out, CandidateIndex in, const WeightRegion& region,
                                          std::uint64_t seed = 0);

/// Closest weight to the region's reference (L1) at which subset is a top-k.
std::optional<std::pair<WeightVector, double>> cell_min_wdiff(const Dataset& data,
                                                              std::span<const CandidateIndex> subset,
                                                              const WeightRegion& region);

struct TraverseOptions {
    std::size_t workers = 1;
    std::uint64_t budget = 5'000'000;  // swap tests
    std::uint64_t seed = 0;
    bool record_cells = false;
};

struct TraverseStats {
    std::uint64_t cells = 0;
    std::uint64_t swap_tests = 0;  // feasibility programs solved
    std::uint64_t skipped = 0;     // swaps ruled out without a program
    std::vector<std::vector<CandidateIndex>> visited;  // when record_cells
};

/// Best fair cell over every top-k subset reachable inside the region.
/// Throws RefusalError when the swap-test budget runs out.
std::optional<FairResult> traverse(const Dataset& data, int k, const FairnessSpec& spec, const WeightRegion& region,
                                   const TraverseOptions& options = {}, TraverseStats* stats = nullptr);

}  // namespace fairtopk

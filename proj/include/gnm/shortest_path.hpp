#pragma once

#include <cstddef>
#include <vector>

#include "gnm/graph.hpp"

namespace gnm {

// One selected model point per cluster plus the total source->sink cost.
struct AnchorPath {
    std::vector<std::size_t> anchors;  // model indices, anchors[j] in C_{j+1}
    double total_cost = 0.0;
    std::size_t relaxations = 0;  // edges examined (reaching algorithm only)
};

// Single-pass label correction in topological order (source, C_1, ..., C_m,
// sink; ascending model index within a layer), O(|E|). The strict-inequality
// update keeps the first-found predecessor, so equal-cost ties resolve
// deterministically under the fixed processing order.
AnchorPath shortest_anchor_path(const LayeredGraph& g);

// Exhaustive enumeration over all anchor combinations, in lexicographic
// anchor-index order (ties keep the first, i.e. lexicographically smallest,
// path). Rejects instances with more than 10^6 combinations.
AnchorPath brute_force_shortest(const LayeredGraph& g);

// Total weight of the m+1 arcs through the given anchors.
double path_cost(const LayeredGraph& g, const std::vector<std::size_t>& anchors);

}  // namespace gnm

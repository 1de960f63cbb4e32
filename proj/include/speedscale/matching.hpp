#pragma once

#include <vector>

namespace speedscale {

struct BipartiteEdge {
    int left = 0;
    int right = 0;
    double cost = 0.0;
};

/// Minimum-cost matching that covers every left vertex.
/// `match[l]` is the index into `edges` used by left vertex l.
struct LeftSaturatingMatching {
    std::vector<int> match;
    double cost = 0.0;
};

/// Successive shortest augmenting paths with Johnson potentials. Costs must be
/// finite (negative costs are allowed). Parallel edges are allowed. Throws
/// ContractViolation when no matching covers all left vertices.
LeftSaturatingMatching min_cost_left_saturating_matching(int left_count, int right_count, const std::vector<BipartiteEdge>& edges);

}  // namespace speedscale

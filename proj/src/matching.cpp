#include "speedscale/matching.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "speedscale/errors.hpp"

namespace speedscale {

LeftSaturatingMatching min_cost_left_saturating_matching(int left_count, int right_count, const std::vector<BipartiteEdge>& edges) {
    if (left_count < 0 || right_count < 0) throw std::invalid_argument("negative vertex count");
    std::vector<std::vector<int>> adj(left_count);
    double min_cost = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& ed = edges[e];
        if (ed.left < 0 || ed.left >= left_count || ed.right < 0 || ed.right >= right_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (!std::isfinite(ed.cost)) throw std::invalid_argument("non-finite edge cost");
        adj[ed.left].push_back(static_cast<int>(e));
        min_cost = std::min(min_cost, ed.cost);
    }

    // Node layout: left vertices 0..L-1, right vertices L..L+R-1.
    const int total = left_count + right_count;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // Reduced cost of u->v is cost + potential[u] - potential[v]; starting the left
    // potentials at -min_cost makes every reduced cost non-negative.
    std::vector<double> potential(total, 0.0);
    for (int l = 0; l < left_count; ++l) potential[l] = -min_cost;
    std::vector<int> match_left(left_count, -1);   // edge index
    std::vector<int> match_right(right_count, -1); // edge index

    LeftSaturatingMatching result;
    for (int source = 0; source < left_count; ++source) {
        std::vector<double> dist(total, kInf);
        std::vector<int> via(total, -1);  // edge used to reach a right vertex
        std::vector<char> done(total, 0);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[source] = 0.0;
        pq.push({0.0, source});
        int sink = -1;
        while (!pq.empty()) {
            const auto [d, u] = pq.top();
            pq.pop();
            if (done[u]) continue;
            done[u] = 1;
            if (u >= left_count) {
                const int r = u - left_count;
                if (match_right[r] < 0) {
                    sink = u;
                    break;
                }
                // Backward along the matched edge to its left vertex.
                const int l = edges[match_right[r]].left;
                const double rc = -edges[match_right[r]].cost + potential[u] - potential[l];
                if (d + rc < dist[l]) {
                    dist[l] = d + rc;
                    pq.push({dist[l], l});
                }
                continue;
            }
            for (int e : adj[u]) {
                if (match_left[u] == e) continue;
                const int v = left_count + edges[e].right;
                const double rc = edges[e].cost + potential[u] - potential[v];
                if (d + rc < dist[v]) {
                    dist[v] = d + rc;
                    via[v] = e;
                    pq.push({dist[v], v});
                }
            }
        }
        if (sink < 0)
            throw ContractViolation("no matching covers left vertex " + std::to_string(source) + " after " +
                                    std::to_string(source) + " were matched");
        const double reach = dist[sink];
        for (int u = 0; u < total; ++u)
            if (done[u] && dist[u] < reach) potential[u] += dist[u] - reach;
        // Augment along the path ending at sink.
        int v = sink;
        while (true) {
            const int e = via[v];
            const int l = edges[e].left;
            const int r = v - left_count;
            const int previous = match_left[l];
            match_left[l] = e;
            match_right[r] = e;
            if (l == source) break;
            v = left_count + edges[previous].right;
        }
    }
    result.match = match_left;
    for (int l = 0; l < left_count; ++l) result.cost += edges[match_left[l]].cost;
    return result;
}

}  // namespace speedscale

#include <algorithm>
#include <deque>
#include <limits>

#include "tigt/errors.hpp"
#include "tigt/topology.hpp"

namespace tigt {
namespace {

constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

}  // namespace

Components connected_components(const Graph& g) {
    const std::size_t n = g.num_nodes();
    constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
    Components out;
    out.label.assign(n, kUnset);
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (out.label[s] != kUnset) continue;
        out.label[s] = out.count;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId w : g.neighbors(u)) {
                if (out.label[w] == kUnset) {
                    out.label[w] = out.count;
                    stack.push_back(w);
                }
            }
        }
        ++out.count;
    }
    return out;
}

CycleBasis cycle_basis(const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<NodeId> parent(n, kNoParent);
    std::vector<std::size_t> depth(n, 0);
    std::vector<char> visited(n, 0);

    std::deque<NodeId> queue;
    for (NodeId root = 0; root < n; ++root) {
        if (visited[root]) continue;
        visited[root] = 1;
        queue.push_back(root);
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            for (NodeId w : g.neighbors(u)) {
                if (visited[w]) continue;
                visited[w] = 1;
                parent[w] = u;
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
    }

    CycleBasis basis;
    basis.parent_graph_id = fingerprint(g);
    for (const auto& e : g.edges()) {
        if (parent[e.v] == e.u || parent[e.u] == e.v) continue;  // tree edge
        NodeId a = e.u;
        NodeId b = e.v;
        std::vector<NodeId> left{a};
        std::vector<NodeId> right{b};
        while (a != b) {
            if (depth[a] >= depth[b]) {
                a = parent[a];
                left.push_back(a);
            } else {
                b = parent[b];
                right.push_back(b);
            }
        }
        right.pop_back();  // lca already closes `left`
        left.insert(left.end(), right.rbegin(), right.rend());
        basis.cycles.push_back(std::move(left));
    }
    return basis;
}

Graph CliqueAdjacency::as_graph() const {
    std::vector<Edge> edges;
    const auto n = matrix.rows();
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            if (matrix(a, b) != 0.0) edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
        }
    }
    return Graph(static_cast<std::size_t>(n), std::move(edges));
}

CliqueAdjacency clique_adjacency(const CycleBasis& basis, std::size_t num_nodes,
                                 std::optional<std::size_t> max_cycle_len) {
    const auto n = static_cast<Eigen::Index>(num_nodes);
    CliqueAdjacency out{Matrix::Zero(n, n)};
    for (const auto& cycle : basis.cycles) {
        if (max_cycle_len && cycle.size() > *max_cycle_len) continue;
        for (NodeId a : cycle) {
            if (a >= num_nodes) throw ParameterError("basis cycle references node " + std::to_string(a));
            for (NodeId b : cycle) {
                if (a != b) out.matrix(a, b) = 1.0;
            }
        }
    }
    return out;
}

CliqueAdjacency clique_adjacency(const Graph& g, std::optional<std::size_t> max_cycle_len) {
    return clique_adjacency(cycle_basis(g), g.num_nodes(), max_cycle_len);
}

std::int64_t euler_invariant(const Graph& g) {
    return static_cast<std::int64_t>(g.num_edges()) - static_cast<std::int64_t>(g.num_nodes()) +
           static_cast<std::int64_t>(connected_components(g).count);
}

std::map<std::size_t, std::size_t> cycle_length_histogram(const CycleBasis& basis) {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& c : basis.cycles) ++hist[c.size()];
    return hist;
}

bool is_bipartite(const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<int> side(n, -1);
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (side[s] != -1) continue;
        side[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId w : g.neighbors(u)) {
                if (side[w] == -1) {
                    side[w] = 1 - side[u];
                    stack.push_back(w);
                } else if (side[w] == side[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace tigt

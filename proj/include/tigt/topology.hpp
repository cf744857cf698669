#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tigt/graph.hpp"

namespace tigt {

// Fundamental cycles of a spanning forest. Each cycle lists its nodes in
// walk order; the closing edge runs from the last node back to the first.
struct CycleBasis {
    std::vector<std::vector<NodeId>> cycles;
    std::uint64_t parent_graph_id = 0;  // fingerprint() of the source graph

    std::size_t size() const { return cycles.size(); }
};

// Adjacency of the union of cliques spanned by basis cycles.
struct CliqueAdjacency {
    Matrix matrix;

    std::size_t num_nodes() const { return static_cast<std::size_t>(matrix.rows()); }
    // Same relation as a Graph (one edge per nonzero upper-triangular entry).
    Graph as_graph() const;
};

struct Components {
    std::vector<std::size_t> label;  // component id per node, numbered by lowest node
    std::size_t count = 0;
};

Components connected_components(const Graph& g);

// Spanning forest by BFS from the lowest-index node of every component,
// neighbors visited in ascending order. Non-tree edges are taken in sorted
// order; each closes one fundamental cycle u -> ... -> lca -> ... -> v.
// Forests yield an empty basis.
CycleBasis cycle_basis(const Graph& g);

// a(u,v) = 1 iff u != v lie on a common basis cycle. With `max_cycle_len`,
// only cycles of at most that many nodes contribute.
CliqueAdjacency clique_adjacency(const CycleBasis& basis, std::size_t num_nodes,
                                 std::optional<std::size_t> max_cycle_len = std::nullopt);

// Convenience: clique_adjacency(cycle_basis(g), g.num_nodes(), bound).
CliqueAdjacency clique_adjacency(const Graph& g, std::optional<std::size_t> max_cycle_len = std::nullopt);

// |E| - |V| + components, the dimension of the cycle space.
std::int64_t euler_invariant(const Graph& g);

// Nodes whose removal increases the number of connected components,
// ascending.
std::vector<NodeId> articulation_vertices(const Graph& g);

// Edges whose removal increases the number of connected components, sorted.
std::vector<Edge> bridges(const Graph& g);

// Induced subgraph on all nodes but v; nodes above v shift down by one.
Graph delete_vertex(const Graph& g, NodeId v);

// Same node set, one edge fewer.
Graph delete_edge(const Graph& g, Edge e);

std::map<std::size_t, std::size_t> cycle_length_histogram(const CycleBasis& basis);

bool is_bipartite(const Graph& g);

}  // namespace tigt

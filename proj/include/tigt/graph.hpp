#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tigt {

using NodeId = std::uint32_t;
using Matrix = Eigen::MatrixXd;

// Undirected edge stored with u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Orders the endpoints so that the result compares equal for (a,b) and (b,a).
Edge make_edge(NodeId a, NodeId b);

// Immutable simple undirected graph on nodes 0..num_nodes-1.
//
// The edge list is kept sorted lexicographically with u < v, so two graphs
// with the same edge set compare equal regardless of input order. Neighbor
// lists are sorted ascending. Node features are optional and, when present,
// have one row per node.
class Graph {
public:
    Graph() = default;

    // Throws ParameterError on self-loops, duplicate edges, endpoints out of
    // range or a feature matrix whose row count differs from num_nodes.
    explicit Graph(std::size_t num_nodes, std::vector<Edge> edges = {},
                   std::optional<Matrix> node_features = std::nullopt);

    std::size_t num_nodes() const { return num_nodes_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const NodeId> neighbors(NodeId v) const;
    std::size_t degree(NodeId v) const { return neighbors(v).size(); }
    bool has_edge(NodeId a, NodeId b) const;

    const std::optional<Matrix>& node_features() const { return features_; }
    Graph with_features(Matrix features) const;
    Graph without_features() const;

    // Structural equality plus exact feature equality.
    bool operator==(const Graph& other) const;

private:
    std::size_t num_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adjacency_;
    std::optional<Matrix> features_;
};

struct DegreeSequence {
    std::vector<std::size_t> degrees;

    std::size_t total() const;
    // Degrees sorted ascending; equal for isomorphic graphs.
    std::vector<std::size_t> sorted() const;
};

DegreeSequence degree_sequence(const Graph& g);

// Dense symmetric 0/1 matrix with zero diagonal.
Matrix adjacency_matrix(const Graph& g);

// Relabels node v as permutation[v]. Features move with their node.
Graph permute(const Graph& g, std::span<const NodeId> permutation);

// Nodes of `h` are shifted by g.num_nodes(). Features are dropped.
Graph disjoint_union(const Graph& g, const Graph& h);

// Stable 64-bit FNV-1a hash of the node count and canonical edge list.
std::uint64_t fingerprint(const Graph& g);

// Uniformly random permutation of 0..n-1 drawn from a seeded generator.
std::vector<NodeId> random_permutation(std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline constexpr std::array<std::size_t, 10> kCslSkips{2, 3, 4, 5, 6, 9, 11, 12, 13, 16};
inline constexpr std::size_t kCslNodes = 41;

// Circular skip link graph: ring 0..n-1 plus chords i -- i+skip (mod n).
// Requires 2 <= skip and 2*skip < n.
Graph generate_csl(std::size_t num_nodes, std::size_t skip);

// K4 x K4: node 4*i + j is square (i, j); adjacent iff same row or column.
Graph generate_rook_4x4();

// Cayley graph on Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)}.
Graph generate_shrikhande();

Graph empty_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
// Center 0 joined to leaves 1..leaves.
Graph star_graph(std::size_t leaves);
// Two triangles sharing node 0.
Graph bowtie_graph();
// C5 plus the chord 0 -- 2.
Graph cycle5_with_chord();

// Erdos-Renyi G(n, p) from a seeded generator.
Graph gnp_random_graph(std::size_t n, double p, std::uint64_t seed);

struct LabeledGraph {
    Graph graph;
    int label = 0;
    std::size_t skip = 0;
    // Maps representative node v to copy node permutation[v].
    std::vector<NodeId> permutation;
};

// `copies_per_class` node-permuted copies of generate_csl(num_nodes, skip)
// for every skip, labeled with the skip's index. Every node carries the
// single feature 1.0.
std::vector<LabeledGraph> generate_csl_dataset(std::size_t num_nodes,
                                               std::span<const std::size_t> skips,
                                               std::size_t copies_per_class,
                                               std::uint64_t seed);

// n x 1 matrix of ones.
Matrix constant_features(std::size_t num_nodes, double value = 1.0);

}  // namespace tigt

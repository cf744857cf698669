#include "tigt/graph.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "tigt/errors.hpp"

namespace tigt {

Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::optional<Matrix> node_features)
    : num_nodes_(num_nodes), edges_(std::move(edges)), features_(std::move(node_features)) {
    for (auto& e : edges_) {
        if (e.u == e.v) {
            throw ParameterError("self-loop at node " + std::to_string(e.u));
        }
        if (e.u >= num_nodes_ || e.v >= num_nodes_) {
            throw ParameterError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                 ") has an endpoint >= " + std::to_string(num_nodes_));
        }
        e = make_edge(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end());
    auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end()) {
        throw ParameterError("duplicate edge (" + std::to_string(dup->u) + ", " +
                             std::to_string(dup->v) + ")");
    }
    if (features_ && static_cast<std::size_t>(features_->rows()) != num_nodes_) {
        throw ParameterError("feature matrix has " + std::to_string(features_->rows()) +
                             " rows for " + std::to_string(num_nodes_) + " nodes");
    }

    // CSR neighbor lists, each sorted ascending.
    std::vector<std::size_t> deg(num_nodes_, 0);
    for (const auto& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    offsets_.assign(num_nodes_ + 1, 0);
    for (std::size_t v = 0; v < num_nodes_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
        adjacency_[fill[e.u]++] = e.v;
        adjacency_[fill[e.v]++] = e.u;
    }
    for (std::size_t v = 0; v < num_nodes_; ++v) {
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
    }
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
    if (v >= num_nodes_) throw ParameterError("node " + std::to_string(v) + " out of range");
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool Graph::has_edge(NodeId a, NodeId b) const {
    if (a >= num_nodes_ || b >= num_nodes_ || a == b) return false;
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

Graph Graph::with_features(Matrix features) const {
    return Graph(num_nodes_, edges_, std::move(features));
}

Graph Graph::without_features() const { return Graph(num_nodes_, edges_); }

bool Graph::operator==(const Graph& other) const {
    if (num_nodes_ != other.num_nodes_ || edges_ != other.edges_) return false;
    if (features_.has_value() != other.features_.has_value()) return false;
    if (!features_) return true;
    return features_->rows() == other.features_->rows() &&
           features_->cols() == other.features_->cols() && *features_ == *other.features_;
}

std::size_t DegreeSequence::total() const {
    return std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
}

std::vector<std::size_t> DegreeSequence::sorted() const {
    auto out = degrees;
    std::sort(out.begin(), out.end());
    return out;
}

DegreeSequence degree_sequence(const Graph& g) {
    DegreeSequence seq;
    seq.degrees.reserve(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) seq.degrees.push_back(g.degree(v));
    return seq;
}

Matrix adjacency_matrix(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Matrix a = Matrix::Zero(n, n);
    for (const auto& e : g.edges()) {
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    return a;
}

Graph permute(const Graph& g, std::span<const NodeId> permutation) {
    const std::size_t n = g.num_nodes();
    if (permutation.size() != n) {
        throw ParameterError("permutation has " + std::to_string(permutation.size()) +
                             " entries for " + std::to_string(n) + " nodes");
    }
    std::vector<char> seen(n, 0);
    for (NodeId p : permutation) {
        if (p >= n || seen[p]) throw ParameterError("not a permutation of 0.." + std::to_string(n - 1));
        seen[p] = 1;
    }
    std::vector<Edge> edges;
    edges.reserve(g.num_edges());
    for (const auto& e : g.edges()) edges.push_back(make_edge(permutation[e.u], permutation[e.v]));
    std::optional<Matrix> features;
    if (g.node_features()) {
        const Matrix& src = *g.node_features();
        Matrix dst(src.rows(), src.cols());
        for (std::size_t v = 0; v < n; ++v) dst.row(permutation[v]) = src.row(static_cast<Eigen::Index>(v));
        features = std::move(dst);
    }
    return Graph(n, std::move(edges), std::move(features));
}

Graph disjoint_union(const Graph& g, const Graph& h) {
    std::vector<Edge> edges = g.edges();
    const auto shift = static_cast<NodeId>(g.num_nodes());
    for (const auto& e : h.edges()) edges.push_back({e.u + shift, e.v + shift});
    return Graph(g.num_nodes() + h.num_nodes(), std::move(edges));
}

std::uint64_t fingerprint(const Graph& g) {
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix = [&hash](std::uint64_t value) {
        for (int i = 0; i < 8; ++i) {
            hash ^= (value >> (8 * i)) & 0xffU;
            hash *= 1099511628211ULL;
        }
    };
    mix(g.num_nodes());
    for (const auto& e : g.edges()) {
        mix(e.u);
        mix(e.v);
    }
    return hash;
}

std::vector<NodeId> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    // Explicit Fisher-Yates on raw engine output: the result depends only on
    // mt19937_64, which the standard pins down bit for bit.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace tigt

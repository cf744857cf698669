#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace oracle {

using tigt::Edge;
using tigt::NodeId;

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// Gaussian elimination over GF(2) on rows stored as bit vectors.
std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows) {
    std::size_t rank = 0;
    if (rows.empty()) return 0;
    const std::size_t words = rows[0].size();
    for (std::size_t bit = 0; bit < words * 64 && rank < rows.size(); ++bit) {
        const std::size_t w = bit / 64;
        const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot][w] & mask)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && (rows[r][w] & mask)) {
                for (std::size_t k = 0; k < words; ++k) rows[r][k] ^= rows[rank][k];
            }
        }
        ++rank;
    }
    return rank;
}

std::size_t edge_index(const Graph& g, NodeId a, NodeId b) {
    const Edge e = tigt::make_edge(a, b);
    const auto& edges = g.edges();
    const auto it = std::find(edges.begin(), edges.end(), e);
    return it == edges.end() ? edges.size() : static_cast<std::size_t>(it - edges.begin());
}

}  // namespace

std::size_t components(const Graph& g) {
    UnionFind uf(g.num_nodes());
    std::size_t count = g.num_nodes();
    for (const auto& e : g.edges()) {
        if (uf.unite(e.u, e.v)) --count;
    }
    return count;
}

std::size_t incidence_rank_gf2(const Graph& g) {
    const std::size_t words = (g.num_nodes() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& e : g.edges()) {
        std::vector<std::uint64_t> row(std::max<std::size_t>(words, 1), 0);
        row[e.u / 64] ^= std::uint64_t{1} << (e.u % 64);
        row[e.v / 64] ^= std::uint64_t{1} << (e.v % 64);
        rows.push_back(std::move(row));
    }
    return gf2_rank(std::move(rows));
}

std::size_t cycle_space_dimension(const Graph& g) { return g.num_edges() - incidence_rank_gf2(g); }

long cycles_rank_gf2(const Graph& g, const std::vector<std::vector<NodeId>>& cycles) {
    const std::size_t words = std::max<std::size_t>((g.num_edges() + 63) / 64, 1);
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& cycle : cycles) {
        if (cycle.size() < 3) return -1;
        std::vector<std::uint64_t> row(words, 0);
        std::vector<int> degree(g.num_nodes(), 0);
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const NodeId a = cycle[i];
            const NodeId b = cycle[(i + 1) % cycle.size()];
            const std::size_t idx = edge_index(g, a, b);
            if (idx == g.num_edges()) return -1;
            row[idx / 64] ^= std::uint64_t{1} << (idx % 64);
        }
        // Every node must touch an even number of the chosen edges.
        for (std::size_t idx = 0; idx < g.num_edges(); ++idx) {
            if (row[idx / 64] >> (idx % 64) & 1U) {
                ++degree[g.edges()[idx].u];
                ++degree[g.edges()[idx].v];
            }
        }
        if (std::any_of(degree.begin(), degree.end(), [](int d) { return d % 2 != 0; })) return -1;
        rows.push_back(std::move(row));
    }
    return static_cast<long>(gf2_rank(std::move(rows)));
}

Graph remove_vertex(const Graph& g, NodeId v) {
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) {
        if (e.u == v || e.v == v) continue;
        edges.push_back({e.u > v ? e.u - 1 : e.u, e.v > v ? e.v - 1 : e.v});
    }
    return Graph(g.num_nodes() - 1, edges);
}

Graph remove_edge(const Graph& g, Edge e) {
    std::vector<Edge> edges;
    for (const auto& x : g.edges()) {
        if (!(x == e)) edges.push_back(x);
    }
    return Graph(g.num_nodes(), edges);
}

std::vector<NodeId> articulation_vertices(const Graph& g) {
    std::vector<NodeId> out;
    const std::size_t base = components(g);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        // Removing v drops one node; an isolated v also drops one component.
        const std::size_t after = components(remove_vertex(g, v)) + (g.degree(v) == 0 ? 1 : 0);
        if (after > base) out.push_back(v);
    }
    return out;
}

std::vector<Edge> bridges(const Graph& g) {
    std::vector<Edge> out;
    const std::size_t base = components(g);
    for (const auto& e : g.edges()) {
        if (components(remove_edge(g, e)) > base) out.push_back(e);
    }
    return out;
}

std::pair<std::vector<std::pair<std::size_t, std::size_t>>, std::vector<std::pair<std::size_t, std::size_t>>>
deletion_profile(const Graph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> vertex, edge;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const Graph r = remove_vertex(g, v);
        vertex.emplace_back(components(r), cycle_space_dimension(r));
    }
    for (const auto& e : g.edges()) {
        const Graph r = remove_edge(g, e);
        edge.emplace_back(components(r), cycle_space_dimension(r));
    }
    std::sort(vertex.begin(), vertex.end());
    std::sort(edge.begin(), edge.end());
    return {vertex, edge};
}

std::map<std::size_t, std::size_t> chordless_cycles(const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::map<std::size_t, std::size_t> out;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        const int size = std::popcount(mask);
        if (size < 3) continue;
        bool ok = true;
        NodeId first = 0;
        for (NodeId v = 0; v < n && ok; ++v) {
            if (!(mask >> v & 1U)) continue;
            first = v;
            int deg = 0;
            for (NodeId w : g.neighbors(v)) deg += (mask >> w & 1U) ? 1 : 0;
            ok = deg == 2;
        }
        if (!ok) continue;
        // 2-regular induced subgraph: a single cycle iff connected.
        std::uint32_t seen = 1U << first;
        std::vector<NodeId> stack{first};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (NodeId w : g.neighbors(v)) {
                if ((mask >> w & 1U) && !(seen >> w & 1U)) {
                    seen |= 1U << w;
                    stack.push_back(w);
                }
            }
        }
        if (seen == mask) ++out[static_cast<std::size_t>(size)];
    }
    return out;
}

bool isomorphic(const Graph& g, const Graph& h) {
    if (g.num_nodes() != h.num_nodes() || g.num_edges() != h.num_edges()) return false;
    std::vector<NodeId> perm(g.num_nodes());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (const auto& e : g.edges()) {
            if (!h.has_edge(perm[e.u], perm[e.v])) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

Graph random_graph(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::vector<Edge> all;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) all.push_back({u, v});
    }
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(m, all.size()));
    return Graph(n, all);
}

std::vector<std::vector<double>> walk_power(const Graph& g, std::size_t l) {
    const std::size_t n = g.num_nodes();
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) p[i][i] = 1.0;
    for (std::size_t step = 0; step < l; ++step) {
        std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (p[i][j] == 0.0) continue;
                const double share = p[i][j] / static_cast<double>(g.degree(static_cast<NodeId>(j)));
                for (NodeId w : g.neighbors(static_cast<NodeId>(j))) next[i][w] += share;
            }
        }
        p = std::move(next);
    }
    return p;
}

double finite_difference(const std::function<double()>& f, tigt::Tensor& t, std::size_t i, double eps) {
    auto data = t.mutable_data();
    const double saved = data[i];
    data[i] = saved + eps;
    const double up = f();
    data[i] = saved - eps;
    const double down = f();
    data[i] = saved;
    return (up - down) / (2.0 * eps);
}

double relative_error(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle

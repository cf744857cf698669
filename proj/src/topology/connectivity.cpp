#include <algorithm>
#include <string>

#include "tigt/errors.hpp"
#include "tigt/topology.hpp"

namespace tigt {
namespace {

// Iterative Tarjan low-link over every DFS tree of the forest.
struct LowLink {
    std::vector<std::size_t> disc;
    std::vector<std::size_t> low;
    std::vector<NodeId> articulation;
    std::vector<Edge> bridges;
};

LowLink low_link(const Graph& g) {
    const std::size_t n = g.num_nodes();
    constexpr std::size_t kUnseen = 0;
    LowLink out;
    out.disc.assign(n, kUnseen);
    out.low.assign(n, 0);
    std::vector<char> is_cut(n, 0);
    std::size_t timer = 0;

    struct Frame {
        NodeId node;
        NodeId parent;
        bool has_parent;
        std::size_t next;  // index into neighbors(node)
        std::size_t children;
    };
    std::vector<Frame> stack;

    for (NodeId root = 0; root < n; ++root) {
        if (out.disc[root] != kUnseen) continue;
        out.disc[root] = out.low[root] = ++timer;
        stack.push_back({root, 0, false, 0, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto nb = g.neighbors(f.node);
            if (f.next < nb.size()) {
                const NodeId w = nb[f.next++];
                if (f.has_parent && w == f.parent) continue;
                if (out.disc[w] == kUnseen) {
                    out.disc[w] = out.low[w] = ++timer;
                    ++f.children;
                    stack.push_back({w, f.node, true, 0, 0});
                } else {
                    out.low[f.node] = std::min(out.low[f.node], out.disc[w]);
                }
                continue;
            }
            const Frame done = f;
            stack.pop_back();
            if (!done.has_parent) {
                if (done.children >= 2) is_cut[done.node] = 1;
                continue;
            }
            const NodeId p = done.parent;
            out.low[p] = std::min(out.low[p], out.low[done.node]);
            if (out.low[done.node] > out.disc[p]) out.bridges.push_back(make_edge(p, done.node));
            const bool parent_is_root = !stack.back().has_parent;
            if (!parent_is_root && out.low[done.node] >= out.disc[p]) is_cut[p] = 1;
        }
    }
    for (NodeId v = 0; v < n; ++v) {
        if (is_cut[v]) out.articulation.push_back(v);
    }
    std::sort(out.bridges.begin(), out.bridges.end());
    return out;
}

}  // namespace

std::vector<NodeId> articulation_vertices(const Graph& g) { return low_link(g).articulation; }

std::vector<Edge> bridges(const Graph& g) { return low_link(g).bridges; }

Graph delete_vertex(const Graph& g, NodeId v) {
    if (v >= g.num_nodes()) throw ParameterError("cannot delete missing vertex " + std::to_string(v));
    auto shift = [v](NodeId x) { return x > v ? x - 1 : x; };
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) {
        if (e.u == v || e.v == v) continue;
        edges.push_back({shift(e.u), shift(e.v)});
    }
    std::optional<Matrix> features;
    if (g.node_features()) {
        const Matrix& src = *g.node_features();
        Matrix dst(src.rows() - 1, src.cols());
        for (Eigen::Index r = 0, out = 0; r < src.rows(); ++r) {
            if (r != static_cast<Eigen::Index>(v)) dst.row(out++) = src.row(r);
        }
        features = std::move(dst);
    }
    return Graph(g.num_nodes() - 1, std::move(edges), std::move(features));
}

Graph delete_edge(const Graph& g, Edge e) {
    const Edge target = make_edge(e.u, e.v);
    std::vector<Edge> edges;
    edges.reserve(g.num_edges());
    bool found = false;
    for (const auto& x : g.edges()) {
        if (x == target) {
            found = true;
            continue;
        }
        edges.push_back(x);
    }
    if (!found) {
        throw ParameterError("cannot delete missing edge (" + std::to_string(target.u) + ", " +
                             std::to_string(target.v) + ")");
    }
    return Graph(g.num_nodes(), std::move(edges), g.node_features());
}

}  // namespace tigt

#include <random>
#include <set>
#include <string>

#include "tigt/errors.hpp"
#include "tigt/graph.hpp"

namespace tigt {

Graph generate_csl(std::size_t num_nodes, std::size_t skip) {
    if (skip < 2 || 2 * skip >= num_nodes) {
        throw ParameterError("skip " + std::to_string(skip) + " outside [2, " +
                             std::to_string(num_nodes) + "/2) for CSL(" + std::to_string(num_nodes) + ")");
    }
    std::vector<Edge> edges;
    edges.reserve(2 * num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        const auto u = static_cast<NodeId>(i);
        edges.push_back(make_edge(u, static_cast<NodeId>((i + 1) % num_nodes)));
        edges.push_back(make_edge(u, static_cast<NodeId>((i + skip) % num_nodes)));
    }
    return Graph(num_nodes, std::move(edges));
}

Graph generate_rook_4x4() {
    std::vector<Edge> edges;
    for (NodeId a = 0; a < 16; ++a) {
        for (NodeId b = a + 1; b < 16; ++b) {
            if (a / 4 == b / 4 || a % 4 == b % 4) edges.push_back({a, b});
        }
    }
    return Graph(16, std::move(edges));
}

Graph generate_shrikhande() {
    static constexpr int kSteps[3][2] = {{1, 0}, {0, 1}, {1, 1}};
    std::set<Edge> edges;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const auto u = static_cast<NodeId>(4 * i + j);
            for (const auto& step : kSteps) {
                const auto v = static_cast<NodeId>(4 * ((i + step[0]) % 4) + (j + step[1]) % 4);
                edges.insert(make_edge(u, v));
            }
        }
    }
    return Graph(16, {edges.begin(), edges.end()});
}

Graph empty_graph(std::size_t n) { return Graph(n); }

Graph path_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
    }
    return Graph(n, std::move(edges));
}

Graph cycle_graph(std::size_t n) {
    if (n < 3) throw ParameterError("cycle needs at least 3 nodes");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.push_back(make_edge(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)));
    }
    return Graph(n, std::move(edges));
}

Graph complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) edges.push_back({a, b});
    }
    return Graph(n, std::move(edges));
}

Graph star_graph(std::size_t leaves) {
    std::vector<Edge> edges;
    for (NodeId v = 1; v <= leaves; ++v) edges.push_back({0, v});
    return Graph(leaves + 1, std::move(edges));
}

Graph bowtie_graph() { return Graph(5, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}}); }

Graph cycle5_with_chord() { return Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 2}}); }

Graph gnp_random_graph(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            // 53-bit uniform in [0, 1) straight from the engine.
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            if (u < p) edges.push_back({a, b});
        }
    }
    return Graph(n, std::move(edges));
}

Matrix constant_features(std::size_t num_nodes, double value) {
    return Matrix::Constant(static_cast<Eigen::Index>(num_nodes), 1, value);
}

std::vector<LabeledGraph> generate_csl_dataset(std::size_t num_nodes,
                                               std::span<const std::size_t> skips,
                                               std::size_t copies_per_class,
                                               std::uint64_t seed) {
    std::set<std::size_t> distinct(skips.begin(), skips.end());
    if (distinct.size() != skips.size()) throw ParameterError("CSL skips must be distinct");

    std::mt19937_64 seeder(seed);
    std::vector<LabeledGraph> out;
    out.reserve(skips.size() * copies_per_class);
    for (std::size_t label = 0; label < skips.size(); ++label) {
        const Graph representative = generate_csl(num_nodes, skips[label])
                                         .with_features(constant_features(num_nodes));
        for (std::size_t c = 0; c < copies_per_class; ++c) {
            auto perm = random_permutation(num_nodes, seeder());
            Graph copy = permute(representative, perm);
            out.push_back({std::move(copy), static_cast<int>(label), skips[label], std::move(perm)});
        }
    }
    return out;
}

}  // namespace tigt

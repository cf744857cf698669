#include <algorithm>
#include <map>
#include <string>

#include "tigt/errors.hpp"
#include "tigt/expressiveness.hpp"
#include "tigt/topology.hpp"

namespace tigt {
namespace {

using Signature = std::vector<std::uint32_t>;
// relations[r][v] lists the r-neighbours of node v.
using Relations = std::vector<std::vector<std::vector<NodeId>>>;

// Replaces every signature by its rank among the distinct sorted signatures.
std::vector<std::uint32_t> rank_signatures(const std::vector<Signature>& sigs, std::size_t& classes) {
    std::vector<const Signature*> order;
    order.reserve(sigs.size());
    for (const auto& s : sigs) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const Signature* a, const Signature* b) { return *a < *b; });
    std::map<const Signature*, std::uint32_t> rank;
    std::uint32_t next = 0;
    const Signature* prev = nullptr;
    for (const Signature* s : order) {
        if (prev != nullptr && *prev != *s) ++next;
        rank[s] = next;
        prev = s;
    }
    classes = order.empty() ? 0 : next + 1;
    std::vector<std::uint32_t> out(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) out[i] = rank[&sigs[i]];
    return out;
}

std::size_t count_classes(const std::vector<std::uint32_t>& colors) {
    std::vector<std::uint32_t> sorted = colors;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Colour refinement over several neighbour relations at once.
std::vector<std::uint32_t> refine(const Relations& relations, std::vector<std::uint32_t> colors,
                                  std::size_t& rounds) {
    const std::size_t n = colors.size();
    std::size_t classes = 0;
    {
        // Normalise caller-supplied ids to dense ranks first.
        std::vector<Signature> sigs(n);
        for (std::size_t v = 0; v < n; ++v) sigs[v] = {colors[v]};
        colors = rank_signatures(sigs, classes);
    }
    rounds = 0;
    std::vector<Signature> sigs(n);
    std::vector<std::uint32_t> bucket;
    while (true) {
        for (std::size_t v = 0; v < n; ++v) {
            Signature& s = sigs[v];
            s.clear();
            s.push_back(colors[v]);
            for (const auto& rel : relations) {
                bucket.clear();
                for (NodeId w : rel[v]) bucket.push_back(colors[w]);
                std::sort(bucket.begin(), bucket.end());
                s.push_back(static_cast<std::uint32_t>(bucket.size()));
                s.insert(s.end(), bucket.begin(), bucket.end());
            }
        }
        std::size_t next_classes = 0;
        auto next = rank_signatures(sigs, next_classes);
        if (next_classes == classes) return colors;
        colors = std::move(next);
        classes = next_classes;
        ++rounds;
    }
}

std::vector<std::vector<NodeId>> neighbour_lists(const Graph& g) {
    std::vector<std::vector<NodeId>> out(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        auto nb = g.neighbors(v);
        out[v].assign(nb.begin(), nb.end());
    }
    return out;
}

ColorRefinement finish(std::vector<std::uint32_t> colors, std::size_t rounds) {
    ColorRefinement out;
    out.rounds_to_stabilize = rounds;
    for (auto c : colors) ++out.stable_histogram[c];
    out.colors = std::move(colors);
    return out;
}

std::map<std::uint32_t, std::size_t> histogram(std::span<const std::uint32_t> colors) {
    std::map<std::uint32_t, std::size_t> h;
    for (auto c : colors) ++h[c];
    return h;
}

bool union_histograms_differ(const std::vector<std::uint32_t>& colors, std::size_t split) {
    const std::span<const std::uint32_t> all(colors);
    return histogram(all.subspan(0, split)) != histogram(all.subspan(split));
}

}  // namespace

ColorRefinement wl1_refine(const Graph& g, std::optional<std::span<const std::uint32_t>> initial_colors) {
    std::vector<std::uint32_t> colors(g.num_nodes(), 0);
    if (initial_colors) {
        if (initial_colors->size() != g.num_nodes()) {
            throw ParameterError("initial colouring has " + std::to_string(initial_colors->size()) +
                                 " entries for " + std::to_string(g.num_nodes()) + " nodes");
        }
        colors.assign(initial_colors->begin(), initial_colors->end());
    }
    std::size_t rounds = 0;
    auto stable = refine({neighbour_lists(g)}, std::move(colors), rounds);
    return finish(std::move(stable), rounds);
}

ColorRefinement wl1_with_clique_augmentation(const Graph& g) {
    const Graph clique = clique_adjacency(g).as_graph();
    std::size_t rounds = 0;
    auto stable = refine({neighbour_lists(g), neighbour_lists(clique)},
                         std::vector<std::uint32_t>(g.num_nodes(), 0), rounds);
    return finish(std::move(stable), rounds);
}

bool wl1_distinguishes(const Graph& g, const Graph& h) {
    const Graph both = disjoint_union(g, h);
    std::size_t rounds = 0;
    auto colors = refine({neighbour_lists(both)}, std::vector<std::uint32_t>(both.num_nodes(), 0), rounds);
    return union_histograms_differ(colors, g.num_nodes());
}

bool wl1_augmented_distinguishes(const Graph& g, const Graph& h) {
    const Graph both = disjoint_union(g, h);
    // Each graph keeps its own clique adjacency; the union only shares the palette.
    const Graph cliques = disjoint_union(clique_adjacency(g).as_graph(), clique_adjacency(h).as_graph());
    std::size_t rounds = 0;
    auto colors = refine({neighbour_lists(both), neighbour_lists(cliques)},
                         std::vector<std::uint32_t>(both.num_nodes(), 0), rounds);
    return union_histograms_differ(colors, g.num_nodes());
}

bool wl3_distinguishes(const Graph& g, const Graph& h) {
    for (const Graph* x : {&g, &h}) {
        if (x->num_nodes() > kWl3MaxNodes) {
            throw CapabilityError("3-WL oracle is limited to " + std::to_string(kWl3MaxNodes) +
                                  " nodes, got " + std::to_string(x->num_nodes()));
        }
    }
    if (g.num_nodes() != h.num_nodes()) return true;
    const std::size_t n = g.num_nodes();
    const std::size_t pairs = n * n;

    // Pair colours of both graphs live in one array: g's pairs first.
    std::vector<std::uint32_t> colors(2 * pairs);
    const Graph* graphs[2] = {&g, &h};
    for (std::size_t gi = 0; gi < 2; ++gi) {
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = 0; v < n; ++v) {
                colors[gi * pairs + u * n + v] = u == v ? 0U : (graphs[gi]->has_edge(u, v) ? 1U : 2U);
            }
        }
    }
    std::size_t classes = count_classes(colors);
    std::vector<Signature> sigs(2 * pairs);
    std::vector<std::uint64_t> bucket(n);
    while (true) {
        for (std::size_t gi = 0; gi < 2; ++gi) {
            const std::uint32_t* c = colors.data() + gi * pairs;
            for (std::size_t u = 0; u < n; ++u) {
                for (std::size_t v = 0; v < n; ++v) {
                    for (std::size_t w = 0; w < n; ++w) {
                        bucket[w] = (static_cast<std::uint64_t>(c[u * n + w]) << 32) | c[w * n + v];
                    }
                    std::sort(bucket.begin(), bucket.end());
                    Signature& s = sigs[gi * pairs + u * n + v];
                    s.clear();
                    s.push_back(c[u * n + v]);
                    for (auto b : bucket) {
                        s.push_back(static_cast<std::uint32_t>(b >> 32));
                        s.push_back(static_cast<std::uint32_t>(b & 0xffffffffU));
                    }
                }
            }
        }
        std::size_t next_classes = 0;
        auto next = rank_signatures(sigs, next_classes);
        colors = std::move(next);
        if (next_classes == classes) break;
        classes = next_classes;
    }
    return union_histograms_differ(colors, pairs);
}

}  // namespace tigt

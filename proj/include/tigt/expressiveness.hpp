#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tigt/graph.hpp"

namespace tigt {

// ---------------------------------------------------------------------------
// Colour refinement
// ---------------------------------------------------------------------------

// Result of iterating colour <- (colour, multiset of neighbour colours) until
// the partition stops splitting. Colour ids are dense ranks of the sorted
// signatures, so they depend only on the isomorphism type of the input.
struct ColorRefinement {
    std::vector<std::uint32_t> colors;
    std::size_t rounds_to_stabilize = 0;
    std::map<std::uint32_t, std::size_t> stable_histogram;
};

ColorRefinement wl1_refine(const Graph& g,
                           std::optional<std::span<const std::uint32_t>> initial_colors = std::nullopt);

// Refinement over the pair (A-neighbours, A_C-neighbours), each relation
// hashed separately into the signature. A_C comes from cycle_basis(g).
ColorRefinement wl1_with_clique_augmentation(const Graph& g);

// Joint refinement of the disjoint union; true iff the per-graph stable
// histograms differ.
bool wl1_distinguishes(const Graph& g, const Graph& h);
bool wl1_augmented_distinguishes(const Graph& g, const Graph& h);

inline constexpr std::size_t kWl3MaxNodes = 20;

// 2-dimensional folklore WL on ordered node pairs, equivalent in power to
// 3-WL: c(u,v) <- (c(u,v), {{ (c(u,w), c(w,v)) : w }}). Throws
// CapabilityError when either graph exceeds kWl3MaxNodes nodes.
bool wl3_distinguishes(const Graph& g, const Graph& h);

// ---------------------------------------------------------------------------
// Cycle and deletion verdicts
// ---------------------------------------------------------------------------

// Chordless (induced) cycles by length, up to `max_len` nodes (default: all).
// Each cycle is counted once regardless of rotation or direction.
std::map<std::size_t, std::size_t> chordless_cycle_profile(
    const Graph& g, std::optional<std::size_t> max_len = std::nullopt);

struct CycleVerdict {
    bool distinguished = false;
    std::string witness;
    std::optional<std::size_t> witness_length;
    // Chordless profiles up to `examined_up_to` nodes.
    std::map<std::size_t, std::size_t> chordless_g;
    std::map<std::size_t, std::size_t> chordless_h;
    std::size_t examined_up_to = 0;
    std::map<std::size_t, std::size_t> basis_histogram_g;
    std::map<std::size_t, std::size_t> basis_histogram_h;
};

// Looks for a length l such that one graph has a chordless l-cycle (a
// basis-representable cycle without proper cyclic subgraphs) and the other
// has none. Requires equal node and edge counts (HypothesisError otherwise).
CycleVerdict distinguish_by_cycles(const Graph& g, const Graph& h);

// (components, cycle-basis size) of every single-vertex and single-edge
// deletion, sorted.
struct DeletionProfile {
    std::vector<std::pair<std::size_t, std::size_t>> vertex;
    std::vector<std::pair<std::size_t, std::size_t>> edge;

    friend bool operator==(const DeletionProfile&, const DeletionProfile&) = default;
};

DeletionProfile deletion_profile(const Graph& g);

struct BiconnectivityVerdict {
    bool distinguished = false;
    std::string witness;
    DeletionProfile profile_g;
    DeletionProfile profile_h;
};

// Requires equal node, edge and component counts (HypothesisError otherwise).
BiconnectivityVerdict distinguish_by_biconnectivity(const Graph& g, const Graph& h);

// ---------------------------------------------------------------------------
// Random walks
// ---------------------------------------------------------------------------

// Powers I, M, ..., M^(K-1) of the walk matrix M = D^-1 A.
struct RrwpEncoding {
    std::size_t steps = 0;
    std::vector<Matrix> slices;

    double at(std::size_t i, std::size_t j, std::size_t l) const {
        return slices[l](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

// Throws PreconditionError for K == 0 or a node of degree zero.
RrwpEncoding rrwp(const Graph& g, std::size_t steps);

struct StationaryDistribution {
    Eigen::VectorXd pi;
};

// pi_j = deg(j) / (2|E|). Throws PreconditionError for an edgeless graph.
StationaryDistribution stationary(const Graph& g);

struct ConvergenceReport {
    // deviations[l] = max_{i,j} |M^l(i,j) - pi_j| for l = 0..K-1.
    std::vector<double> deviations;
    // exp(slope) of a least-squares line through log deviation over the
    // steps where deviation > 1e-12.
    double fitted_rate = 0.0;
    // Smallest C with deviations[l] <= C * fitted_rate^l on the fitted steps.
    double envelope_constant = 0.0;
    bool geometric_decay = false;
};

// Requires a connected non-bipartite graph (PreconditionError otherwise).
ConvergenceReport rrwp_convergence_report(const Graph& g, std::size_t steps);

}  // namespace tigt

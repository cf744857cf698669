#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tigt/graph.hpp"
#include "tigt/tensor.hpp"
#include "tigt/topology.hpp"

namespace tigt {

enum class Activation { Tanh, Relu };
enum class PathMode { Dual, Single };
enum class Pooling { Sum, Mean };

struct TigtConfig {
    std::size_t feature_dim = 1;
    std::size_t hidden_dim = 64;  // k
    std::size_t num_layers = 2;   // L
    std::size_t num_heads = 4;
    std::size_t pe_mpnn_layers = 1;
    bool use_pe = true;
    bool pe_share_weights = true;
    Activation pe_activation = Activation::Tanh;
    PathMode dual_path = PathMode::Dual;
    bool use_global_attention = true;
    bool use_graph_info = true;
    std::size_t reduction_factor = 4;  // N
    Pooling readout = Pooling::Sum;     // graph information layer
    Pooling graph_pool = Pooling::Sum;  // before the prediction head
    double attention_dropout = 0.0;
    std::size_t num_classes = 10;
    NormAxis norm = NormAxis::Row;
    double norm_eps = 1e-5;

    // Throws ConfigError when k % heads != 0, k % N != 0, L == 0, ...
    void validate() const;
};

// Key/value form used by config files and checkpoints.
std::map<std::string, std::string> to_key_values(const TigtConfig& config);
// Applies recognised keys on top of `base`; unknown keys throw ConfigError.
TigtConfig tigt_config_from(const std::map<std::string, std::string>& values, TigtConfig base = {});

// One graph prepared for the network.
struct GraphSample {
    Tensor x;       // n x feature_dim
    Tensor adj;     // n x n
    Tensor clique;  // n x n
    int label = 0;

    std::size_t num_nodes() const { return x.dim(0); }
};

// Uses the graph's node features, or a constant column when it has none.
// A_C is computed from cycle_basis(g) unless supplied.
GraphSample make_sample(const Graph& g, int label, const std::optional<CliqueAdjacency>& clique = std::nullopt);

// Applies a node relabelling (node v -> permutation[v]) to X, A and A_C.
GraphSample permute_sample(const GraphSample& s, std::span<const NodeId> permutation);

struct GraphBatch {
    std::vector<GraphSample> graphs;
};

struct Linear {
    Tensor weight;  // in x out
    Tensor bias;    // out
};

Tensor apply(const Linear& lin, const Tensor& x);

struct GinParams {
    Tensor eps;  // scalar, starts at 0
    Linear lin1;
    Linear lin2;
};

// MLP((1 + eps) h_v + sum_{u in N(v)} h_u) with a two-layer ReLU MLP.
Tensor gin_layer(const Tensor& x, const Tensor& adj, const GinParams& p);

struct PeParams {
    std::vector<GinParams> mpnn_a;
    std::vector<GinParams> mpnn_c;  // empty when weights are shared
    Tensor theta;                   // k x 2
};

struct AttentionParams {
    Linear q, k, v, out;
};

struct EncoderParams {
    GinParams gin_a;
    std::optional<GinParams> gin_c;
    std::optional<AttentionParams> attention;
    Tensor norm1_gain, norm1_bias;
    std::optional<Linear> squeeze;
    std::optional<Linear> excite;
    Linear mlp1, mlp2;
    Tensor norm2_gain, norm2_bias;
};

// Training-time state threaded through a forward pass.
struct ForwardContext {
    bool training = false;
    std::mt19937_64* rng = nullptr;  // required when training with dropout
};

class TigtModel {
public:
    // Glorot-uniform weights, zero biases, GIN eps 0, theta_pe ~ U(-0.1, 0.1).
    TigtModel(TigtConfig config, std::uint64_t seed);

    const TigtConfig& config() const { return config_; }

    // Logits, one row per graph.
    Tensor forward(const GraphBatch& batch, const ForwardContext& ctx = {}) const;
    Tensor forward_graph(const GraphSample& g, const ForwardContext& ctx = {}) const;

    Tensor embed(const GraphSample& g) const;
    Tensor topo_positional_embedding(const Tensor& x, const Tensor& adj, const Tensor& clique) const;
    Tensor encoder_layer(std::size_t layer, const Tensor& x, const Tensor& adj, const Tensor& clique,
                         const ForwardContext& ctx = {}) const;

    // Every trainable tensor with a stable dotted name.
    const std::vector<std::pair<std::string, Tensor>>& named_parameters() const { return named_; }
    std::size_t parameter_count() const;

    // Checkpoint: {"config": {...}, "parameters": [{"name", "shape", "data"}]}.
    void save(const std::filesystem::path& path) const;
    static TigtModel load(const std::filesystem::path& path);

    // Copies values (not tensors) from another model with the same layout.
    void copy_values_from(const TigtModel& other);

private:
    Tensor multi_head_attention(const AttentionParams& p, const Tensor& x, const ForwardContext& ctx) const;
    void register_parameters();

    TigtConfig config_;
    Linear embedding_;
    std::optional<PeParams> pe_;
    std::vector<EncoderParams> layers_;
    Linear head_;
    std::vector<std::pair<std::string, Tensor>> named_;
};

// Exact number of trainable scalars for `config`.
std::size_t count_parameters(const TigtConfig& config);

}  // namespace tigt

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tigt/errors.hpp"
#include "tigt/model.hpp"

namespace tigt {
namespace {

Tensor glorot(std::size_t in, std::size_t out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<double> w(in * out);
    for (double& v : w) v = dist(rng);
    return Tensor::parameter({in, out}, std::move(w));
}

Linear make_linear(std::size_t in, std::size_t out, std::mt19937_64& rng) {
    Linear lin{glorot(in, out, rng), Tensor::parameter({out}, std::vector<double>(out, 0.0))};
    return lin;
}

GinParams make_gin(std::size_t k, std::mt19937_64& rng) {
    GinParams p;
    p.eps = Tensor::parameter({1}, {0.0});
    p.lin1 = make_linear(k, k, rng);
    p.lin2 = make_linear(k, k, rng);
    return p;
}

Tensor ones(std::size_t k) { return Tensor::parameter({k}, std::vector<double>(k, 1.0)); }
Tensor zeros(std::size_t k) { return Tensor::parameter({k}, std::vector<double>(k, 0.0)); }

Tensor pool(const Tensor& x, Pooling mode) { return mode == Pooling::Sum ? sum(x, 0) : mean(x, 0); }

Tensor activate(const Tensor& x, Activation a) { return a == Activation::Tanh ? tanh(x) : relu(x); }

Tensor matrix_tensor(const Matrix& m) {
    const auto r = static_cast<std::size_t>(m.rows());
    const auto c = static_cast<std::size_t>(m.cols());
    std::vector<double> data(r * c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            data[i * c + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return Tensor({r, c}, std::move(data));
}

void add_linear(std::vector<std::pair<std::string, Tensor>>& out, const std::string& name, const Linear& lin) {
    out.emplace_back(name + ".weight", lin.weight);
    out.emplace_back(name + ".bias", lin.bias);
}

void add_gin(std::vector<std::pair<std::string, Tensor>>& out, const std::string& name, const GinParams& p) {
    out.emplace_back(name + ".eps", p.eps);
    add_linear(out, name + ".lin1", p.lin1);
    add_linear(out, name + ".lin2", p.lin2);
}

}  // namespace

Tensor apply(const Linear& lin, const Tensor& x) { return add(matmul(x, lin.weight), lin.bias); }

Tensor gin_layer(const Tensor& x, const Tensor& adj, const GinParams& p) {
    if (adj.rank() != 2 || x.rank() != 2 || adj.dim(0) != adj.dim(1) || adj.dim(1) != x.dim(0)) {
        throw ShapeError("gin_layer: adjacency " + shape_str(adj.shape()) + " does not fit features " +
                         shape_str(x.shape()));
    }
    const Tensor combined = add(add(x, mul(p.eps, x)), matmul(adj, x));
    return apply(p.lin2, relu(apply(p.lin1, combined)));
}

GraphSample make_sample(const Graph& g, int label, const std::optional<CliqueAdjacency>& clique) {
    GraphSample s;
    s.x = matrix_tensor(g.node_features() ? *g.node_features() : constant_features(g.num_nodes()));
    s.adj = matrix_tensor(adjacency_matrix(g));
    s.clique = matrix_tensor(clique ? clique->matrix : clique_adjacency(g).matrix);
    s.label = label;
    return s;
}

GraphSample permute_sample(const GraphSample& s, std::span<const NodeId> perm) {
    const std::size_t n = s.num_nodes();
    if (perm.size() != n) throw ParameterError("permutation size does not match the graph");
    auto move_rows = [&](const Tensor& t) {
        const std::size_t c = t.dim(1);
        std::vector<double> out(t.numel());
        for (std::size_t v = 0; v < n; ++v) {
            std::copy_n(&t.data()[v * c], c, &out[perm[v] * c]);
        }
        return Tensor(t.shape(), std::move(out));
    };
    auto move_both = [&](const Tensor& t) {
        std::vector<double> out(t.numel());
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) out[perm[u] * n + perm[v]] = t.data()[u * n + v];
        }
        return Tensor(t.shape(), std::move(out));
    };
    return {move_rows(s.x), move_both(s.adj), move_both(s.clique), s.label};
}

TigtModel::TigtModel(TigtConfig config, std::uint64_t seed) : config_(std::move(config)) {
    config_.validate();
    std::mt19937_64 rng(seed);
    const std::size_t k = config_.hidden_dim;
    embedding_ = make_linear(config_.feature_dim, k, rng);
    if (config_.use_pe) {
        PeParams pe;
        for (std::size_t i = 0; i < config_.pe_mpnn_layers; ++i) pe.mpnn_a.push_back(make_gin(k, rng));
        if (!config_.pe_share_weights) {
            for (std::size_t i = 0; i < config_.pe_mpnn_layers; ++i) pe.mpnn_c.push_back(make_gin(k, rng));
        }
        std::uniform_real_distribution<double> small(-0.1, 0.1);
        std::vector<double> theta(2 * k);
        for (double& v : theta) v = small(rng);
        pe.theta = Tensor::parameter({k, 2}, std::move(theta));
        pe_ = std::move(pe);
    }
    for (std::size_t l = 0; l < config_.num_layers; ++l) {
        EncoderParams p;
        p.gin_a = make_gin(k, rng);
        if (config_.dual_path == PathMode::Dual) p.gin_c = make_gin(k, rng);
        if (config_.use_global_attention) {
            p.attention = AttentionParams{make_linear(k, k, rng), make_linear(k, k, rng), make_linear(k, k, rng),
                                          make_linear(k, k, rng)};
        }
        p.norm1_gain = ones(k);
        p.norm1_bias = zeros(k);
        if (config_.use_graph_info) {
            p.squeeze = make_linear(k, k / config_.reduction_factor, rng);
            p.excite = make_linear(k / config_.reduction_factor, k, rng);
        }
        p.mlp1 = make_linear(k, 2 * k, rng);
        p.mlp2 = make_linear(2 * k, k, rng);
        p.norm2_gain = ones(k);
        p.norm2_bias = zeros(k);
        layers_.push_back(std::move(p));
    }
    head_ = make_linear(k, config_.num_classes, rng);
    register_parameters();
}

void TigtModel::register_parameters() {
    named_.clear();
    add_linear(named_, "embedding", embedding_);
    if (pe_) {
        for (std::size_t i = 0; i < pe_->mpnn_a.size(); ++i) add_gin(named_, "pe.mpnn_a." + std::to_string(i), pe_->mpnn_a[i]);
        for (std::size_t i = 0; i < pe_->mpnn_c.size(); ++i) add_gin(named_, "pe.mpnn_c." + std::to_string(i), pe_->mpnn_c[i]);
        named_.emplace_back("pe.theta", pe_->theta);
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const std::string base = "layers." + std::to_string(l);
        const EncoderParams& p = layers_[l];
        add_gin(named_, base + ".gin_a", p.gin_a);
        if (p.gin_c) add_gin(named_, base + ".gin_c", *p.gin_c);
        if (p.attention) {
            add_linear(named_, base + ".attention.q", p.attention->q);
            add_linear(named_, base + ".attention.k", p.attention->k);
            add_linear(named_, base + ".attention.v", p.attention->v);
            add_linear(named_, base + ".attention.out", p.attention->out);
        }
        named_.emplace_back(base + ".norm1.gain", p.norm1_gain);
        named_.emplace_back(base + ".norm1.bias", p.norm1_bias);
        if (p.squeeze) add_linear(named_, base + ".squeeze", *p.squeeze);
        if (p.excite) add_linear(named_, base + ".excite", *p.excite);
        add_linear(named_, base + ".mlp1", p.mlp1);
        add_linear(named_, base + ".mlp2", p.mlp2);
        named_.emplace_back(base + ".norm2.gain", p.norm2_gain);
        named_.emplace_back(base + ".norm2.bias", p.norm2_bias);
    }
    add_linear(named_, "head", head_);
}

std::size_t TigtModel::parameter_count() const {
    std::size_t total = 0;
    for (const auto& [name, t] : named_) total += t.numel();
    return total;
}

Tensor TigtModel::embed(const GraphSample& g) const {
    if (g.x.rank() != 2 || g.x.dim(1) != config_.feature_dim) {
        throw ShapeError("node features " + shape_str(g.x.shape()) + " do not match feature_dim " +
                         std::to_string(config_.feature_dim));
    }
    return apply(embedding_, g.x);
}

Tensor TigtModel::topo_positional_embedding(const Tensor& x, const Tensor& adj, const Tensor& clique) const {
    if (!pe_) return x;
    const auto& stack_c = pe_->mpnn_c.empty() ? pe_->mpnn_a : pe_->mpnn_c;
    Tensor h_a = x;
    Tensor h_c = x;
    for (const auto& p : pe_->mpnn_a) h_a = gin_layer(h_a, adj, p);
    for (const auto& p : stack_c) h_c = gin_layer(h_c, clique, p);
    const Tensor parts[] = {h_a, h_c};
    const Tensor h = stack(parts, 2);  // n x k x 2
    return add(x, sum(activate(mul(h, pe_->theta), config_.pe_activation), 2));
}

Tensor TigtModel::multi_head_attention(const AttentionParams& p, const Tensor& x, const ForwardContext& ctx) const {
    const std::size_t k = config_.hidden_dim;
    const std::size_t d = k / config_.num_heads;
    const Tensor q = apply(p.q, x);
    const Tensor kk = apply(p.k, x);
    const Tensor v = apply(p.v, x);
    const double factor = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Tensor> heads;
    heads.reserve(config_.num_heads);
    for (std::size_t h = 0; h < config_.num_heads; ++h) {
        const Tensor qh = slice_last(q, h * d, (h + 1) * d);
        const Tensor kh = slice_last(kk, h * d, (h + 1) * d);
        const Tensor vh = slice_last(v, h * d, (h + 1) * d);
        Tensor weights = softmax(scale(matmul(qh, transpose(kh)), factor));
        if (ctx.training && config_.attention_dropout > 0.0) {
            if (ctx.rng == nullptr) throw ParameterError("training forward pass with dropout needs an rng");
            weights = dropout(weights, config_.attention_dropout, *ctx.rng);
        }
        heads.push_back(matmul(weights, vh));
    }
    return apply(p.out, concat(heads, 1));
}

Tensor TigtModel::encoder_layer(std::size_t layer, const Tensor& x, const Tensor& adj, const Tensor& clique,
                                const ForwardContext& ctx) const {
    const EncoderParams& p = layers_.at(layer);
    const double eps = config_.norm_eps;
    Tensor streams = gin_layer(x, adj, p.gin_a);
    if (p.gin_c) streams = add(streams, gin_layer(x, clique, *p.gin_c));
    if (p.attention) streams = add(streams, multi_head_attention(*p.attention, x, ctx));
    const Tensor mixed = feature_norm(add(streams, x), p.norm1_gain, p.norm1_bias, eps, config_.norm);

    Tensor gated = mixed;
    if (p.squeeze) {
        const std::size_t k = config_.hidden_dim;
        const Tensor y0 = reshape(pool(mixed, config_.readout), {1, k});
        const Tensor y1 = relu(apply(*p.squeeze, y0));
        const Tensor y2 = sigmoid(apply(*p.excite, y1));
        gated = mul(mixed, reshape(y2, {k}));
    }
    const Tensor mlp = apply(p.mlp2, relu(apply(p.mlp1, gated)));
    return feature_norm(add(gated, mlp), p.norm2_gain, p.norm2_bias, eps, config_.norm);
}

Tensor TigtModel::forward_graph(const GraphSample& g, const ForwardContext& ctx) const {
    const std::size_t n = g.num_nodes();
    for (const Tensor* m : {&g.adj, &g.clique}) {
        if (m->rank() != 2 || m->dim(0) != n || m->dim(1) != n) {
            throw ShapeError("adjacency " + shape_str(m->shape()) + " does not match " + std::to_string(n) + " nodes");
        }
    }
    Tensor x = topo_positional_embedding(embed(g), g.adj, g.clique);
    for (std::size_t l = 0; l < layers_.size(); ++l) x = encoder_layer(l, x, g.adj, g.clique, ctx);
    const Tensor pooled = reshape(pool(x, config_.graph_pool), {1, config_.hidden_dim});
    return apply(head_, pooled);
}

Tensor TigtModel::forward(const GraphBatch& batch, const ForwardContext& ctx) const {
    if (batch.graphs.empty()) throw ShapeError("forward on an empty batch");
    std::vector<Tensor> rows;
    rows.reserve(batch.graphs.size());
    for (const auto& g : batch.graphs) rows.push_back(forward_graph(g, ctx));
    return concat(rows, 0);
}

void TigtModel::copy_values_from(const TigtModel& other) {
    if (other.named_.size() != named_.size()) throw ParameterError("model layouts differ");
    for (std::size_t i = 0; i < named_.size(); ++i) {
        auto& [name, t] = named_[i];
        const auto& [oname, o] = other.named_[i];
        if (name != oname || t.shape() != o.shape()) throw ParameterError("model layouts differ at " + name);
        std::copy(o.data().begin(), o.data().end(), t.mutable_data().begin());
    }
}

void TigtModel::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = to_key_values(config_);
    auto& params = j["parameters"] = nlohmann::json::array();
    for (const auto& [name, t] : named_) {
        params.push_back({{"name", name},
                          {"shape", t.shape()},
                          {"data", std::vector<double>(t.data().begin(), t.data().end())}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << j.dump();
    if (!out) throw IoError("failed writing checkpoint " + path.string());
}

TigtModel TigtModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
    }
    TigtModel model(tigt_config_from(j.at("config").get<std::map<std::string, std::string>>()), 0);
    const auto& params = j.at("parameters");
    if (params.size() != model.named_.size()) {
        throw ParameterError("checkpoint has " + std::to_string(params.size()) + " tensors, model expects " +
                             std::to_string(model.named_.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& [name, t] = model.named_[i];
        const auto& p = params[i];
        if (p.at("name").get<std::string>() != name || p.at("shape").get<Shape>() != t.shape()) {
            throw ParameterError("checkpoint tensor " + std::to_string(i) + " does not match " + name);
        }
        const auto data = p.at("data").get<std::vector<double>>();
        if (data.size() != t.numel()) throw ParameterError("checkpoint tensor " + name + " has wrong length");
        std::copy(data.begin(), data.end(), t.mutable_data().begin());
    }
    return model;
}

}  // namespace tigt

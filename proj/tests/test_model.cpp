#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "support/oracles.hpp"
#include "tigt/errors.hpp"
#include "tigt/model.hpp"
#include "tigt/topology.hpp"

using namespace tigt;

namespace {

Eigen::MatrixXd as_matrix(const Tensor& t) {
    Eigen::MatrixXd m(t.dim(0), t.dim(1));
    for (std::size_t i = 0; i < t.dim(0); ++i) {
        for (std::size_t j = 0; j < t.dim(1); ++j) m(i, j) = t.at(i, j);
    }
    return m;
}

Tensor random_features(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n * k);
    for (double& x : v) x = dist(rng);
    return Tensor({n, k}, std::move(v));
}

TigtConfig small_config() {
    TigtConfig c;
    c.hidden_dim = 8;
    c.num_heads = 2;
    c.reduction_factor = 4;
    c.num_layers = 2;
    return c;
}

// Independent count from the layer inventory.
std::size_t expected_parameters(const TigtConfig& c) {
    const std::size_t k = c.hidden_dim;
    const std::size_t lin = k * k + k;
    const std::size_t gin = 1 + 2 * lin;
    std::size_t total = c.feature_dim * k + k;
    if (c.use_pe) total += c.pe_mpnn_layers * gin * (c.pe_share_weights ? 1 : 2) + 2 * k;
    std::size_t layer = gin + 2 * k + (k * 2 * k + 2 * k) + (2 * k * k + k) + 2 * k;
    if (c.dual_path == PathMode::Dual) layer += gin;
    if (c.use_global_attention) layer += 4 * lin;
    if (c.use_graph_info) {
        const std::size_t r = k / c.reduction_factor;
        layer += k * r + r + r * k + k;
    }
    return total + c.num_layers * layer + k * c.num_classes + c.num_classes;
}

GraphSample random_sample(std::mt19937_64& rng) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 12)(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(n, n * (n - 1) / 2)(rng);
    return make_sample(oracle::random_graph(n, m, rng), 0);
}

}  // namespace

TEST(GinLayer, MatchesDenseFormula) {
    std::mt19937_64 rng(3);
    TigtModel model(small_config(), 1);
    const auto& named = model.named_parameters();
    auto find = [&](const std::string& name) {
        for (const auto& [n, t] : named) {
            if (n == name) return t;
        }
        throw std::runtime_error("missing " + name);
    };
    GinParams p{find("layers.0.gin_a.eps"),
                {find("layers.0.gin_a.lin1.weight"), find("layers.0.gin_a.lin1.bias")},
                {find("layers.0.gin_a.lin2.weight"), find("layers.0.gin_a.lin2.bias")}};
    p.eps.mutable_data()[0] = 0.3;
    p.lin1.bias.mutable_data()[2] = 0.5;
    const Graph g = generate_csl(11, 3);
    const Tensor x = random_features(11, 8, rng);
    const Tensor adj = make_sample(g, 0).adj;
    const Eigen::MatrixXd a = adjacency_matrix(g);
    const Eigen::MatrixXd h = (1.3 * as_matrix(x) + a * as_matrix(x));
    Eigen::MatrixXd z = h * as_matrix(reshape(p.lin1.weight, {8, 8}));
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, 2) += 0.5;
    z = z.cwiseMax(0.0);
    const Eigen::MatrixXd expected = z * as_matrix(p.lin2.weight);
    EXPECT_LT((as_matrix(gin_layer(x, adj, p)) - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(gin_layer(x, Tensor::zeros({10, 10}), p), ShapeError);
}

TEST(GinLayer, IsolatedNodesKeepOwnSignal) {
    TigtModel model(small_config(), 2);
    const auto& named = model.named_parameters();
    GinParams p{named[2].second, {named[3].second, named[4].second}, {named[5].second, named[6].second}};
    ASSERT_EQ(named[2].first, "pe.mpnn_a.0.eps");
    std::mt19937_64 rng(1);
    const Tensor x = random_features(3, 8, rng);
    const Tensor isolated = gin_layer(x, Tensor::zeros({3, 3}), p);
    const Tensor row0 = gin_layer(Tensor({1, 8}, {x.data().begin(), x.data().begin() + 8}), Tensor::zeros({1, 1}), p);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(isolated.at(0, j), row0.at(0, j), 1e-14);
}

TEST(PositionalEmbedding, ZeroThetaIsIdentity) {
    TigtModel model(small_config(), 5);
    for (auto [name, t] : model.named_parameters()) {
        if (name == "pe.theta") std::fill(t.mutable_data().begin(), t.mutable_data().end(), 0.0);
    }
    std::mt19937_64 rng(2);
    const GraphSample s = make_sample(generate_csl(41, 5), 0);
    const Tensor x = random_features(41, 8, rng);
    const Tensor pe = model.topo_positional_embedding(x, s.adj, s.clique);
    EXPECT_EQ(std::vector<double>(pe.data().begin(), pe.data().end()),
              std::vector<double>(x.data().begin(), x.data().end()));
}

TEST(PositionalEmbedding, TanhBoundsTheOffset) {
    TigtConfig c = small_config();
    TigtModel model(c, 6);
    for (auto [name, t] : model.named_parameters()) {
        if (name == "pe.theta") std::fill(t.mutable_data().begin(), t.mutable_data().end(), 50.0);
    }
    std::mt19937_64 rng(4);
    const GraphSample s = make_sample(generate_rook_4x4(), 0);
    const Tensor x = random_features(16, 8, rng);
    const Tensor pe = model.topo_positional_embedding(x, s.adj, s.clique);
    for (std::size_t i = 0; i < pe.numel(); ++i) EXPECT_LE(std::abs(pe.data()[i] - x.data()[i]), 2.0 + 1e-12);
}

TEST(PositionalEmbedding, DisabledPassesThrough) {
    TigtConfig c = small_config();
    c.use_pe = false;
    TigtModel model(c, 6);
    std::mt19937_64 rng(4);
    const GraphSample s = make_sample(cycle_graph(5), 0);
    const Tensor x = random_features(5, 8, rng);
    EXPECT_EQ(model.topo_positional_embedding(x, s.adj, s.clique).handle(), x.handle());
}

TEST(Invariance, LogitsUnderNodePermutation) {
    std::mt19937_64 rng(11);
    TigtModel model(small_config(), 3);
    for (int trial = 0; trial < 20; ++trial) {
        const GraphSample s = random_sample(rng);
        const GraphSample p = permute_sample(s, random_permutation(s.num_nodes(), rng()));
        const Tensor a = model.forward_graph(s);
        const Tensor b = model.forward_graph(p);
        for (std::size_t i = 0; i < a.numel(); ++i) ASSERT_NEAR(a.data()[i], b.data()[i], 1e-9);
    }
}

TEST(Invariance, EncoderLayerIsEquivariant) {
    std::mt19937_64 rng(12);
    TigtModel model(small_config(), 4);
    for (int trial = 0; trial < 20; ++trial) {
        const GraphSample s = random_sample(rng);
        const auto perm = random_permutation(s.num_nodes(), rng());
        const GraphSample p = permute_sample(s, perm);
        const Tensor x = random_features(s.num_nodes(), 8, rng);
        const Tensor px = permute_sample({x, s.adj, s.clique, 0}, perm).x;
        const Tensor out = model.encoder_layer(1, x, s.adj, s.clique);
        const Tensor pout = model.encoder_layer(1, px, p.adj, p.clique);
        for (std::size_t v = 0; v < s.num_nodes(); ++v) {
            for (std::size_t j = 0; j < 8; ++j) ASSERT_NEAR(pout.at(perm[v], j), out.at(v, j), 1e-9);
        }
    }
}

TEST(Invariance, IsomorphicCslCopiesGetIdenticalLogitsWithSharedClique) {
    TigtModel model(TigtConfig{}, 0);
    const Graph g = generate_csl(41, 4);
    const auto perm = random_permutation(41, 9);
    const GraphSample s = make_sample(g, 0);
    const Tensor a = model.forward_graph(s);
    const Tensor b = model.forward_graph(permute_sample(s, perm));
    for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-9);
    EXPECT_EQ(a.shape(), (Shape{1, 10}));
}

TEST(ParameterCount, MatchesLayerInventory) {
    std::vector<TigtConfig> configs;
    for (std::size_t layers : {1, 2, 5}) {
        TigtConfig c;
        c.num_layers = layers;
        configs.push_back(c);
    }
    TigtConfig variant = small_config();
    variant.pe_share_weights = false;
    variant.pe_mpnn_layers = 2;
    variant.dual_path = PathMode::Single;
    variant.use_graph_info = false;
    configs.push_back(variant);
    variant.use_pe = false;
    variant.use_global_attention = false;
    configs.push_back(variant);
    for (const auto& c : configs) {
        EXPECT_EQ(count_parameters(c), expected_parameters(c));
        EXPECT_EQ(TigtModel(c, 0).parameter_count(), expected_parameters(c));
    }
    EXPECT_EQ(count_parameters(configs[0]), 61469u);
    EXPECT_EQ(count_parameters(configs[1]), 113711u);
}

TEST(ParameterCount, GrowsWithDepth) {
    TigtConfig c;
    std::size_t previous = 0;
    for (std::size_t layers = 1; layers <= 6; ++layers) {
        c.num_layers = layers;
        const std::size_t count = count_parameters(c);
        EXPECT_GT(count, previous);
        previous = count;
    }
}

TEST(Model, InitialisationFollowsScheme) {
    TigtModel model(TigtConfig{}, 42);
    for (const auto& [name, t] : model.named_parameters()) {
        if (name.ends_with(".bias")) {
            for (double v : t.data()) ASSERT_EQ(v, 0.0) << name;
        } else if (name.ends_with(".eps")) {
            ASSERT_EQ(t.item(), 0.0);
        } else if (name == "pe.theta") {
            for (double v : t.data()) ASSERT_LE(std::abs(v), 0.1);
        } else if (name.ends_with(".gain")) {
            for (double v : t.data()) ASSERT_EQ(v, 1.0);
        } else if (name.ends_with(".weight")) {
            const double limit = std::sqrt(6.0 / static_cast<double>(t.dim(0) + t.dim(1)));
            for (double v : t.data()) ASSERT_LE(std::abs(v), limit);
        }
    }
}

TEST(Model, SameSeedSameWeights) {
    const TigtModel a(small_config(), 9);
    const TigtModel b(small_config(), 9);
    const TigtModel c(small_config(), 10);
    EXPECT_EQ(a.named_parameters()[0].second.data()[0], b.named_parameters()[0].second.data()[0]);
    EXPECT_NE(a.named_parameters()[0].second.data()[0], c.named_parameters()[0].second.data()[0]);
}

TEST(Model, AblationsRemoveTheirParameters) {
    TigtConfig c = small_config();
    c.dual_path = PathMode::Single;
    c.use_graph_info = false;
    c.use_global_attention = false;
    c.use_pe = false;
    const TigtModel model(c, 0);
    for (const auto& [name, t] : model.named_parameters()) {
        EXPECT_EQ(name.find("gin_c"), std::string::npos);
        EXPECT_EQ(name.find("squeeze"), std::string::npos);
        EXPECT_EQ(name.find("attention"), std::string::npos);
        EXPECT_FALSE(name.starts_with("pe."));
    }
}

TEST(Model, ConfigValidation) {
    TigtConfig c;
    c.num_heads = 5;
    EXPECT_THROW(TigtModel(c, 0), ConfigError);
    c = TigtConfig{};
    c.reduction_factor = 3;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TigtConfig{};
    c.num_layers = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TigtConfig{};
    c.attention_dropout = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Model, ConfigKeyValuesRestoreEveryField) {
    TigtConfig c = small_config();
    c.pe_activation = Activation::Relu;
    c.readout = Pooling::Mean;
    c.norm = NormAxis::Column;
    c.attention_dropout = 0.25;
    const TigtConfig back = tigt_config_from(to_key_values(c));
    EXPECT_EQ(to_key_values(back), to_key_values(c));
    EXPECT_THROW(tigt_config_from({{"hidden", "8"}}), ConfigError);
    EXPECT_THROW(tigt_config_from({{"hidden_dim", "eight"}}), ConfigError);
}

TEST(Model, ShapeChecks) {
    TigtModel model(small_config(), 0);
    GraphSample s = make_sample(cycle_graph(4), 0);
    s.x = Tensor::zeros({4, 2});
    EXPECT_THROW(model.forward_graph(s), ShapeError);
    s = make_sample(cycle_graph(4), 0);
    s.clique = Tensor::zeros({3, 3});
    EXPECT_THROW(model.forward_graph(s), ShapeError);
    EXPECT_THROW(model.forward(GraphBatch{}), ShapeError);
}

TEST(Model, BatchRowsMatchSingleGraphs) {
    TigtModel model(small_config(), 0);
    GraphBatch batch{{make_sample(cycle_graph(5), 0), make_sample(bowtie_graph(), 1)}};
    const Tensor logits = model.forward(batch);
    ASSERT_EQ(logits.shape(), (Shape{2, 10}));
    const Tensor second = model.forward_graph(batch.graphs[1]);
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(logits.at(1, j), second.at(0, j));
}

TEST(Model, DropoutOnlyWhileTraining) {
    TigtConfig c = small_config();
    c.attention_dropout = 0.5;
    TigtModel model(c, 0);
    const GraphSample s = make_sample(generate_csl(11, 2), 0);
    EXPECT_EQ(model.forward_graph(s).data()[0], model.forward_graph(s).data()[0]);
    EXPECT_THROW(model.forward_graph(s, {true, nullptr}), ParameterError);
    std::mt19937_64 rng(0);
    const double a = model.forward_graph(s, {true, &rng}).data()[0];
    const double b = model.forward_graph(s, {true, &rng}).data()[0];
    EXPECT_NE(a, b);
}

TEST(Model, EveryParameterReceivesGradient) {
    TigtModel model(TigtConfig{}, 1);
    std::vector<double> norms(model.named_parameters().size(), 0.0);
    for (int b = 0; b < 5; ++b) {
        GraphBatch batch;
        std::vector<int> labels;
        for (int i = 0; i < 4; ++i) {
            const std::size_t skip = kCslSkips[static_cast<std::size_t>((b * 4 + i) % 10)];
            batch.graphs.push_back(make_sample(permute(generate_csl(41, skip), random_permutation(41, 7 * b + i)),
                                               (b * 4 + i) % 10));
            labels.push_back(batch.graphs.back().label);
        }
        for (const auto& [name, t] : model.named_parameters()) Tensor(t).zero_grad();
        Tape tape;
        {
            Tape::Scope scope(tape);
            tape.backward(cross_entropy(model.forward(batch), labels));
        }
        for (std::size_t i = 0; i < norms.size(); ++i) {
            for (double g : model.named_parameters()[i].second.grad()) norms[i] += g * g;
        }
    }
    for (std::size_t i = 0; i < norms.size(); ++i) {
        EXPECT_GT(norms[i], 0.0) << model.named_parameters()[i].first;
    }
}

TEST(Model, FullModelGradientMatchesFiniteDifferences) {
    TigtConfig c = small_config();
    TigtModel model(c, 2);
    GraphBatch batch{{make_sample(generate_csl(13, 2), 0), make_sample(generate_csl(13, 3), 1)}};
    const std::vector<int> labels{0, 1};
    Tape tape;
    {
        Tape::Scope scope(tape);
        tape.backward(cross_entropy(model.forward(batch), labels));
    }
    std::mt19937_64 rng(5);
    const auto& named = model.named_parameters();
    for (int trial = 0; trial < 10; ++trial) {
        Tensor t = named[std::uniform_int_distribution<std::size_t>(0, named.size() - 1)(rng)].second;
        const std::size_t i = std::uniform_int_distribution<std::size_t>(0, t.numel() - 1)(rng);
        const double analytic = t.grad()[i];
        const double numeric = oracle::finite_difference(
            [&] { return cross_entropy(model.forward(batch), labels).item(); }, t, i, 1e-5);
        EXPECT_LT(oracle::relative_error(analytic, numeric, 1e-7), 1e-3);
    }
}

TEST(Checkpoint, SaveLoadReproducesLogits) {
    const auto path = std::filesystem::temp_directory_path() / "tigt_checkpoint_test.json";
    TigtModel model(small_config(), 8);
    model.save(path);
    const TigtModel back = TigtModel::load(path);
    const GraphSample s = make_sample(generate_shrikhande(), 0);
    const Tensor a = model.forward_graph(s);
    const Tensor b = back.forward_graph(s);
    for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a.data()[i], b.data()[i]);
    std::filesystem::remove(path);
    EXPECT_THROW(TigtModel::load(path), IoError);
}

TEST(Checkpoint, CopyValuesRequiresSameLayout) {
    TigtModel a(small_config(), 1);
    const TigtModel b(small_config(), 2);
    a.copy_values_from(b);
    EXPECT_EQ(a.named_parameters()[5].second.data()[0], b.named_parameters()[5].second.data()[0]);
    TigtConfig other = small_config();
    other.num_layers = 1;
    EXPECT_THROW(a.copy_values_from(TigtModel(other, 0)), ParameterError);
}

TEST(Samples, PermuteSampleMovesAllThreeMatrices) {
    const Graph g = cycle5_with_chord();
    const auto perm = random_permutation(5, 2);
    const GraphSample direct = make_sample(permute(g, perm), 0, clique_adjacency(cycle_basis(g), 5));
    const GraphSample moved = permute_sample(make_sample(g, 0), perm);
    EXPECT_EQ(std::vector<double>(moved.adj.data().begin(), moved.adj.data().end()),
              std::vector<double>(direct.adj.data().begin(), direct.adj.data().end()));
    EXPECT_THROW(permute_sample(moved, std::vector<NodeId>{0, 1}), ParameterError);
}

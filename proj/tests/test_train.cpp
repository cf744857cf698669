#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <random>
#include <set>

#include "tigt/errors.hpp"
#include "tigt/train.hpp"

using namespace tigt;

namespace {

std::vector<int> csl_labels(std::size_t copies) {
    std::vector<int> labels;
    for (int c = 0; c < 10; ++c) {
        for (std::size_t i = 0; i < copies; ++i) labels.push_back(c);
    }
    return labels;
}

TigtConfig tiny_model() {
    TigtConfig c;
    c.hidden_dim = 8;
    c.num_heads = 2;
    c.num_layers = 1;
    return c;
}

TrainConfig tiny_training(std::size_t epochs) {
    TrainConfig t;
    t.epochs = epochs;
    t.seeds = {0};
    t.csl_nodes = 13;
    t.skips = {2, 3, 5};
    t.copies_per_class = 5;
    return t;
}

std::vector<int> class_counts(const std::vector<std::size_t>& idx, const std::vector<int>& labels) {
    std::vector<int> counts(10, 0);
    for (std::size_t i : idx) ++counts[static_cast<std::size_t>(labels[i])];
    return counts;
}

}  // namespace

TEST(StratifiedSplit, CslProportions) {
    const auto labels = csl_labels(15);
    const Split s = stratified_split(labels, {}, 0);
    EXPECT_EQ(s.train.size(), 90u);
    EXPECT_EQ(s.val.size(), 30u);
    EXPECT_EQ(s.test.size(), 30u);
    for (int c : class_counts(s.train, labels)) EXPECT_EQ(c, 9);
    for (int c : class_counts(s.val, labels)) EXPECT_EQ(c, 3);
    for (int c : class_counts(s.test, labels)) EXPECT_EQ(c, 3);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), 150u);
}

TEST(StratifiedSplit, SeededAndSeedSensitive) {
    const auto labels = csl_labels(15);
    EXPECT_EQ(stratified_split(labels, {}, 4).test, stratified_split(labels, {}, 4).test);
    EXPECT_NE(stratified_split(labels, {}, 4).test, stratified_split(labels, {}, 5).test);
}

TEST(StratifiedSplit, AllTrainAndTooFewSamples) {
    const auto labels = csl_labels(15);
    const Split s = stratified_split(labels, {1.0, 0.0, 0.0}, 0);
    EXPECT_EQ(s.train.size(), 150u);
    EXPECT_TRUE(s.val.empty());
    EXPECT_TRUE(s.test.empty());
    EXPECT_THROW(stratified_split(csl_labels(1), {}, 0), SplitError);
}

TEST(Adam, ZeroGradientOnlyDecays) {
    Tensor w = Tensor::parameter({2}, {1.0, -2.0});
    std::vector<Tensor> params{w};
    AdamState state;
    adam_step(params, state, {0.1, 0.5});
    EXPECT_NEAR(w.data()[0], 1.0 - 0.1 * 0.5 * 1.0, 1e-15);
    EXPECT_NEAR(w.data()[1], -2.0 + 0.1 * 0.5 * 2.0, 1e-15);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    Tensor w = Tensor::parameter({3}, {0.0, 0.0, 0.0});
    const std::vector<double> g{3.0, -1e-3, 0.0};
    std::copy(g.begin(), g.end(), w.mutable_grad().begin());
    std::vector<Tensor> params{w};
    AdamState state;
    adam_step(params, state, {0.01});
    // Bias correction makes the first step -lr * sign(g) up to eps.
    EXPECT_NEAR(w.data()[0], -0.01, 1e-9);
    EXPECT_NEAR(w.data()[1], 0.01, 1e-7);
    EXPECT_EQ(w.data()[2], 0.0);
    EXPECT_EQ(state.step, 1u);
}

TEST(Adam, MinimisesQuadraticBowl) {
    Tensor w = Tensor::parameter({2}, {3.0, -4.0});
    std::vector<Tensor> params{w};
    AdamState state;
    for (int step = 0; step < 2000; ++step) {
        w.zero_grad();
        Tape tape;
        Tape::Scope scope(tape);
        const Tensor target({2}, {1.0, 2.0});
        const Tensor diff = sub(w, target);
        tape.backward(sum_all(mul(diff, diff)));
        adam_step(params, state, {0.05});
    }
    EXPECT_NEAR(w.data()[0], 1.0, 1e-3);
    EXPECT_NEAR(w.data()[1], 2.0, 1e-3);
}

TEST(Adam, RejectsMismatchedState) {
    Tensor a = Tensor::parameter({2}, {0, 0});
    Tensor b = Tensor::parameter({2}, {0, 0});
    std::vector<Tensor> one{a};
    std::vector<Tensor> two{a, b};
    AdamState state;
    adam_step(one, state, {});
    EXPECT_THROW(adam_step(two, state, {}), ParameterError);
}

TEST(Dataset, CliqueCacheMatchesFreshComputation) {
    TrainConfig t;
    t.copies_per_class = 1;
    const CslDataset data = prepare_csl_dataset(t);
    ASSERT_EQ(data.samples.size(), 10u);
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const Matrix fresh = clique_adjacency(data.graphs[i].graph).matrix;
        const auto cached = data.samples[i].clique.data();
        for (Eigen::Index r = 0; r < fresh.rows(); ++r) {
            for (Eigen::Index c = 0; c < fresh.cols(); ++c) {
                ASSERT_EQ(cached[static_cast<std::size_t>(r * fresh.cols() + c)], fresh(r, c));
            }
        }
        EXPECT_EQ(data.samples[i].label, data.graphs[i].label);
    }
}

TEST(Dataset, CliqueCacheOnRandomGraphs) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Graph g = gnp_random_graph(15, 0.3, seed);
        const CliqueAdjacency ac = clique_adjacency(g);
        const GraphSample s = make_sample(g, 0, ac);
        const GraphSample fresh = make_sample(g, 0);
        EXPECT_TRUE(std::equal(s.clique.data().begin(), s.clique.data().end(), fresh.clique.data().begin()));
    }
}

TEST(TrainSeed, ZeroEpochsEvaluatesInitialModel) {
    const TrainConfig t = tiny_training(0);
    const CslDataset data = prepare_csl_dataset(t);
    const SeedReport r = train_seed(tiny_model(), t, data, 0);
    EXPECT_TRUE(r.epochs.empty());
    EXPECT_EQ(r.best_epoch, 0u);
    EXPECT_GE(r.test_accuracy, 0.0);
    EXPECT_LE(r.test_accuracy, 1.0);
}

TEST(TrainSeed, DeterministicForFixedSeed) {
    const TrainConfig t = tiny_training(3);
    const CslDataset data = prepare_csl_dataset(t);
    const SeedReport a = train_seed(tiny_model(), t, data, 7);
    const SeedReport b = train_seed(tiny_model(), t, data, 7);
    ASSERT_EQ(a.epochs.size(), 3u);
    for (std::size_t i = 0; i < a.epochs.size(); ++i) {
        EXPECT_EQ(a.epochs[i].train_loss, b.epochs[i].train_loss);
        EXPECT_EQ(a.epochs[i].val_loss, b.epochs[i].val_loss);
    }
    EXPECT_EQ(a.test_accuracy, b.test_accuracy);
    EXPECT_EQ(a.best_epoch, b.best_epoch);
}

TEST(TrainSeed, BestEpochHasBestValidationAccuracy) {
    const TrainConfig t = tiny_training(6);
    const CslDataset data = prepare_csl_dataset(t);
    const SeedReport r = train_seed(tiny_model(), t, data, 1);
    for (const auto& e : r.epochs) EXPECT_LE(e.val_accuracy, r.best_val_accuracy);
    if (r.best_epoch > 0) EXPECT_EQ(r.epochs[r.best_epoch - 1].val_accuracy, r.best_val_accuracy);
}

TEST(TrainSeed, DivergenceRaisesTrainingError) {
    TrainConfig t = tiny_training(5);
    t.learning_rate = 1e300;
    EXPECT_THROW(train_csl(tiny_model(), t), TrainingError);
}

TEST(TrainCsl, SingleSeedHasZeroStd) {
    const RunReport r = train_csl(tiny_model(), tiny_training(1));
    ASSERT_EQ(r.seeds.size(), 1u);
    EXPECT_EQ(r.std_test_accuracy, 0.0);
    EXPECT_EQ(r.mean_test_accuracy, r.seeds[0].test_accuracy);
    EXPECT_EQ(r.parameter_count, count_parameters(r.model));
}

TEST(TrainCsl, WorkersDoNotChangeResults) {
    TrainConfig t = tiny_training(2);
    t.seeds = {0, 1, 2};
    const RunReport serial = train_csl(tiny_model(), t);
    t.workers = 3;
    const RunReport threaded = train_csl(tiny_model(), t);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(serial.seeds[i].seed, threaded.seeds[i].seed);
        EXPECT_EQ(serial.seeds[i].test_accuracy, threaded.seeds[i].test_accuracy);
        EXPECT_EQ(serial.seeds[i].epochs.back().train_loss, threaded.seeds[i].epochs.back().train_loss);
    }
}

TEST(Aggregate, PopulationStandardDeviation) {
    RunReport r;
    for (double acc : {0.5, 1.0, 1.0, 0.5}) {
        SeedReport s;
        s.test_accuracy = acc;
        r.seeds.push_back(s);
    }
    aggregate(r);
    EXPECT_DOUBLE_EQ(r.mean_test_accuracy, 0.75);
    EXPECT_DOUBLE_EQ(r.std_test_accuracy, 0.25);
}

TEST(ReportJson, CarriesSeedsAndSummary) {
    const RunReport r = train_csl(tiny_model(), tiny_training(1));
    const auto j = nlohmann::json::parse(report_json(r));
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("seeds").size(), 1u);
    EXPECT_TRUE(j.contains("mean_test_accuracy"));
    EXPECT_TRUE(j.contains("std_test_accuracy"));
    EXPECT_EQ(j.at("parameter_count"), r.parameter_count);
}

TEST(TrainConfig, ParsesAndValidates) {
    const auto [model, train] = experiment_config_from({{"hidden_dim", "16"},
                                                        {"num_heads", "4"},
                                                        {"epochs", "3"},
                                                        {"seeds", "4,5"},
                                                        {"split", "0.5,0.25,0.25"}});
    EXPECT_EQ(model.hidden_dim, 16u);
    EXPECT_EQ(train.epochs, 3u);
    EXPECT_EQ(train.seeds, (std::vector<std::uint64_t>{4, 5}));
    EXPECT_DOUBLE_EQ(train.split.val, 0.25);
    EXPECT_THROW(experiment_config_from({{"colour", "red"}}), ConfigError);
    EXPECT_THROW(experiment_config_from({{"split", "0.5,0.5,0.5"}}), ConfigError);
    EXPECT_THROW(experiment_config_from({{"seeds", ""}}), ConfigError);
    EXPECT_THROW(experiment_config_from({{"batch_size", "0"}}), ConfigError);
    EXPECT_EQ(train_config_from(to_key_values(train)).seeds, train.seeds);
}

TEST(Ablation, VariantsDifferFromBaseInOneAxis) {
    const auto variants = ablation_variants(TigtConfig{});
    ASSERT_EQ(variants.front().first, "full");
    std::set<std::string> names;
    for (const auto& [name, config] : variants) {
        names.insert(name);
        if (name == "full") continue;
        const auto base = to_key_values(TigtConfig{});
        const auto kv = to_key_values(config);
        std::size_t differing = 0;
        for (const auto& [key, value] : base) differing += kv.at(key) != value ? 1 : 0;
        EXPECT_EQ(differing, 1u) << name;
    }
    EXPECT_EQ(names.size(), variants.size());
}

TEST(Ablation, SuiteProducesCsvRows) {
    TigtConfig base = tiny_model();
    const AblationTable table = run_ablation_suite(base, tiny_training(1));
    EXPECT_EQ(table.rows.size(), ablation_variants(base).size());
    const std::string csv = ablation_csv(table);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), table.rows.size() + 1);
    EXPECT_EQ(csv.rfind("variant,", 0), 0u);
}

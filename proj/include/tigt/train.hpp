#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tigt/config.hpp"
#include "tigt/graph.hpp"
#include "tigt/model.hpp"
#include "tigt/tensor.hpp"

namespace tigt {

struct SplitFractions {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
};

struct TrainConfig {
    std::size_t batch_size = 4;
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    double weight_decay = 1e-5;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3};
    SplitFractions split;
    std::size_t workers = 1;
    // Dataset generation.
    std::size_t csl_nodes = kCslNodes;
    std::vector<std::size_t> skips{kCslSkips.begin(), kCslSkips.end()};
    std::size_t copies_per_class = 15;
    std::uint64_t dataset_seed = 0;

    // Throws ConfigError: fractions must be non-negative and sum to 1, seeds
    // non-empty, batch size and workers positive.
    void validate() const;
};

KeyValues to_key_values(const TrainConfig& config);
TrainConfig train_config_from(const KeyValues& values, TrainConfig base = {});

// Splits the settings of one flat config file into model and training keys
// and parses both. Unknown keys and invalid settings throw ConfigError.
std::pair<TigtConfig, TrainConfig> experiment_config_from(const KeyValues& values, TigtConfig model_base = {},
                                                          TrainConfig train_base = {});

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

// Per class: round(train * size) samples to train, round(val * size) to
// validation, the rest to test, after a seeded shuffle. Throws SplitError when
// a split with a positive fraction would receive no sample of some class.
Split stratified_split(std::span<const int> labels, const SplitFractions& fractions, std::uint64_t seed);

struct AdamOptions {
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t step = 0;
};

// One Adam update with decoupled weight decay, reading each tensor's grad.
void adam_step(std::span<Tensor> params, AdamState& state, const AdamOptions& options);

struct CslDataset {
    std::vector<LabeledGraph> graphs;
    std::vector<GraphSample> samples;  // A_C computed once per graph
};

CslDataset prepare_csl_dataset(const TrainConfig& config);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct SeedReport {
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // 0 = untrained initialisation
    double best_val_accuracy = 0.0;
    double best_val_loss = 0.0;
    double test_accuracy = 0.0;
    double seconds = 0.0;
};

struct RunReport {
    TigtConfig model;
    TrainConfig train;
    std::size_t parameter_count = 0;
    std::vector<SeedReport> seeds;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;  // population standard deviation over seeds
};

// Recomputes mean and population std of the per-seed test accuracies.
void aggregate(RunReport& report);

std::string report_json(const RunReport& report);

using ProgressFn = std::function<void(const std::string&)>;

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalResult evaluate(const TigtModel& model, std::span<const GraphSample> samples, std::span<const std::size_t> indices);

// Trains one seed. The checkpoint with the best validation accuracy (ties:
// lower validation loss) is restored before the single test evaluation.
SeedReport train_seed(const TigtConfig& model_config, const TrainConfig& train_config, const CslDataset& data,
                      std::uint64_t seed, const ProgressFn& progress = {});

// All seeds, run on up to `workers` threads.
RunReport train_csl(const TigtConfig& model_config, const TrainConfig& train_config, const ProgressFn& progress = {});
RunReport train_csl(const TigtConfig& model_config, const TrainConfig& train_config, const CslDataset& data,
                    const ProgressFn& progress = {});

struct AblationRow {
    std::string name;
    TigtConfig config;
    RunReport report;
    // Set when the full model scores below this row's mean minus two stds.
    bool flagged = false;
};

struct AblationTable {
    std::vector<AblationRow> rows;  // "full" first
};

// Full model plus one row per ablation axis, all on the same data and seeds.
std::vector<std::pair<std::string, TigtConfig>> ablation_variants(const TigtConfig& base);
AblationTable run_ablation_suite(const TigtConfig& base, const TrainConfig& train_config,
                                 const ProgressFn& progress = {});
std::string ablation_csv(const AblationTable& table);

}  // namespace tigt

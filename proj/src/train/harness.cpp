#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tigt/errors.hpp"
#include "tigt/train.hpp"

namespace tigt {
namespace {

std::size_t argmax_row(const Tensor& logits, std::size_t row) {
    const std::size_t c = logits.dim(1);
    const auto d = logits.data().subspan(row * c, c);
    return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

std::vector<Tensor> parameter_list(const TigtModel& model) {
    std::vector<Tensor> out;
    for (const auto& [name, t] : model.named_parameters()) out.push_back(t);
    return out;
}

}  // namespace

CslDataset prepare_csl_dataset(const TrainConfig& config) {
    CslDataset data;
    data.graphs = generate_csl_dataset(config.csl_nodes, config.skips, config.copies_per_class, config.dataset_seed);
    data.samples.reserve(data.graphs.size());
    for (const auto& lg : data.graphs) data.samples.push_back(make_sample(lg.graph, lg.label));
    return data;
}

EvalResult evaluate(const TigtModel& model, std::span<const GraphSample> samples,
                    std::span<const std::size_t> indices) {
    EvalResult r;
    if (indices.empty()) return r;
    std::size_t correct = 0;
    for (std::size_t i : indices) {
        const GraphSample& s = samples[i];
        const Tensor logits = model.forward_graph(s);
        const int label = s.label;
        r.loss += cross_entropy(logits, std::span<const int>(&label, 1)).item();
        if (static_cast<int>(argmax_row(logits, 0)) == label) ++correct;
    }
    r.loss /= static_cast<double>(indices.size());
    r.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
    return r;
}

SeedReport train_seed(const TigtConfig& model_config, const TrainConfig& tc, const CslDataset& data,
                      std::uint64_t seed, const ProgressFn& progress) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> labels;
    for (const auto& s : data.samples) labels.push_back(s.label);
    const Split split = stratified_split(labels, tc.split, seed);

    TigtConfig mc = model_config;
    mc.num_classes = std::max<std::size_t>(mc.num_classes, tc.skips.size());
    TigtModel model(mc, seed);
    TigtModel best(mc, seed);
    std::vector<Tensor> params = parameter_list(model);
    AdamState adam;
    const AdamOptions options{tc.learning_rate, tc.weight_decay};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    ForwardContext ctx{true, &rng};

    SeedReport report;
    report.seed = seed;
    const EvalResult initial = evaluate(model, data.samples, split.val);
    report.best_epoch = 0;
    report.best_val_accuracy = initial.accuracy;
    report.best_val_loss = initial.loss;

    std::vector<std::size_t> order = split.train;
    for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < order.size(); b += tc.batch_size) {
            const std::size_t e = std::min(order.size(), b + tc.batch_size);
            GraphBatch batch;
            std::vector<int> ys;
            for (std::size_t i = b; i < e; ++i) {
                batch.graphs.push_back(data.samples[order[i]]);
                ys.push_back(data.samples[order[i]].label);
            }
            for (Tensor& p : params) p.zero_grad();
            Tape tape;
            double loss_value = 0.0;
            {
                Tape::Scope scope(tape);
                const Tensor loss = cross_entropy(model.forward(batch, ctx), ys);
                loss_value = loss.item();
                if (!std::isfinite(loss_value)) {
                    std::ostringstream msg;
                    msg << "non-finite training loss " << loss_value << " (seed " << seed << ", epoch " << epoch
                        << ", batch starting at " << b << ")";
                    for (const auto& [name, t] : model.named_parameters()) {
                        const auto d = t.data();
                        if (!std::all_of(d.begin(), d.end(), [](double x) { return std::isfinite(x); })) {
                            msg << "; parameter " << name << " is non-finite";
                            break;
                        }
                    }
                    throw TrainingError(msg.str());
                }
                tape.backward(loss);
            }
            adam_step(params, adam, options);
            loss_sum += loss_value * static_cast<double>(e - b);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size());
        const EvalResult val = evaluate(model, data.samples, split.val);
        rec.val_loss = val.loss;
        rec.val_accuracy = val.accuracy;
        report.epochs.push_back(rec);
        if (val.accuracy > report.best_val_accuracy ||
            (val.accuracy == report.best_val_accuracy && val.loss < report.best_val_loss)) {
            report.best_epoch = epoch;
            report.best_val_accuracy = val.accuracy;
            report.best_val_loss = val.loss;
            best.copy_values_from(model);
        }
        if (progress && (epoch % 10 == 0 || epoch == tc.epochs)) {
            std::ostringstream msg;
            msg << "seed " << seed << " epoch " << epoch << "/" << tc.epochs << " train_loss " << rec.train_loss
                << " val_acc " << val.accuracy << " best " << report.best_val_accuracy << "@" << report.best_epoch;
            progress(msg.str());
        }
    }
    // `best` was built from the same seed, so it still holds the initial
    // weights when no epoch beat them.
    report.test_accuracy = evaluate(best, data.samples, split.test).accuracy;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void aggregate(RunReport& report) {
    const std::size_t n = report.seeds.size();
    if (n == 0) {
        report.mean_test_accuracy = report.std_test_accuracy = 0.0;
        return;
    }
    double mean = 0.0;
    for (const auto& s : report.seeds) mean += s.test_accuracy;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& s : report.seeds) var += (s.test_accuracy - mean) * (s.test_accuracy - mean);
    report.mean_test_accuracy = mean;
    report.std_test_accuracy = std::sqrt(var / static_cast<double>(n));
}

RunReport train_csl(const TigtConfig& model_config, const TrainConfig& train_config, const ProgressFn& progress) {
    train_config.validate();
    return train_csl(model_config, train_config, prepare_csl_dataset(train_config), progress);
}

RunReport train_csl(const TigtConfig& model_config, const TrainConfig& tc, const CslDataset& data,
                    const ProgressFn& progress) {
    tc.validate();
    model_config.validate();
    RunReport report;
    report.model = model_config;
    report.model.num_classes = std::max<std::size_t>(model_config.num_classes, tc.skips.size());
    report.train = tc;
    report.parameter_count = count_parameters(report.model);
    report.seeds.resize(tc.seeds.size());

    std::mutex log_mutex;
    ProgressFn locked;
    if (progress) {
        locked = [&](const std::string& line) {
            std::lock_guard<std::mutex> lock(log_mutex);
            progress(line);
        };
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(tc.seeds.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < tc.seeds.size(); i = next++) {
            try {
                report.seeds[i] = train_seed(model_config, tc, data, tc.seeds[i], locked);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(tc.workers, tc.seeds.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    aggregate(report);
    return report;
}

std::string report_json(const RunReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["model"] = to_key_values(r.model);
    j["train"] = to_key_values(r.train);
    j["parameter_count"] = r.parameter_count;
    auto& seeds = j["seeds"] = nlohmann::json::array();
    for (const auto& s : r.seeds) {
        nlohmann::json js;
        js["seed"] = s.seed;
        js["best_epoch"] = s.best_epoch;
        js["best_val_accuracy"] = s.best_val_accuracy;
        js["best_val_loss"] = s.best_val_loss;
        js["test_accuracy"] = s.test_accuracy;
        js["seconds"] = s.seconds;
        auto& epochs = js["epochs"] = nlohmann::json::array();
        for (const auto& e : s.epochs) {
            epochs.push_back({{"epoch", e.epoch},
                              {"train_loss", e.train_loss},
                              {"val_loss", e.val_loss},
                              {"val_accuracy", e.val_accuracy}});
        }
        seeds.push_back(std::move(js));
    }
    j["mean_test_accuracy"] = r.mean_test_accuracy;
    j["std_test_accuracy"] = r.std_test_accuracy;
    return j.dump(2);
}

std::vector<std::pair<std::string, TigtConfig>> ablation_variants(const TigtConfig& base) {
    std::vector<std::pair<std::string, TigtConfig>> out;
    auto variant = [&](const std::string& name, auto edit) {
        TigtConfig c = base;
        edit(c);
        out.emplace_back(name, c);
    };
    variant("full", [](TigtConfig&) {});
    variant("no_graph_info", [](TigtConfig& c) { c.use_graph_info = false; });
    variant("no_topological_pe", [](TigtConfig& c) { c.use_pe = false; });
    variant("pe_not_shared", [](TigtConfig& c) { c.pe_share_weights = false; });
    variant("no_global_attention", [](TigtConfig& c) { c.use_global_attention = false; });
    variant("relu_pe", [](TigtConfig& c) { c.pe_activation = Activation::Relu; });
    variant("single_path", [](TigtConfig& c) { c.dual_path = PathMode::Single; });
    variant("mean_readout", [](TigtConfig& c) { c.readout = Pooling::Mean; });
    return out;
}

AblationTable run_ablation_suite(const TigtConfig& base, const TrainConfig& tc, const ProgressFn& progress) {
    tc.validate();
    const CslDataset data = prepare_csl_dataset(tc);
    AblationTable table;
    for (const auto& [name, config] : ablation_variants(base)) {
        if (progress) progress("ablation row " + name);
        table.rows.push_back({name, config, train_csl(config, tc, data, progress), false});
    }
    const double full = table.rows.front().report.mean_test_accuracy;
    for (auto& row : table.rows) {
        row.flagged = full < row.report.mean_test_accuracy - 2.0 * row.report.std_test_accuracy;
    }
    return table;
}

std::string ablation_csv(const AblationTable& table) {
    std::ostringstream out;
    out.precision(6);
    out << "variant,mean_test_accuracy,std_test_accuracy,parameter_count,seeds,flagged\n";
    for (const auto& row : table.rows) {
        out << row.name << ',' << row.report.mean_test_accuracy << ',' << row.report.std_test_accuracy << ','
            << row.report.parameter_count << ',' << row.report.seeds.size() << ','
            << (row.flagged ? "true" : "false") << '\n';
    }
    return out.str();
}

}  // namespace tigt

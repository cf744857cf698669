#include <cmath>
#include <set>
#include <sstream>

#include "tigt/errors.hpp"
#include "tigt/train.hpp"

namespace tigt {
namespace {

std::string real_str(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
    return out.str();
}

const std::set<std::string>& train_keys() {
    static const std::set<std::string> keys{"batch_size", "learning_rate",    "epochs",       "weight_decay",
                                            "seeds",      "split",            "workers",      "csl_nodes",
                                            "skips",      "copies_per_class", "dataset_seed"};
    return keys;
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (workers == 0) throw ConfigError("workers must be positive");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
    if (split.train < 0 || split.val < 0 || split.test < 0) throw ConfigError("split fractions must be non-negative");
    if (std::abs(split.train + split.val + split.test - 1.0) > 1e-9) {
        throw ConfigError("split fractions sum to " + real_str(split.train + split.val + split.test) + ", not 1");
    }
    if (skips.empty()) throw ConfigError("at least one skip length is required");
    if (copies_per_class == 0) throw ConfigError("copies_per_class must be positive");
}

KeyValues to_key_values(const TrainConfig& c) {
    return {
        {"batch_size", std::to_string(c.batch_size)},
        {"learning_rate", real_str(c.learning_rate)},
        {"epochs", std::to_string(c.epochs)},
        {"weight_decay", real_str(c.weight_decay)},
        {"seeds", join(c.seeds)},
        {"split", real_str(c.split.train) + "," + real_str(c.split.val) + "," + real_str(c.split.test)},
        {"workers", std::to_string(c.workers)},
        {"csl_nodes", std::to_string(c.csl_nodes)},
        {"skips", join(c.skips)},
        {"copies_per_class", std::to_string(c.copies_per_class)},
        {"dataset_seed", std::to_string(c.dataset_seed)},
    };
}

TrainConfig train_config_from(const KeyValues& values, TrainConfig c) {
    for (const auto& [key, value] : values) {
        if (key == "batch_size") c.batch_size = parse_count(key, value);
        else if (key == "learning_rate") c.learning_rate = parse_real(key, value);
        else if (key == "epochs") c.epochs = parse_count(key, value);
        else if (key == "weight_decay") c.weight_decay = parse_real(key, value);
        else if (key == "seeds") {
            c.seeds.clear();
            for (auto s : parse_integer_list(key, value)) {
                if (s < 0) throw ConfigError("seeds must be non-negative");
                c.seeds.push_back(static_cast<std::uint64_t>(s));
            }
        } else if (key == "split") {
            const auto f = parse_real_list(key, value);
            if (f.size() != 3) throw ConfigError("split: expected three fractions train,val,test");
            c.split = {f[0], f[1], f[2]};
        } else if (key == "workers") c.workers = parse_count(key, value);
        else if (key == "csl_nodes") c.csl_nodes = parse_count(key, value);
        else if (key == "skips") {
            c.skips.clear();
            for (auto s : parse_integer_list(key, value)) {
                if (s < 0) throw ConfigError("skips must be non-negative");
                c.skips.push_back(static_cast<std::size_t>(s));
            }
        } else if (key == "copies_per_class") c.copies_per_class = parse_count(key, value);
        else if (key == "dataset_seed") c.dataset_seed = static_cast<std::uint64_t>(parse_count(key, value));
        else throw ConfigError("unknown training setting '" + key + "'");
    }
    return c;
}

std::pair<TigtConfig, TrainConfig> experiment_config_from(const KeyValues& values, TigtConfig model_base,
                                                          TrainConfig train_base) {
    KeyValues model_values;
    KeyValues train_values;
    for (const auto& [key, value] : values) {
        (train_keys().contains(key) ? train_values : model_values).emplace(key, value);
    }
    std::pair<TigtConfig, TrainConfig> out{tigt_config_from(model_values, std::move(model_base)),
                                           train_config_from(train_values, std::move(train_base))};
    out.first.validate();
    out.second.validate();
    return out;
}

}  // namespace tigt

#include <sstream>

#include "tigt/config.hpp"
#include "tigt/errors.hpp"
#include "tigt/model.hpp"

namespace tigt {
namespace {

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }
std::string to_string(PathMode p) { return p == PathMode::Dual ? "dual" : "single"; }
std::string to_string(Pooling p) { return p == Pooling::Sum ? "sum" : "mean"; }
std::string to_string(NormAxis n) { return n == NormAxis::Row ? "row" : "column"; }
std::string to_string(bool b) { return b ? "true" : "false"; }

std::string real_str(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

template <class E>
E parse_choice(const std::string& key, const std::string& value, const char* a, E ea, const char* b, E eb) {
    if (value == a) return ea;
    if (value == b) return eb;
    throw ConfigError(key + ": expected '" + a + "' or '" + b + "', got '" + value + "'");
}

}  // namespace

void TigtConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (feature_dim == 0) fail("feature_dim must be positive");
    if (hidden_dim == 0) fail("hidden_dim must be positive");
    if (num_layers == 0) fail("num_layers must be at least 1");
    if (num_heads == 0 || hidden_dim % num_heads != 0) {
        fail("hidden_dim " + std::to_string(hidden_dim) + " is not divisible by num_heads " + std::to_string(num_heads));
    }
    if (reduction_factor == 0 || hidden_dim % reduction_factor != 0) {
        fail("hidden_dim " + std::to_string(hidden_dim) + " is not divisible by reduction_factor " +
             std::to_string(reduction_factor));
    }
    if (use_pe && pe_mpnn_layers == 0) fail("pe_mpnn_layers must be at least 1 when the PE is enabled");
    if (num_classes < 2) fail("num_classes must be at least 2");
    if (attention_dropout < 0.0 || attention_dropout >= 1.0) fail("attention_dropout must lie in [0, 1)");
    if (!(norm_eps > 0.0)) fail("norm_eps must be positive");
}

std::map<std::string, std::string> to_key_values(const TigtConfig& c) {
    return {
        {"feature_dim", std::to_string(c.feature_dim)},
        {"hidden_dim", std::to_string(c.hidden_dim)},
        {"num_layers", std::to_string(c.num_layers)},
        {"num_heads", std::to_string(c.num_heads)},
        {"pe_mpnn_layers", std::to_string(c.pe_mpnn_layers)},
        {"use_pe", to_string(c.use_pe)},
        {"pe_share_weights", to_string(c.pe_share_weights)},
        {"pe_activation", to_string(c.pe_activation)},
        {"dual_path", to_string(c.dual_path)},
        {"use_global_attention", to_string(c.use_global_attention)},
        {"use_graph_info", to_string(c.use_graph_info)},
        {"reduction_factor", std::to_string(c.reduction_factor)},
        {"readout", to_string(c.readout)},
        {"graph_pool", to_string(c.graph_pool)},
        {"attention_dropout", real_str(c.attention_dropout)},
        {"num_classes", std::to_string(c.num_classes)},
        {"norm", to_string(c.norm)},
        {"norm_eps", real_str(c.norm_eps)},
    };
}

TigtConfig tigt_config_from(const std::map<std::string, std::string>& values, TigtConfig c) {
    for (const auto& [key, value] : values) {
        if (key == "feature_dim") c.feature_dim = parse_count(key, value);
        else if (key == "hidden_dim") c.hidden_dim = parse_count(key, value);
        else if (key == "num_layers") c.num_layers = parse_count(key, value);
        else if (key == "num_heads") c.num_heads = parse_count(key, value);
        else if (key == "pe_mpnn_layers") c.pe_mpnn_layers = parse_count(key, value);
        else if (key == "use_pe") c.use_pe = parse_bool(key, value);
        else if (key == "pe_share_weights") c.pe_share_weights = parse_bool(key, value);
        else if (key == "pe_activation")
            c.pe_activation = parse_choice(key, value, "tanh", Activation::Tanh, "relu", Activation::Relu);
        else if (key == "dual_path")
            c.dual_path = parse_choice(key, value, "dual", PathMode::Dual, "single", PathMode::Single);
        else if (key == "use_global_attention") c.use_global_attention = parse_bool(key, value);
        else if (key == "use_graph_info") c.use_graph_info = parse_bool(key, value);
        else if (key == "reduction_factor") c.reduction_factor = parse_count(key, value);
        else if (key == "readout") c.readout = parse_choice(key, value, "sum", Pooling::Sum, "mean", Pooling::Mean);
        else if (key == "graph_pool")
            c.graph_pool = parse_choice(key, value, "sum", Pooling::Sum, "mean", Pooling::Mean);
        else if (key == "attention_dropout") c.attention_dropout = parse_real(key, value);
        else if (key == "num_classes") c.num_classes = parse_count(key, value);
        else if (key == "norm") c.norm = parse_choice(key, value, "row", NormAxis::Row, "column", NormAxis::Column);
        else if (key == "norm_eps") c.norm_eps = parse_real(key, value);
        else throw ConfigError("unknown model setting '" + key + "'");
    }
    return c;
}

std::size_t count_parameters(const TigtConfig& c) {
    c.validate();
    const std::size_t k = c.hidden_dim;
    const auto linear = [](std::size_t in, std::size_t out) { return in * out + out; };
    const std::size_t gin = 1 + 2 * linear(k, k);

    std::size_t total = linear(c.feature_dim, k);
    if (c.use_pe) total += c.pe_mpnn_layers * gin * (c.pe_share_weights ? 1 : 2) + 2 * k;
    std::size_t layer = gin + 2 * k + linear(k, 2 * k) + linear(2 * k, k) + 2 * k;
    if (c.dual_path == PathMode::Dual) layer += gin;
    if (c.use_global_attention) layer += 4 * linear(k, k);
    if (c.use_graph_info) layer += linear(k, k / c.reduction_factor) + linear(k / c.reduction_factor, k);
    total += c.num_layers * layer;
    total += linear(k, c.num_classes);
    return total;
}

}  // namespace tigt

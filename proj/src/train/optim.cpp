#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "tigt/errors.hpp"
#include "tigt/train.hpp"

namespace tigt {

Split stratified_split(std::span<const int> labels, const SplitFractions& f, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::mt19937_64 rng(seed);
    Split out;
    for (auto& [label, members] : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        const std::size_t n = members.size();
        const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n)));
        const auto n_val = static_cast<std::size_t>(std::llround(f.val * static_cast<double>(n)));
        const bool fits = n_train + n_val <= n;
        const std::size_t n_test = fits ? n - n_train - n_val : 0;
        if (!fits || (f.train > 0 && n_train == 0) || (f.val > 0 && n_val == 0) || (f.test > 0 && n_test == 0)) {
            throw SplitError("class " + std::to_string(label) + " has " + std::to_string(n) +
                             " samples, too few for the requested split");
        }
        out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.val.insert(out.val.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
                       members.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                        members.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

void adam_step(std::span<Tensor> params, AdamState& state, const AdamOptions& o) {
    if (state.m.empty()) {
        for (const Tensor& p : params) {
            state.m.emplace_back(p.numel(), 0.0);
            state.v.emplace_back(p.numel(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw ParameterError("optimizer state does not match the parameter list");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(o.beta1, t);
    const double c2 = 1.0 - std::pow(o.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i];
        auto& m = state.m[i];
        auto& v = state.v[i];
        if (m.size() != p.numel()) throw ParameterError("optimizer state does not match the parameter list");
        auto w = p.mutable_data();
        auto g = p.mutable_grad();
        for (std::size_t j = 0; j < w.size(); ++j) {
            m[j] = o.beta1 * m[j] + (1.0 - o.beta1) * g[j];
            v[j] = o.beta2 * v[j] + (1.0 - o.beta2) * g[j] * g[j];
            w[j] -= o.learning_rate * o.weight_decay * w[j];
            w[j] -= o.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + o.eps);
        }
    }
}

}  // namespace tigt

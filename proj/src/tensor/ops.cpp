#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "tigt/errors.hpp"
#include "tigt/tensor.hpp"

namespace tigt {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

using Impl = std::shared_ptr<TensorImpl>;

bool tracking(std::initializer_list<const Tensor*> inputs) {
    if (Tape::active() == nullptr) return false;
    return std::any_of(inputs.begin(), inputs.end(), [](const Tensor* t) { return t->requires_grad(); });
}

// Registers `out` on the active tape when `track` is set.
Tensor finish(Tensor out, bool track, Tape::BackwardFn fn) {
    if (track) {
        out.set_requires_grad(true);
        Tape::active()->record(out, std::move(fn));
    }
    return out;
}

std::vector<double>& grad_of(const Impl& t) {
    if (t->grad.size() != t->data.size()) t->grad.assign(t->data.size(), 0.0);
    return t->grad;
}

Shape strip_leading_ones(const Shape& s) {
    std::size_t i = 0;
    while (i < s.size() && s[i] == 1) ++i;
    return Shape(s.begin() + static_cast<std::ptrdiff_t>(i), s.end());
}

bool is_suffix(const Shape& small, const Shape& big) {
    const Shape s = strip_leading_ones(small);
    if (s.size() > big.size()) return false;
    return std::equal(s.begin(), s.end(), big.end() - static_cast<std::ptrdiff_t>(s.size()));
}

Shape broadcast_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() == b.shape()) return a.shape();
    if (is_suffix(b.shape(), a.shape())) return a.shape();
    if (is_suffix(a.shape(), b.shape())) return b.shape();
    throw ShapeError(std::string(op) + ": cannot broadcast " + shape_str(a.shape()) + " with " +
                     shape_str(b.shape()));
}

// Visits (i, i mod na, i mod nb) for i < n, where the smaller of na, nb
// divides n. Blocked to avoid a division per element.
template <class F>
void for_each_broadcast(std::size_t n, std::size_t na, std::size_t nb, F f) {
    if (na == nb) {
        for (std::size_t i = 0; i < n; ++i) f(i, i, i);
    } else if (nb < na) {
        for (std::size_t base = 0; base < n; base += nb) {
            for (std::size_t j = 0; j < nb; ++j) f(base + j, base + j, j);
        }
    } else {
        for (std::size_t base = 0; base < n; base += na) {
            for (std::size_t j = 0; j < na; ++j) f(base + j, j, base + j);
        }
    }
}

template <class Fwd, class DA, class DB>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, DA da, DB db) {
    Shape shape = broadcast_shape(a, b, op);
    const std::size_t n = shape_numel(shape);
    const std::size_t na = a.numel();
    const std::size_t nb = b.numel();
    std::vector<double> out(n);
    const double* x = a.impl().data.data();
    const double* y = b.impl().data.data();
    for_each_broadcast(n, na, nb, [&](std::size_t i, std::size_t ix, std::size_t iy) { out[i] = fwd(x[ix], y[iy]); });
    const bool track = tracking({&a, &b});
    Impl ia = a.handle();
    Impl ib = b.handle();
    Tensor result(std::move(shape), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, ib, io, n, na, nb, da, db] {
        const double* g = io->grad.data();
        const double* x = ia->data.data();
        const double* y = ib->data.data();
        if (ia->requires_grad) {
            double* gx = grad_of(ia).data();
            for_each_broadcast(n, na, nb,
                               [&](std::size_t i, std::size_t ix, std::size_t iy) { gx[ix] += g[i] * da(x[ix], y[iy]); });
        }
        if (ib->requires_grad) {
            double* gy = grad_of(ib).data();
            for_each_broadcast(n, na, nb,
                               [&](std::size_t i, std::size_t ix, std::size_t iy) { gy[iy] += g[i] * db(x[ix], y[iy]); });
        }
    });
}

// Element-wise map whose derivative is expressed through input and output.
template <class Fwd, class Deriv>
Tensor unary(const Tensor& a, Fwd fwd, Deriv deriv) {
    std::vector<double> out(a.numel());
    const auto& x = a.impl().data;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(x[i]);
    const bool track = tracking({&a});
    Impl ia = a.handle();
    Tensor result(a.shape(), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, io, deriv] {
        auto& gx = grad_of(ia);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += io->grad[i] * deriv(ia->data[i], io->data[i]);
    });
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(op) + " expects rank " + std::to_string(rank) + ", got shape " +
                         shape_str(t.shape()));
    }
}

struct AxisSplit {
    std::size_t outer = 1;
    std::size_t len = 1;
    std::size_t inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
    AxisSplit out;
    for (std::size_t i = 0; i < axis; ++i) out.outer *= s[i];
    out.len = s[axis];
    for (std::size_t i = axis + 1; i < s.size(); ++i) out.inner *= s[i];
    return out;
}

Tensor reduce(const Tensor& a, std::size_t axis, double factor) {
    if (axis >= a.rank()) {
        throw ShapeError("reduction axis " + std::to_string(axis) + " out of range for " + shape_str(a.shape()));
    }
    const AxisSplit s = split_at(a.shape(), axis);
    Shape shape = a.shape();
    shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
    std::vector<double> out(s.outer * s.inner, 0.0);
    const auto& x = a.impl().data;
    for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t l = 0; l < s.len; ++l) {
            const double* src = &x[(o * s.len + l) * s.inner];
            double* dst = &out[o * s.inner];
            for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
        }
    }
    for (double& v : out) v *= factor;
    const bool track = tracking({&a});
    Impl ia = a.handle();
    Tensor result(std::move(shape), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, io, s, factor] {
        auto& gx = grad_of(ia);
        for (std::size_t o = 0; o < s.outer; ++o) {
            for (std::size_t l = 0; l < s.len; ++l) {
                double* dst = &gx[(o * s.len + l) * s.inner];
                const double* src = &io->grad[o * s.inner];
                for (std::size_t i = 0; i < s.inner; ++i) dst[i] += factor * src[i];
            }
        }
    });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return binary(
        a, b, "add", [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
        [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary(
        a, b, "sub", [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
        [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary(
        a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y) { return y; },
        [](double x, double) { return x; });
}

Tensor scale(const Tensor& a, double factor) {
    return unary(
        a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double value) {
    return unary(
        a, [value](double x) { return x + value; }, [](double, double) { return 1.0; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    if (a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " @ " + shape_str(b.shape()));
    }
    const auto m = static_cast<Eigen::Index>(a.dim(0));
    const auto k = static_cast<Eigen::Index>(a.dim(1));
    const auto n = static_cast<Eigen::Index>(b.dim(1));
    std::vector<double> out(static_cast<std::size_t>(m * n));
    MutMap(out.data(), m, n).noalias() = ConstMap(a.impl().data.data(), m, k) * ConstMap(b.impl().data.data(), k, n);
    const bool track = tracking({&a, &b});
    Impl ia = a.handle();
    Impl ib = b.handle();
    Tensor result({a.dim(0), b.dim(1)}, std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, ib, io, m, k, n] {
        ConstMap g(io->grad.data(), m, n);
        if (ia->requires_grad) {
            MutMap(grad_of(ia).data(), m, k).noalias() += g * ConstMap(ib->data.data(), k, n).transpose();
        }
        if (ib->requires_grad) {
            MutMap(grad_of(ib).data(), k, n).noalias() += ConstMap(ia->data.data(), m, k).transpose() * g;
        }
    });
}

Tensor transpose(const Tensor& a) {
    require_rank(a, 2, "transpose");
    const auto r = static_cast<Eigen::Index>(a.dim(0));
    const auto c = static_cast<Eigen::Index>(a.dim(1));
    std::vector<double> out(a.numel());
    MutMap(out.data(), c, r) = ConstMap(a.impl().data.data(), r, c).transpose();
    const bool track = tracking({&a});
    Impl ia = a.handle();
    Tensor result({a.dim(1), a.dim(0)}, std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, io, r, c] {
        MutMap(grad_of(ia).data(), r, c) += ConstMap(io->grad.data(), c, r).transpose();
    });
}

Tensor tanh(const Tensor& a) {
    return unary(
        a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
    return unary(
        a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(
        a,
        [](double x) {
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor softmax(const Tensor& a) {
    if (a.rank() == 0) throw ShapeError("softmax needs at least one axis");
    const std::size_t len = a.shape().back();
    if (len == 0) throw ShapeError("softmax over an empty axis");
    const std::size_t rows = a.numel() / len;
    std::vector<double> out(a.numel());
    const auto& x = a.impl().data;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* src = &x[r * len];
        double* dst = &out[r * len];
        const double mx = *std::max_element(src, src + len);
        double total = 0.0;
        for (std::size_t i = 0; i < len; ++i) total += dst[i] = std::exp(src[i] - mx);
        for (std::size_t i = 0; i < len; ++i) dst[i] /= total;
    }
    const bool track = tracking({&a});
    Impl ia = a.handle();
    Tensor result(a.shape(), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, io, rows, len] {
        auto& gx = grad_of(ia);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* y = &io->data[r * len];
            const double* g = &io->grad[r * len];
            double dot = 0.0;
            for (std::size_t i = 0; i < len; ++i) dot += g[i] * y[i];
            for (std::size_t i = 0; i < len; ++i) gx[r * len + i] += y[i] * (g[i] - dot);
        }
    });
}

Tensor sum(const Tensor& a, std::size_t axis) { return reduce(a, axis, 1.0); }

Tensor mean(const Tensor& a, std::size_t axis) {
    const std::size_t len = a.dim(axis);
    if (len == 0) throw ShapeError("mean over an empty axis");
    return reduce(a, axis, 1.0 / static_cast<double>(len));
}

Tensor sum_all(const Tensor& a) { return sum(reshape(a, {a.numel()}), 0); }

Tensor reshape(const Tensor& a, Shape shape) {
    if (shape_numel(shape) != a.numel()) {
        throw ShapeError("reshape " + shape_str(a.shape()) + " -> " + shape_str(shape) + " changes element count");
    }
    const bool track = tracking({&a});
    Impl ia = a.handle();
    Tensor result(std::move(shape), a.impl().data);
    Impl io = result.handle();
    return finish(result, track, [ia, io] {
        auto& gx = grad_of(ia);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += io->grad[i];
    });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
    if (parts.empty()) throw ShapeError("concat of zero tensors");
    const Shape& first = parts[0].shape();
    if (axis >= first.size()) {
        throw ShapeError("concat axis " + std::to_string(axis) + " out of range for " + shape_str(first));
    }
    Shape shape = first;
    shape[axis] = 0;
    for (const Tensor& p : parts) {
        Shape a = p.shape();
        Shape b = first;
        if (a.size() != b.size()) throw ShapeError("concat: " + shape_str(a) + " vs " + shape_str(b));
        a[axis] = b[axis] = 0;
        if (a != b) throw ShapeError("concat: " + shape_str(p.shape()) + " vs " + shape_str(first));
        shape[axis] += p.dim(axis);
    }
    const AxisSplit s = split_at(shape, axis);
    std::vector<double> out(shape_numel(shape));
    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (const Tensor& p : parts) {
        offsets.push_back(off);
        const std::size_t chunk = p.dim(axis) * s.inner;
        for (std::size_t o = 0; o < s.outer; ++o) {
            std::copy_n(&p.impl().data[o * chunk], chunk, &out[o * s.len * s.inner + off]);
        }
        off += chunk;
    }
    bool track = false;
    for (const Tensor& p : parts) track = track || tracking({&p});
    std::vector<Impl> inputs;
    for (const Tensor& p : parts) inputs.push_back(p.handle());
    Tensor result(std::move(shape), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [inputs, offsets, io, s, axis] {
        for (std::size_t p = 0; p < inputs.size(); ++p) {
            if (!inputs[p]->requires_grad) continue;
            auto& gx = grad_of(inputs[p]);
            const std::size_t chunk = inputs[p]->shape[axis] * s.inner;
            for (std::size_t o = 0; o < s.outer; ++o) {
                const double* src = &io->grad[o * s.len * s.inner + offsets[p]];
                for (std::size_t i = 0; i < chunk; ++i) gx[o * chunk + i] += src[i];
            }
        }
    });
}

Tensor stack(std::span<const Tensor> parts, std::size_t axis) {
    std::vector<Tensor> expanded;
    expanded.reserve(parts.size());
    for (const Tensor& p : parts) {
        if (axis > p.rank()) throw ShapeError("stack axis " + std::to_string(axis) + " out of range");
        Shape s = p.shape();
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(axis), 1);
        expanded.push_back(reshape(p, std::move(s)));
    }
    return concat(expanded, axis);
}

Tensor slice_last(const Tensor& a, std::size_t begin, std::size_t end) {
    if (a.rank() == 0 || begin > end || end > a.shape().back()) {
        throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(end) + ") of shape " +
                         shape_str(a.shape()));
    }
    const std::size_t len = a.shape().back();
    const std::size_t width = end - begin;
    const std::size_t rows = len == 0 ? 0 : a.numel() / len;
    Shape shape = a.shape();
    shape.back() = width;
    std::vector<double> out(rows * width);
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(&a.impl().data[r * len + begin], width, &out[r * width]);
    }
    const bool track = tracking({&a});
    Impl ia = a.handle();
    Tensor result(std::move(shape), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ia, io, rows, len, width, begin] {
        auto& gx = grad_of(ia);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < width; ++i) gx[r * len + begin + i] += io->grad[r * width + i];
        }
    });
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> indices) {
    require_rank(table, 2, "embedding_lookup");
    const std::size_t rows = table.dim(0);
    const std::size_t k = table.dim(1);
    std::vector<double> out(indices.size() * k);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows) {
            throw ShapeError("embedding index " + std::to_string(indices[i]) + " outside table of " +
                             std::to_string(rows) + " rows");
        }
        std::copy_n(&table.impl().data[indices[i] * k], k, &out[i * k]);
    }
    const bool track = tracking({&table});
    Impl it = table.handle();
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    Tensor result({indices.size(), k}, std::move(out));
    Impl io = result.handle();
    return finish(result, track, [it, io, idx, k] {
        auto& gx = grad_of(it);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = 0; j < k; ++j) gx[idx[i] * k + j] += io->grad[i * k + j];
        }
    });
}

Tensor dropout(const Tensor& a, double p, std::mt19937_64& rng) {
    if (p < 0.0 || p >= 1.0) throw ParameterError("dropout probability must lie in [0, 1), got " + std::to_string(p));
    if (p == 0.0) return a;
    std::bernoulli_distribution keep(1.0 - p);
    std::vector<double> mask(a.numel());
    for (double& m : mask) m = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
    return mul(a, Tensor(a.shape(), std::move(mask)));
}

Tensor feature_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps, NormAxis axis) {
    require_rank(x, 2, "feature_norm");
    const std::size_t n = x.dim(0);
    const std::size_t k = x.dim(1);
    if (k == 0) throw ShapeError("feature_norm needs at least one feature column");
    if (gain.numel() != k || bias.numel() != k) {
        throw ShapeError("feature_norm: gain " + shape_str(gain.shape()) + " and bias " + shape_str(bias.shape()) +
                         " must have " + std::to_string(k) + " entries");
    }
    const bool rows = axis == NormAxis::Row;
    const std::size_t groups = rows ? n : k;
    const std::size_t len = rows ? k : n;
    if (len == 0) throw ShapeError("feature_norm over an empty group");
    auto index = [rows, k](std::size_t g, std::size_t i) { return rows ? g * k + i : i * k + g; };
    auto feature = [rows](std::size_t g, std::size_t i) { return rows ? i : g; };

    std::vector<double> xhat(x.numel());
    std::vector<double> inv_std(groups);
    std::vector<double> out(x.numel());
    const auto& xs = x.impl().data;
    const auto& gs = gain.impl().data;
    const auto& bs = bias.impl().data;
    for (std::size_t g = 0; g < groups; ++g) {
        double mu = 0.0;
        for (std::size_t i = 0; i < len; ++i) mu += xs[index(g, i)];
        mu /= static_cast<double>(len);
        double var = 0.0;
        for (std::size_t i = 0; i < len; ++i) var += (xs[index(g, i)] - mu) * (xs[index(g, i)] - mu);
        var /= static_cast<double>(len);
        inv_std[g] = 1.0 / std::sqrt(var + eps);
        for (std::size_t i = 0; i < len; ++i) {
            const std::size_t at = index(g, i);
            xhat[at] = (xs[at] - mu) * inv_std[g];
            out[at] = xhat[at] * gs[feature(g, i)] + bs[feature(g, i)];
        }
    }
    const bool track = tracking({&x, &gain, &bias});
    Impl ix = x.handle();
    Impl ig = gain.handle();
    Impl ib = bias.handle();
    Tensor result(x.shape(), std::move(out));
    Impl io = result.handle();
    return finish(result, track, [ix, ig, ib, io, xhat, inv_std, groups, len, index, feature] {
        const auto& dy = io->grad;
        const double l = static_cast<double>(len);
        std::vector<double> dxhat(len);
        for (std::size_t g = 0; g < groups; ++g) {
            double s1 = 0.0;
            double s2 = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                const std::size_t at = index(g, i);
                const std::size_t f = feature(g, i);
                if (ig->requires_grad) grad_of(ig)[f] += dy[at] * xhat[at];
                if (ib->requires_grad) grad_of(ib)[f] += dy[at];
                dxhat[i] = dy[at] * ig->data[f];
                s1 += dxhat[i];
                s2 += dxhat[i] * xhat[at];
            }
            if (!ix->requires_grad) continue;
            auto& gx = grad_of(ix);
            for (std::size_t i = 0; i < len; ++i) {
                const std::size_t at = index(g, i);
                gx[at] += inv_std[g] / l * (l * dxhat[i] - s1 - xhat[at] * s2);
            }
        }
    });
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
    require_rank(logits, 2, "cross_entropy");
    const std::size_t b = logits.dim(0);
    const std::size_t c = logits.dim(1);
    if (labels.size() != b) {
        throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " + std::to_string(b) +
                         " rows");
    }
    if (b == 0 || c == 0) throw ShapeError("cross_entropy on empty logits " + shape_str(logits.shape()));
    std::vector<double> probs(b * c);
    double loss = 0.0;
    const auto& z = logits.impl().data;
    for (std::size_t r = 0; r < b; ++r) {
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= c) {
            throw ShapeError("label " + std::to_string(labels[r]) + " outside " + std::to_string(c) + " classes");
        }
        const double* row = &z[r * c];
        const double mx = *std::max_element(row, row + c);
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) total += probs[r * c + j] = std::exp(row[j] - mx);
        for (std::size_t j = 0; j < c; ++j) probs[r * c + j] /= total;
        loss -= row[labels[r]] - mx - std::log(total);
    }
    loss /= static_cast<double>(b);
    const bool track = tracking({&logits});
    Impl il = logits.handle();
    std::vector<int> ys(labels.begin(), labels.end());
    Tensor result = Tensor::scalar(loss);
    Impl io = result.handle();
    return finish(result, track, [il, io, probs, ys, b, c] {
        auto& gz = grad_of(il);
        const double g = io->grad[0] / static_cast<double>(b);
        for (std::size_t r = 0; r < b; ++r) {
            for (std::size_t j = 0; j < c; ++j) {
                const double target = static_cast<int>(j) == ys[r] ? 1.0 : 0.0;
                gz[r * c + j] += g * (probs[r * c + j] - target);
            }
        }
    });
}

}  // namespace tigt

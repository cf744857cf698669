#include <algorithm>
#include <numeric>
#include <sstream>

#include "tigt/errors.hpp"
#include "tigt/tensor.hpp"

namespace tigt {

std::size_t shape_numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? ", " : "") << shape[i];
    out << ']';
    return out.str();
}

Tensor::Tensor() : impl_(std::make_shared<TensorImpl>()) { impl_->data.assign(1, 0.0); }

Tensor::Tensor(Shape shape, std::vector<double> data) : impl_(std::make_shared<TensorImpl>()) {
    if (shape_numel(shape) != data.size()) {
        throw ShapeError("shape " + shape_str(shape) + " needs " + std::to_string(shape_numel(shape)) +
                         " values, got " + std::to_string(data.size()));
    }
    impl_->shape = std::move(shape);
    impl_->data = std::move(data);
}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::parameter(Shape shape, std::vector<double> data) {
    Tensor t(std::move(shape), std::move(data));
    t.set_requires_grad(true);
    return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= rank()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape()));
    }
    return impl_->shape[axis];
}

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape()));
    return impl_->data[0];
}

double Tensor::at(std::size_t i, std::size_t j) const {
    if (rank() != 2 || i >= dim(0) || j >= dim(1)) {
        throw ShapeError("at(" + std::to_string(i) + ", " + std::to_string(j) + ") on shape " + shape_str(shape()));
    }
    return impl_->data[i * dim(1) + j];
}

void Tensor::set_requires_grad(bool on) {
    impl_->requires_grad = on;
    if (on && impl_->grad.size() != impl_->data.size()) impl_->grad.assign(impl_->data.size(), 0.0);
}

std::vector<double> Tensor::grad() const {
    if (impl_->grad.size() != impl_->data.size()) return std::vector<double>(impl_->data.size(), 0.0);
    return impl_->grad;
}

std::span<double> Tensor::mutable_grad() {
    if (impl_->grad.size() != impl_->data.size()) impl_->grad.assign(impl_->data.size(), 0.0);
    return impl_->grad;
}

void Tensor::zero_grad() { std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0); }

Tensor Tensor::clone() const {
    Tensor t = clone_as_constant();
    if (requires_grad()) t.set_requires_grad(true);
    return t;
}

Tensor Tensor::clone_as_constant() const { return Tensor(impl_->shape, impl_->data); }

// ---------------------------------------------------------------------------

namespace {
thread_local Tape* g_active_tape = nullptr;
}

Tape* Tape::active() { return g_active_tape; }

Tape::Scope::Scope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

Tape::Scope::~Scope() { g_active_tape = previous_; }

void Tape::record(Tensor output, BackwardFn fn) {
    if (consumed_) throw AutodiffError("tape already ran backward; call reset() before recording again");
    records_.push_back({std::move(output), std::move(fn)});
}

void Tape::backward(const Tensor& loss) {
    if (loss.numel() != 1) {
        throw AutodiffError("backward needs a scalar loss, got shape " + shape_str(loss.shape()));
    }
    if (consumed_) throw AutodiffError("backward called twice without reset(); gradients would double count");
    consumed_ = true;
    if (!loss.requires_grad()) return;
    Tensor seed = loss;
    seed.mutable_grad()[0] += 1.0;
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) it->fn();
}

void Tape::reset() {
    records_.clear();
    consumed_ = false;
}

}  // namespace tigt

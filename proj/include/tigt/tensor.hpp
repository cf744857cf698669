#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tigt {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

struct TensorImpl {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // empty until the tensor joins a backward pass
    bool requires_grad = false;
};

// Dense row-major array of doubles. Copies share storage; use clone() for a
// deep copy.
class Tensor {
public:
    Tensor();
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, double value);
    static Tensor scalar(double value);
    // Leaf with requires_grad set and a zero gradient buffer.
    static Tensor parameter(Shape shape, std::vector<double> data);

    const Shape& shape() const { return impl_->shape; }
    std::size_t rank() const { return impl_->shape.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t numel() const { return impl_->data.size(); }

    std::span<const double> data() const { return impl_->data; }
    // Direct write access, for optimizers and tests. Bypasses the tape.
    std::span<double> mutable_data() { return impl_->data; }
    double item() const;
    double at(std::size_t i, std::size_t j) const;

    bool requires_grad() const { return impl_->requires_grad; }
    void set_requires_grad(bool on);
    // Zeros when no gradient has been accumulated.
    std::vector<double> grad() const;
    std::span<double> mutable_grad();
    void zero_grad();

    Tensor clone() const;
    // Same values, cut off from any gradient history.
    Tensor detach() const { return clone_as_constant(); }

    TensorImpl& impl() const { return *impl_; }
    const std::shared_ptr<TensorImpl>& handle() const { return impl_; }

private:
    Tensor clone_as_constant() const;
    std::shared_ptr<TensorImpl> impl_;
};

// Records operations executed while it is the active tape on this thread.
// Without an active tape operations only compute values.
class Tape {
public:
    using BackwardFn = std::function<void()>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Propagates d loss / d x into every tensor recorded on this tape and
    // accumulates into the leaves. Throws AutodiffError for a non-scalar loss
    // or a second call before reset().
    void backward(const Tensor& loss);
    void reset();
    std::size_t size() const { return records_.size(); }

    static Tape* active();

    class Scope {
    public:
        explicit Scope(Tape& tape);
        ~Scope();
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        Tape* previous_;
    };

    void record(Tensor output, BackwardFn fn);

private:
    struct Record {
        Tensor output;
        BackwardFn fn;
    };
    std::vector<Record> records_;
    bool consumed_ = false;
};

// ---------------------------------------------------------------------------
// Operations. Binary element-wise ops accept equal shapes or one operand whose
// shape (ignoring leading 1s) is a trailing suffix of the other's shape.
// ---------------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);

// (m x k) @ (k x n)
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softmax(const Tensor& a);  // over the last axis

Tensor sum(const Tensor& a, std::size_t axis);
Tensor mean(const Tensor& a, std::size_t axis);
Tensor sum_all(const Tensor& a);

Tensor reshape(const Tensor& a, Shape shape);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
// Inserts a new axis at `axis` and concatenates along it.
Tensor stack(std::span<const Tensor> parts, std::size_t axis);
// Elements [begin, end) along the last axis.
Tensor slice_last(const Tensor& a, std::size_t begin, std::size_t end);

// Rows of a (V x k) table.
Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> indices);

// Inverted dropout; identity when p == 0.
Tensor dropout(const Tensor& a, double p, std::mt19937_64& rng);

enum class NormAxis { Row, Column };

// Standardises each row (Row) or each column (Column) of an n x k matrix,
// then applies gain and bias (both of length k). Variance is the population
// variance.
Tensor feature_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5,
                    NormAxis axis = NormAxis::Row);

// Mean over rows of -log softmax(logits)[label].
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);

}  // namespace tigt

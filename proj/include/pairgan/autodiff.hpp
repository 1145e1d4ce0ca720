#pragma once

// Reverse-mode automatic differentiation over dense matrices.
//
// A Tape records every primitive in execution order. Gradients are computed
// by walking the tape backwards and *recording* each vector-Jacobian product
// as further primitives on the same tape, so any gradient is itself a traced
// expression and can be differentiated again (double backprop, used by the
// R1 penalty).

#include "pairgan/matrix.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pairgan::ad {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid until the tape is cleared.
class Var {
public:
    Var() = default;

    bool valid() const noexcept { return tape_ != nullptr; }
    Tape& tape() const;
    std::size_t index() const noexcept { return index_; }

    const Matrix& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }

    friend bool operator==(const Var& a, const Var& b) noexcept {
        return a.tape_ == b.tape_ && a.index_ == b.index_;
    }

private:
    friend class Tape;
    Var(Tape* tape, std::size_t index) noexcept : tape_(tape), index_(index) {}

    Tape* tape_ = nullptr;
    std::size_t index_ = 0;
};

enum class Op : std::uint8_t {
    Variable,
    Constant,
    MatMul,
    Add,
    Sub,
    Mul,
    Div,
    Scale,
    AddScalar,
    LeakyRelu,
    Softplus,
    Sigmoid,
    Exp,
    Log,
    Sqrt,
    Square,
    Abs,
    Sum,
    SumRows,
    SumCols,
    BroadcastTo,
    LogSumExpRows,
};

const char* op_name(Op op) noexcept;

/// Gradients of a scalar with respect to a list of parameter handles.
class GradMap {
public:
    GradMap() = default;
    GradMap(std::vector<Var> params, std::vector<Matrix> grads);

    /// Gradient for `param`; throws ContractError when it was not requested.
    const Matrix& operator[](const Var& param) const;
    std::size_t size() const noexcept { return grads_.size(); }
    std::span<const Matrix> grads() const noexcept { return grads_; }
    std::vector<Matrix> release() && { return std::move(grads_); }

private:
    std::vector<Var> params_;
    std::vector<Matrix> grads_;
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Differentiable leaf.
    Var variable(Matrix value);
    /// Leaf that never receives a gradient.
    Var constant(Matrix value);

    const Matrix& value(const Var& v) const;
    Op op(const Var& v) const;
    std::size_t size() const noexcept { return nodes_.size(); }
    void clear() noexcept { nodes_.clear(); }

    /// Re-evaluates every non-leaf node from its parents, in tape order.
    void replay();

    /// Gradients of the scalar `loss` with respect to `wrt`, recorded on the
    /// tape so they can be differentiated further. Handles with no path from
    /// `wrt` to `loss` (including constants) get zero-valued constants.
    std::vector<Var> gradient(const Var& loss, std::span<const Var> wrt);

    /// Numeric gradients of `loss` with respect to `params`.
    GradMap grad(const Var& loss, std::span<const Var> params);

    // Primitive recording; use the free functions below.
    Var record(Op op, const Var& a, const Var& b = {}, double attr = 0.0, bool flag_a = false,
               bool flag_b = false, std::size_t rows = 0, std::size_t cols = 0);

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    struct Node {
        Op op = Op::Constant;
        std::size_t a = kNone;
        std::size_t b = kNone;
        double attr = 0.0;
        bool flag_a = false;
        bool flag_b = false;
        std::size_t rows = 0;
        std::size_t cols = 0;
        Matrix value;
    };

    Var push(Node node);
    Var handle(std::size_t index) noexcept { return Var(this, index); }
    void check_owned(const Var& v, const char* what) const;
    Matrix evaluate(const Node& node) const;
    void accumulate_vjp(std::size_t index, const Var& adjoint, std::vector<Var>& adjoints,
                        const std::vector<char>& relevant);

    std::vector<Node> nodes_;
};

// Elementwise binary ops broadcast a 1xN, Mx1 or 1x1 operand against MxN.
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);

Var matmul(const Var& a, const Var& b, bool transpose_a = false, bool transpose_b = false);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double offset);
Var leaky_relu(const Var& a, double slope);
Var softplus(const Var& a);
Var sigmoid(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);
Var square(const Var& a);
Var abs(const Var& a);
Var sum(const Var& a);
Var mean(const Var& a);
/// Column sums, MxN -> 1xN.
Var sum_rows(const Var& a);
/// Row sums, MxN -> Mx1.
Var sum_cols(const Var& a);
Var broadcast_to(const Var& a, std::size_t rows, std::size_t cols);
/// Sums a broadcast result back down to rows x cols.
Var reduce_to(const Var& a, std::size_t rows, std::size_t cols);
/// Row-wise log-sum-exp, MxN -> Mx1.
Var logsumexp_rows(const Var& a);

// Composites.
Var squared_l2_norm_per_row(const Var& a);
/// x_i / sqrt(|x_i|^2 + eps) per row.
Var row_l2_normalize(const Var& a, double eps = 1e-12);
/// Per-row cross-entropy of softmax(logits) against a one-hot target matrix; Mx1.
Var softmax_cross_entropy_rowwise(const Var& logits, const Matrix& one_hot);

/// (1/B) * sum_i |d f(x)_i / d x_i|^2 where f maps each row of x to one
/// scalar. The result stays differentiable with respect to everything f
/// closes over.
Var input_grad_norm(const std::function<Var(const Var&)>& net_forward, const Var& x);

}  // namespace pairgan::ad

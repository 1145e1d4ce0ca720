#include "pairgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pairgan::ad {

namespace {

struct Shape {
    std::size_t rows;
    std::size_t cols;
};

Shape broadcast_shape(const Matrix& a, const Matrix& b, const char* op) {
    auto dim = [&](std::size_t x, std::size_t y) {
        if (x == y || y == 1) return x;
        if (x == 1) return y;
        throw ContractError(std::string(op) + ": incompatible shapes " + shape_string(a) +
                            " and " + shape_string(b));
    };
    return {dim(a.rows(), b.rows()), dim(a.cols(), b.cols())};
}

template <typename F>
Matrix broadcast_apply(const Matrix& a, const Matrix& b, const char* op, F f) {
    const Shape s = broadcast_shape(a, b, op);
    Matrix out(s.rows, s.cols);
    const bool ar = a.rows() == 1, ac = a.cols() == 1;
    const bool br = b.rows() == 1, bc = b.cols() == 1;
    for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) {
            out(r, c) = f(a(ar ? 0 : r, ac ? 0 : c), b(br ? 0 : r, bc ? 0 : c));
        }
    }
    return out;
}

template <typename F>
Matrix map(const Matrix& a, F f) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

double stable_softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

const char* op_name(Op op) noexcept {
    switch (op) {
        case Op::Variable: return "variable";
        case Op::Constant: return "constant";
        case Op::MatMul: return "matmul";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::Scale: return "scale";
        case Op::AddScalar: return "add_scalar";
        case Op::LeakyRelu: return "leaky_relu";
        case Op::Softplus: return "softplus";
        case Op::Sigmoid: return "sigmoid";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        case Op::Square: return "square";
        case Op::Abs: return "abs";
        case Op::Sum: return "sum";
        case Op::SumRows: return "sum_rows";
        case Op::SumCols: return "sum_cols";
        case Op::BroadcastTo: return "broadcast_to";
        case Op::LogSumExpRows: return "logsumexp_rows";
    }
    return "?";
}

Tape& Var::tape() const {
    if (!tape_) throw ContractError("Var: null handle");
    return *tape_;
}

const Matrix& Var::value() const { return tape().value(*this); }

GradMap::GradMap(std::vector<Var> params, std::vector<Matrix> grads)
    : params_(std::move(params)), grads_(std::move(grads)) {}

const Matrix& GradMap::operator[](const Var& param) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i] == param) return grads_[i];
    }
    throw ContractError("GradMap: parameter was not requested");
}

Var Tape::variable(Matrix value) {
    Node n;
    n.op = Op::Variable;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::constant(Matrix value) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return handle(nodes_.size() - 1);
}

void Tape::check_owned(const Var& v, const char* what) const {
    if (!v.valid() || &v.tape() != this || v.index() >= nodes_.size()) {
        throw ContractError(std::string(what) + ": handle does not belong to this tape");
    }
}

const Matrix& Tape::value(const Var& v) const {
    check_owned(v, "value");
    return nodes_[v.index()].value;
}

Op Tape::op(const Var& v) const {
    check_owned(v, "op");
    return nodes_[v.index()].op;
}

Var Tape::record(Op op, const Var& a, const Var& b, double attr, bool flag_a, bool flag_b,
                 std::size_t rows, std::size_t cols) {
    check_owned(a, op_name(op));
    Node n;
    n.op = op;
    n.a = a.index();
    if (b.valid()) {
        check_owned(b, op_name(op));
        n.b = b.index();
    }
    n.attr = attr;
    n.flag_a = flag_a;
    n.flag_b = flag_b;
    n.rows = rows;
    n.cols = cols;
    n.value = evaluate(n);
    return push(std::move(n));
}

Matrix Tape::evaluate(const Node& n) const {
    if (n.op == Op::Variable || n.op == Op::Constant) return n.value;
    const Matrix& a = nodes_[n.a].value;
    switch (n.op) {
        case Op::Variable:
        case Op::Constant:
            return n.value;
        case Op::MatMul:
            return pairgan::matmul(a, nodes_[n.b].value, n.flag_a, n.flag_b);
        case Op::Add:
            return broadcast_apply(a, nodes_[n.b].value, "add",
                                   [](double x, double y) { return x + y; });
        case Op::Sub:
            return broadcast_apply(a, nodes_[n.b].value, "sub",
                                   [](double x, double y) { return x - y; });
        case Op::Mul:
            return broadcast_apply(a, nodes_[n.b].value, "mul",
                                   [](double x, double y) { return x * y; });
        case Op::Div:
            return broadcast_apply(a, nodes_[n.b].value, "div",
                                   [](double x, double y) { return x / y; });
        case Op::Scale: {
            const double c = n.attr;
            return map(a, [c](double x) { return c * x; });
        }
        case Op::AddScalar: {
            const double c = n.attr;
            return map(a, [c](double x) { return x + c; });
        }
        case Op::LeakyRelu: {
            const double slope = n.attr;
            return map(a, [slope](double x) { return x > 0.0 ? x : slope * x; });
        }
        case Op::Softplus:
            return map(a, stable_softplus);
        case Op::Sigmoid:
            return map(a, stable_sigmoid);
        case Op::Exp:
            return map(a, [](double x) { return std::exp(x); });
        case Op::Log:
            return map(a, [](double x) { return std::log(x); });
        case Op::Sqrt:
            return map(a, [](double x) { return std::sqrt(x); });
        case Op::Square:
            return map(a, [](double x) { return x * x; });
        case Op::Abs:
            return map(a, [](double x) { return std::abs(x); });
        case Op::Sum: {
            double s = 0.0;
            for (double v : a.values()) s += v;
            return Matrix::scalar(s);
        }
        case Op::SumRows: {
            Matrix out(1, a.cols());
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t c = 0; c < a.cols(); ++c) out(0, c) += a(r, c);
            return out;
        }
        case Op::SumCols: {
            Matrix out(a.rows(), 1);
            for (std::size_t r = 0; r < a.rows(); ++r) {
                double s = 0.0;
                for (double v : a.row(r)) s += v;
                out(r, 0) = s;
            }
            return out;
        }
        case Op::BroadcastTo: {
            if ((a.rows() != n.rows && a.rows() != 1) || (a.cols() != n.cols && a.cols() != 1)) {
                throw ContractError("broadcast_to: cannot broadcast " + shape_string(a) + " to [" +
                                    std::to_string(n.rows) + "x" + std::to_string(n.cols) + "]");
            }
            return broadcast_apply(a, Matrix(n.rows, n.cols), "broadcast_to",
                                   [](double x, double) { return x; });
        }
        case Op::LogSumExpRows: {
            Matrix out(a.rows(), 1);
            for (std::size_t r = 0; r < a.rows(); ++r) {
                const auto row = a.row(r);
                const double m = *std::max_element(row.begin(), row.end());
                double s = 0.0;
                for (double v : row) s += std::exp(v - m);
                out(r, 0) = m + std::log(s);
            }
            return out;
        }
    }
    throw ContractError("evaluate: unknown op");
}

void Tape::replay() {
    for (auto& node : nodes_) {
        if (node.op == Op::Variable || node.op == Op::Constant) continue;
        node.value = evaluate(node);
    }
}

void Tape::accumulate_vjp(std::size_t index, const Var& g, std::vector<Var>& adjoints,
                          const std::vector<char>& relevant) {
    // Copy what we need: recording below may reallocate nodes_.
    const Op op = nodes_[index].op;
    const std::size_t ia = nodes_[index].a;
    const std::size_t ib = nodes_[index].b;
    const double attr = nodes_[index].attr;
    const bool ta = nodes_[index].flag_a;
    const bool tb = nodes_[index].flag_b;

    const Var out = handle(index);
    const Var a = ia == kNone ? Var{} : handle(ia);
    const Var b = ib == kNone ? Var{} : handle(ib);
    const bool need_a = ia != kNone && relevant[ia];
    const bool need_b = ib != kNone && relevant[ib];

    auto add_to = [&](std::size_t target, const Var& contribution) {
        Var& slot = adjoints[target];
        slot = slot.valid() ? slot + contribution : contribution;
    };
    auto reduced = [&](const Var& v, std::size_t target) {
        const Matrix& t = nodes_[target].value;
        return reduce_to(v, t.rows(), t.cols());
    };

    switch (op) {
        case Op::Variable:
        case Op::Constant:
            return;
        case Op::MatMul:
            if (need_a) {
                Var ga;
                if (!ta && !tb) ga = matmul(g, b, false, true);
                else if (ta && !tb) ga = matmul(b, g, false, true);
                else if (!ta && tb) ga = matmul(g, b, false, false);
                else ga = matmul(b, g, true, true);
                add_to(ia, ga);
            }
            if (need_b) {
                Var gb;
                if (!ta && !tb) gb = matmul(a, g, true, false);
                else if (ta && !tb) gb = matmul(a, g, false, false);
                else if (!ta && tb) gb = matmul(g, a, true, false);
                else gb = matmul(g, a, true, true);
                add_to(ib, gb);
            }
            return;
        case Op::Add:
            if (need_a) add_to(ia, reduced(g, ia));
            if (need_b) add_to(ib, reduced(g, ib));
            return;
        case Op::Sub:
            if (need_a) add_to(ia, reduced(g, ia));
            if (need_b) add_to(ib, scale(reduced(g, ib), -1.0));
            return;
        case Op::Mul:
            if (need_a) add_to(ia, reduced(g * b, ia));
            if (need_b) add_to(ib, reduced(g * a, ib));
            return;
        case Op::Div:
            if (need_a) add_to(ia, reduced(g / b, ia));
            if (need_b) add_to(ib, scale(reduced((g * out) / b, ib), -1.0));
            return;
        case Op::Scale:
            if (need_a) add_to(ia, scale(g, attr));
            return;
        case Op::AddScalar:
            if (need_a) add_to(ia, g);
            return;
        case Op::LeakyRelu: {
            if (!need_a) return;
            // Piecewise linear: the local slope is a constant, so second
            // derivatives through this op vanish.
            const Matrix& x = nodes_[ia].value;
            Matrix mask(x.rows(), x.cols());
            for (std::size_t i = 0; i < x.size(); ++i) mask[i] = x[i] > 0.0 ? 1.0 : attr;
            add_to(ia, g * constant(std::move(mask)));
            return;
        }
        case Op::Softplus:
            if (need_a) add_to(ia, g * sigmoid(a));
            return;
        case Op::Sigmoid:
            if (need_a) add_to(ia, g * (out * add_scalar(scale(out, -1.0), 1.0)));
            return;
        case Op::Exp:
            if (need_a) add_to(ia, g * out);
            return;
        case Op::Log:
            if (need_a) add_to(ia, g / a);
            return;
        case Op::Sqrt:
            if (need_a) add_to(ia, scale(g, 0.5) / out);
            return;
        case Op::Square:
            if (need_a) add_to(ia, g * scale(a, 2.0));
            return;
        case Op::Abs: {
            if (!need_a) return;
            const Matrix& x = nodes_[ia].value;
            Matrix sign(x.rows(), x.cols());
            for (std::size_t i = 0; i < x.size(); ++i)
                sign[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
            add_to(ia, g * constant(std::move(sign)));
            return;
        }
        case Op::Sum:
        case Op::SumRows:
        case Op::SumCols:
            if (need_a) {
                const Matrix& x = nodes_[ia].value;
                add_to(ia, broadcast_to(g, x.rows(), x.cols()));
            }
            return;
        case Op::BroadcastTo:
            if (need_a) add_to(ia, reduced(g, ia));
            return;
        case Op::LogSumExpRows:
            // d lse / d a = softmax(a) = exp(a - lse).
            if (need_a) add_to(ia, g * exp(a - out));
            return;
    }
}

std::vector<Var> Tape::gradient(const Var& loss, std::span<const Var> wrt) {
    check_owned(loss, "gradient");
    for (const auto& w : wrt) check_owned(w, "gradient");
    const std::size_t root = loss.index();
    if (!nodes_[root].value.same_shape(Matrix(1, 1))) {
        throw ContractError("gradient: loss must be scalar, got " +
                            shape_string(nodes_[root].value));
    }

    // A node is relevant when some requested handle flows into it.
    std::vector<char> relevant(root + 1, 0);
    for (const auto& w : wrt) {
        if (w.index() <= root && nodes_[w.index()].op != Op::Constant) relevant[w.index()] = 1;
    }
    for (std::size_t i = 0; i <= root; ++i) {
        if (relevant[i]) continue;
        const Node& n = nodes_[i];
        if ((n.a != kNone && relevant[n.a]) || (n.b != kNone && relevant[n.b])) relevant[i] = 1;
    }

    std::vector<Var> adjoints(root + 1);
    if (relevant[root]) adjoints[root] = constant(Matrix::scalar(1.0));
    for (std::size_t i = root + 1; i-- > 0;) {
        if (!relevant[i] || !adjoints[i].valid()) continue;
        const Var g = adjoints[i];
        accumulate_vjp(i, g, adjoints, relevant);
    }

    std::vector<Var> out;
    out.reserve(wrt.size());
    for (const auto& w : wrt) {
        if (w.index() <= root && adjoints[w.index()].valid()) {
            out.push_back(adjoints[w.index()]);
        } else {
            const Matrix& v = nodes_[w.index()].value;
            out.push_back(constant(Matrix(v.rows(), v.cols())));
        }
    }
    return out;
}

GradMap Tape::grad(const Var& loss, std::span<const Var> params) {
    for (const auto& p : params) {
        check_owned(p, "grad");
        if (nodes_[p.index()].op != Op::Variable && nodes_[p.index()].op != Op::Constant) {
            throw ContractError("grad: parameter handle is not a leaf");
        }
    }
    std::vector<Var> grads = gradient(loss, params);
    std::vector<Matrix> values;
    values.reserve(grads.size());
    for (const auto& g : grads) values.push_back(value(g));
    return GradMap(std::vector<Var>(params.begin(), params.end()), std::move(values));
}

// --- primitives ------------------------------------------------------------

Var operator+(const Var& a, const Var& b) { return a.tape().record(Op::Add, a, b); }
Var operator-(const Var& a, const Var& b) { return a.tape().record(Op::Sub, a, b); }
Var operator*(const Var& a, const Var& b) { return a.tape().record(Op::Mul, a, b); }
Var operator/(const Var& a, const Var& b) { return a.tape().record(Op::Div, a, b); }

Var matmul(const Var& a, const Var& b, bool transpose_a, bool transpose_b) {
    return a.tape().record(Op::MatMul, a, b, 0.0, transpose_a, transpose_b);
}
Var scale(const Var& a, double factor) { return a.tape().record(Op::Scale, a, {}, factor); }
Var add_scalar(const Var& a, double offset) {
    return a.tape().record(Op::AddScalar, a, {}, offset);
}
Var leaky_relu(const Var& a, double slope) {
    return a.tape().record(Op::LeakyRelu, a, {}, slope);
}
Var softplus(const Var& a) { return a.tape().record(Op::Softplus, a); }
Var sigmoid(const Var& a) { return a.tape().record(Op::Sigmoid, a); }
Var exp(const Var& a) { return a.tape().record(Op::Exp, a); }
Var log(const Var& a) { return a.tape().record(Op::Log, a); }
Var sqrt(const Var& a) { return a.tape().record(Op::Sqrt, a); }
Var square(const Var& a) { return a.tape().record(Op::Square, a); }
Var abs(const Var& a) { return a.tape().record(Op::Abs, a); }
Var sum(const Var& a) { return a.tape().record(Op::Sum, a); }
Var mean(const Var& a) {
    const std::size_t n = a.value().size();
    if (n == 0) throw ContractError("mean: empty input");
    return scale(sum(a), 1.0 / static_cast<double>(n));
}
Var sum_rows(const Var& a) { return a.tape().record(Op::SumRows, a); }
Var sum_cols(const Var& a) { return a.tape().record(Op::SumCols, a); }
Var broadcast_to(const Var& a, std::size_t rows, std::size_t cols) {
    if (a.rows() == rows && a.cols() == cols) return a;
    return a.tape().record(Op::BroadcastTo, a, {}, 0.0, false, false, rows, cols);
}
Var reduce_to(const Var& a, std::size_t rows, std::size_t cols) {
    Var out = a;
    if (out.rows() != rows) {
        if (rows != 1) {
            throw ContractError("reduce_to: cannot reduce " + shape_string(a.value()) + " to " +
                                std::to_string(rows) + " rows");
        }
        out = sum_rows(out);
    }
    if (out.cols() != cols) {
        if (cols != 1) {
            throw ContractError("reduce_to: cannot reduce " + shape_string(a.value()) + " to " +
                                std::to_string(cols) + " cols");
        }
        out = sum_cols(out);
    }
    return out;
}
Var logsumexp_rows(const Var& a) { return a.tape().record(Op::LogSumExpRows, a); }

Var squared_l2_norm_per_row(const Var& a) { return sum_cols(square(a)); }

Var row_l2_normalize(const Var& a, double eps) {
    return a / sqrt(add_scalar(squared_l2_norm_per_row(a), eps));
}

Var softmax_cross_entropy_rowwise(const Var& logits, const Matrix& one_hot) {
    if (!logits.value().same_shape(one_hot)) {
        throw ContractError("softmax_cross_entropy_rowwise: logits " +
                            shape_string(logits.value()) + " vs targets " +
                            shape_string(one_hot));
    }
    Tape& tape = logits.tape();
    const Var picked = sum_cols(logits * tape.constant(one_hot));
    return logsumexp_rows(logits) - picked;
}

Var input_grad_norm(const std::function<Var(const Var&)>& net_forward, const Var& x) {
    Tape& tape = x.tape();
    if (tape.op(x) != Op::Variable) {
        throw ContractError("input_grad_norm: input must be a differentiable leaf");
    }
    const Var scores = net_forward(x);
    if (scores.cols() != 1 || scores.rows() != x.rows()) {
        throw ContractError("input_grad_norm: expected one scalar per row, got " +
                            shape_string(scores.value()) + " for input " +
                            shape_string(x.value()));
    }
    const Var x_handle[] = {x};
    const Var grad_x = tape.gradient(sum(scores), x_handle).front();
    return scale(sum(square(grad_x)), 1.0 / static_cast<double>(x.rows()));
}

}  // namespace pairgan::ad

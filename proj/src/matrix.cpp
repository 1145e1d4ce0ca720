#include "pairgan/matrix.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace pairgan {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ContractError("Matrix: data length " + std::to_string(data_.size()) +
                            " does not match shape " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ContractError("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double Matrix::item() const {
    if (rows_ != 1 || cols_ != 1) {
        throw ContractError("Matrix::item on non-scalar " + shape_string(*this));
    }
    return data_[0];
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string shape_string(const Matrix& m) {
    return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

Matrix matmul(const Matrix& a, const Matrix& b, bool transpose_a, bool transpose_b) {
    const std::size_t m = transpose_a ? a.cols() : a.rows();
    const std::size_t ka = transpose_a ? a.rows() : a.cols();
    const std::size_t kb = transpose_b ? b.cols() : b.rows();
    const std::size_t n = transpose_b ? b.rows() : b.cols();
    if (ka != kb) {
        throw ContractError("matmul: inner dimensions differ for " + shape_string(a) +
                            (transpose_a ? "^T" : "") + " and " + shape_string(b) +
                            (transpose_b ? "^T" : ""));
    }
    Matrix out(m, n);
    if (m == 0 || n == 0) return out;
    if (ka == 0) return out;
    ConstMap ea(a.values().data(), static_cast<Eigen::Index>(a.rows()),
                static_cast<Eigen::Index>(a.cols()));
    ConstMap eb(b.values().data(), static_cast<Eigen::Index>(b.rows()),
                static_cast<Eigen::Index>(b.cols()));
    MutMap eo(out.values().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    if (!transpose_a && !transpose_b) {
        eo.noalias() = ea * eb;
    } else if (transpose_a && !transpose_b) {
        eo.noalias() = ea.transpose() * eb;
    } else if (!transpose_a && transpose_b) {
        eo.noalias() = ea * eb.transpose();
    } else {
        eo.noalias() = ea.transpose() * eb.transpose();
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ContractError("max_abs_diff: " + shape_string(a) + " vs " + shape_string(b));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace pairgan

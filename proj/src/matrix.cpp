#include "chnnet/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace chn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("Matrix: dimensions must be positive, got " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 0.0); }

Matrix Matrix::ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r > 0 ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw std::invalid_argument("Matrix::from_rows: ragged initializer");
        }
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

std::string Matrix::shape() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: incompatible shapes " + a.shape() + " * " +
                                    b.shape());
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix out(m, n, 0.0);
    // i-p-j order keeps both b and out rows streaming through cache.
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = a.data() + i * k;
        double* out_row = out.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a_row[p];
            const double* b_row = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) out_row[j] += aip * b_row[j];
        }
    }
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("hadamard: shape mismatch " + a.shape() + " vs " +
                                    b.shape());
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.at_index(k) = a.at_index(k) * b.at_index(k);
    return out;
}

Matrix add_bias(const Matrix& z, const Matrix& bias) {
    if (bias.cols() != 1 || bias.rows() != z.rows()) {
        throw std::invalid_argument("add_bias: bias " + bias.shape() +
                                    " does not broadcast over " + z.shape());
    }
    Matrix out(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const double bi = bias(i, 0);
        for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) = z(i, j) + bi;
    }
    return out;
}

Matrix row_sum(const Matrix& a) {
    Matrix out(a.rows(), 1, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j);
        out(i, 0) = s;
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("operator+: shape mismatch " + a.shape() + " vs " +
                                    b.shape());
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.at_index(k) = a.at_index(k) + b.at_index(k);
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("operator-: shape mismatch " + a.shape() + " vs " +
                                    b.shape());
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.at_index(k) = a.at_index(k) - b.at_index(k);
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.at_index(k) = s * a.at_index(k);
    return out;
}

bool all_finite(const Matrix& a) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!std::isfinite(a.at_index(k))) return false;
    }
    return true;
}

}  // namespace chn

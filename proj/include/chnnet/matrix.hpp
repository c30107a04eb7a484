#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace chn {

// Dense row-major matrix of doubles. Column-vector convention throughout:
// rows index neurons, columns index batch samples.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix zeros(std::size_t rows, std::size_t cols);
    static Matrix ones(std::size_t rows, std::size_t cols);
    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double& at_index(std::size_t k) { return data_[k]; }
    double at_index(std::size_t k) const { return data_[k]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape() const;  // e.g. "3x4"

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a (m x k) times b (k x n); throws std::invalid_argument naming both shapes.
Matrix matmul(const Matrix& a, const Matrix& b);

// Elementwise product; shapes must match.
Matrix hadamard(const Matrix& a, const Matrix& b);

// Adds the n x 1 bias column to every column of z (n x b).
Matrix add_bias(const Matrix& z, const Matrix& bias);

// Column vector of per-row sums.
Matrix row_sum(const Matrix& a);

Matrix transpose(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

bool all_finite(const Matrix& a);

}  // namespace chn

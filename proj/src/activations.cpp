#include "chnnet/activations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chn {

namespace {
constexpr double kProbFloor = 1e-12;
}

Matrix relu(const Matrix& z) {
    Matrix out(z.rows(), z.cols());
    for (std::size_t k = 0; k < z.size(); ++k) out.at_index(k) = std::max(0.0, z.at_index(k));
    return out;
}

Matrix relu_grad(const Matrix& z) {
    Matrix out(z.rows(), z.cols());
    for (std::size_t k = 0; k < z.size(); ++k) out.at_index(k) = z.at_index(k) > 0.0 ? 1.0 : 0.0;
    return out;
}

Matrix softmax(const Matrix& z) {
    Matrix out(z.rows(), z.cols());
    for (std::size_t j = 0; j < z.cols(); ++j) {
        double m = z(0, j);
        for (std::size_t i = 1; i < z.rows(); ++i) m = std::max(m, z(i, j));
        double sum = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) {
            const double e = std::exp(z(i, j) - m);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t i = 0; i < z.rows(); ++i) out(i, j) /= sum;
    }
    return out;
}

double sparse_ce_loss(const Matrix& p, const Labels& y) {
    if (y.size() != p.cols()) {
        throw std::invalid_argument("sparse_ce_loss: " + std::to_string(y.size()) +
                                    " labels for " + std::to_string(p.cols()) + " columns");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < p.cols(); ++j) {
        const int c = y.values[j];
        if (c < 0 || static_cast<std::size_t>(c) >= p.rows()) {
            throw std::invalid_argument("sparse_ce_loss: label " + std::to_string(c) +
                                        " out of range for " + std::to_string(p.rows()) +
                                        " classes");
        }
        total -= std::log(std::max(p(static_cast<std::size_t>(c), j), kProbFloor));
    }
    return total / static_cast<double>(p.cols());
}

Matrix softmax_ce_backward(const Matrix& p, const Labels& y) {
    if (y.size() != p.cols()) {
        throw std::invalid_argument("softmax_ce_backward: " + std::to_string(y.size()) +
                                    " labels for " + std::to_string(p.cols()) + " columns");
    }
    const double inv_b = 1.0 / static_cast<double>(p.cols());
    Matrix d(p.rows(), p.cols());
    for (std::size_t j = 0; j < p.cols(); ++j) {
        const int c = y.values[j];
        if (c < 0 || static_cast<std::size_t>(c) >= p.rows()) {
            throw std::invalid_argument("softmax_ce_backward: label " + std::to_string(c) +
                                        " out of range for " + std::to_string(p.rows()) +
                                        " classes");
        }
        for (std::size_t i = 0; i < p.rows(); ++i) {
            const double target = (static_cast<std::size_t>(c) == i) ? 1.0 : 0.0;
            d(i, j) = (p(i, j) - target) * inv_b;
        }
    }
    return d;
}

}  // namespace chn

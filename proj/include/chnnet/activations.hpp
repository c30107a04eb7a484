#pragma once

#include <vector>

#include "chnnet/matrix.hpp"

namespace chn {

// Integer class indices, one per batch column.
struct Labels {
    std::vector<int> values;

    std::size_t size() const { return values.size(); }
};

Matrix relu(const Matrix& z);

// Elementwise indicator z > 0; the derivative at exactly 0 is taken as 0.
Matrix relu_grad(const Matrix& z);

// Columnwise exp-normalize with max subtraction for stability.
Matrix softmax(const Matrix& z);

// Mean over the batch of -log p[y_j][j]; probabilities are clamped at 1e-12
// before the log. Throws if a label is out of range or sizes disagree.
double sparse_ce_loss(const Matrix& p, const Labels& y);

// Combined gradient of mean cross-entropy through softmax: (p - onehot(y)) / b.
// The result is the output layer's pre-activation gradient, so no activation
// derivative is ever applied at the output.
Matrix softmax_ce_backward(const Matrix& p, const Labels& y);

}  // namespace chn

#pragma once

#include <utility>

#include "chnnet/matrix.hpp"

namespace chn {

// param - lr * grad.
Matrix sgd_step(const Matrix& param, const Matrix& grad, double learning_rate);

// Per-parameter-matrix RMSprop state (plain variant: no momentum, not
// centered). Defaults follow the usual framework values since only the
// optimizer name and learning rate are prescribed.
struct OptState {
    Matrix v;  // second-moment accumulator, same shape as the parameter
    double learning_rate = 1e-4;
    double rho = 0.9;
    double epsilon = 1e-7;
};

OptState make_rmsprop_state(std::size_t rows, std::size_t cols, double learning_rate,
                            double rho = 0.9, double epsilon = 1e-7);

// v <- rho * v + (1 - rho) * grad^2;  param <- param - lr * grad / (sqrt(v) + eps).
std::pair<Matrix, OptState> rmsprop_step(const Matrix& param, const Matrix& grad,
                                         OptState state);

}  // namespace chn

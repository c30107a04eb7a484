#include "chnnet/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace chn {

Matrix sgd_step(const Matrix& param, const Matrix& grad, double learning_rate) {
    if (!param.same_shape(grad)) {
        throw std::invalid_argument("sgd_step: param " + param.shape() + " vs grad " +
                                    grad.shape());
    }
    Matrix out(param.rows(), param.cols());
    for (std::size_t k = 0; k < param.size(); ++k) {
        out.at_index(k) = param.at_index(k) - learning_rate * grad.at_index(k);
    }
    return out;
}

OptState make_rmsprop_state(std::size_t rows, std::size_t cols, double learning_rate,
                            double rho, double epsilon) {
    OptState s;
    s.v = Matrix::zeros(rows, cols);
    s.learning_rate = learning_rate;
    s.rho = rho;
    s.epsilon = epsilon;
    return s;
}

std::pair<Matrix, OptState> rmsprop_step(const Matrix& param, const Matrix& grad,
                                         OptState state) {
    if (!param.same_shape(grad) || !param.same_shape(state.v)) {
        throw std::invalid_argument("rmsprop_step: shapes param " + param.shape() + ", grad " +
                                    grad.shape() + ", state " + state.v.shape());
    }
    Matrix out(param.rows(), param.cols());
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double g = grad.at_index(k);
        const double v = state.rho * state.v.at_index(k) + (1.0 - state.rho) * g * g;
        state.v.at_index(k) = v;
        out.at_index(k) = param.at_index(k) - state.learning_rate * g / (std::sqrt(v) + state.epsilon);
    }
    return {std::move(out), std::move(state)};
}

}  // namespace chn

#pragma once

#include <cstdint>
#include <vector>

#include "chnnet/matrix.hpp"
#include "chnnet/rng.hpp"

namespace chn {

enum class LayerKind { Dense, Chn };

// Which W1/bias/upstream gradients a CHN layer propagates.
//
// Paper: treats H as a constant with respect to W1, so grad_w1 = D * A_prev^T
//        and the upstream gradient is W1^T * D. This is what the original
//        layer trains with, but it is not the derivative of the forward map.
// Exact: the true gradient of Z = (I + W2)(W1 * A_prev + B), which carries an
//        (I + W2)^T factor through the W1, bias and upstream paths.
//
// The W2 gradient D * H^T is the exact derivative either way, so it is shared.
enum class GradMode { Paper, Exact };

enum class InitScheme { Glorot, W2Zero };

struct DenseParams {
    Matrix w;  // n_out x n_in
    Matrix b;  // n_out x 1
};

struct ChnParams {
    Matrix w1;  // n_out x n_in
    Matrix w2;  // n_out x n_out, lateral connections within the layer
    Matrix b;   // n_out x 1
};

// Values saved by a forward pass for the matching backward pass.
struct LayerCache {
    Matrix a_prev;
    Matrix h;  // CHN only: the lateral input W1 * A_prev + B
    Matrix z;
    bool has_h = false;
};

struct DenseBackwardResult {
    Matrix grad_w;
    Matrix grad_b;
    Matrix d_u_prev;
};

struct ChnBackwardResult {
    Matrix grad_w1;
    Matrix grad_w2;
    Matrix grad_b;
    Matrix d_u_prev;
};

struct ForwardResult {
    Matrix z;
    LayerCache cache;
};

// z = w * a_prev + b (bias broadcast over the batch). Activation is applied
// by the network container, not here.
ForwardResult dense_forward(const DenseParams& p, const Matrix& a_prev);

// h = w1 * a_prev + b;  z = h + w2 * h. Cache keeps a_prev, h and z.
ForwardResult chn_forward(const ChnParams& p, const Matrix& a_prev);

// d carries pre-activation-gradient semantics (activation derivative already
// applied by the container).
DenseBackwardResult dense_backward(const DenseParams& p, const LayerCache& cache,
                                   const Matrix& d);

ChnBackwardResult chn_backward(const ChnParams& p, const LayerCache& cache, const Matrix& d,
                               GradMode mode);

// Glorot-uniform weights, zero bias. The W1 draw is keyed only by
// (seed, layer_index), so a dense layer and a CHN layer built from the same
// seed share their W1; W2 draws come from a separate stream.
DenseParams init_dense(std::size_t n_in, std::size_t n_out, std::uint64_t seed,
                       std::size_t layer_index);
ChnParams init_chn(std::size_t n_in, std::size_t n_out, InitScheme scheme, std::uint64_t seed,
                   std::size_t layer_index);

double glorot_limit(std::size_t fan_in, std::size_t fan_out);

// Parsed network architecture. The output layer is always dense; layer_kind
// selects what the hidden layers are.
struct ArchSpec {
    std::size_t input_width = 0;
    std::vector<std::size_t> hidden_widths;
    std::size_t output_width = 0;
    LayerKind layer_kind = LayerKind::Dense;
};

// Trainable-parameter count: sum of n_l * n_{l-1} + n_l over all non-input
// layers, plus n_l^2 per hidden layer when the hidden layers are CHN.
std::size_t param_count(const ArchSpec& arch);

}  // namespace chn

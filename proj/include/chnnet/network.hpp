#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "chnnet/activations.hpp"
#include "chnnet/layers.hpp"

namespace chn {

// Feed-forward classifier: hidden layers (dense or CHN) with ReLU, dense
// output layer with a softmax cross-entropy head. The activation lives here,
// not in the layers, so layers hand back pre-activations.
class Network {
public:
    Network(const ArchSpec& arch, GradMode mode, InitScheme scheme, std::uint64_t seed);

    const ArchSpec& arch() const { return arch_; }
    GradMode grad_mode() const { return mode_; }

    struct ForwardState {
        std::vector<LayerCache> hidden;  // one per hidden layer
        LayerCache output;
        Matrix probs;
    };

    ForwardState forward(const Matrix& x) const;
    Matrix predict(const Matrix& x) const;
    double loss(const Matrix& x, const Labels& y) const;

    // Gradients aligned with param_slots() order.
    std::vector<Matrix> backward(const ForwardState& fs, const Labels& y) const;

    struct ParamSlot {
        std::string name;  // e.g. "hidden0.w1", "hidden0.w2", "output.b"
        Matrix* value;
        bool is_w2;
    };
    std::vector<ParamSlot> param_slots();

    std::size_t trainable_param_count() const { return param_count(arch_); }

    // Smallest |pre-activation| seen in any hidden layer for this input; used
    // to keep finite-difference probes away from ReLU kinks.
    double min_abs_hidden_preactivation(const Matrix& x) const;

private:
    ArchSpec arch_;
    GradMode mode_;
    std::vector<std::variant<DenseParams, ChnParams>> hidden_;
    DenseParams output_;
};

}  // namespace chn

#include "chnnet/network.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chn {

Network::Network(const ArchSpec& arch, GradMode mode, InitScheme scheme, std::uint64_t seed)
    : arch_(arch), mode_(mode) {
    if (arch.input_width == 0 || arch.output_width == 0 || arch.hidden_widths.empty()) {
        throw std::invalid_argument("Network: architecture needs input, hidden and output widths");
    }
    std::size_t prev = arch.input_width;
    for (std::size_t l = 0; l < arch.hidden_widths.size(); ++l) {
        const std::size_t width = arch.hidden_widths[l];
        if (arch.layer_kind == LayerKind::Chn) {
            hidden_.emplace_back(init_chn(prev, width, scheme, seed, l));
        } else {
            hidden_.emplace_back(init_dense(prev, width, seed, l));
        }
        prev = width;
    }
    output_ = init_dense(prev, arch.output_width, seed, arch.hidden_widths.size());
}

Network::ForwardState Network::forward(const Matrix& x) const {
    ForwardState fs;
    fs.hidden.reserve(hidden_.size());
    Matrix a = x;
    for (const auto& layer : hidden_) {
        ForwardResult r = std::holds_alternative<ChnParams>(layer)
                              ? chn_forward(std::get<ChnParams>(layer), a)
                              : dense_forward(std::get<DenseParams>(layer), a);
        a = relu(r.z);
        fs.hidden.push_back(std::move(r.cache));
    }
    ForwardResult out = dense_forward(output_, a);
    fs.output = std::move(out.cache);
    fs.probs = softmax(out.z);
    return fs;
}

Matrix Network::predict(const Matrix& x) const { return forward(x).probs; }

double Network::loss(const Matrix& x, const Labels& y) const {
    return sparse_ce_loss(forward(x).probs, y);
}

std::vector<Matrix> Network::backward(const ForwardState& fs, const Labels& y) const {
    if (fs.hidden.size() != hidden_.size()) {
        throw std::invalid_argument("Network::backward: forward state does not match network");
    }
    std::vector<Matrix> grads;

    Matrix d = softmax_ce_backward(fs.probs, y);
    DenseBackwardResult out = dense_backward(output_, fs.output, d);
    Matrix d_u = std::move(out.d_u_prev);

    // Collect top-down, emit bottom-up at the end.
    std::vector<std::vector<Matrix>> per_layer(hidden_.size());
    for (std::size_t l = hidden_.size(); l-- > 0;) {
        const Matrix d_pre = hadamard(d_u, relu_grad(fs.hidden[l].z));
        if (std::holds_alternative<ChnParams>(hidden_[l])) {
            ChnBackwardResult r =
                chn_backward(std::get<ChnParams>(hidden_[l]), fs.hidden[l], d_pre, mode_);
            per_layer[l] = {std::move(r.grad_w1), std::move(r.grad_w2), std::move(r.grad_b)};
            d_u = std::move(r.d_u_prev);
        } else {
            DenseBackwardResult r =
                dense_backward(std::get<DenseParams>(hidden_[l]), fs.hidden[l], d_pre);
            per_layer[l] = {std::move(r.grad_w), std::move(r.grad_b)};
            d_u = std::move(r.d_u_prev);
        }
    }
    for (auto& layer_grads : per_layer) {
        for (auto& g : layer_grads) grads.push_back(std::move(g));
    }
    grads.push_back(std::move(out.grad_w));
    grads.push_back(std::move(out.grad_b));
    return grads;
}

std::vector<Network::ParamSlot> Network::param_slots() {
    std::vector<ParamSlot> slots;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const std::string prefix = "hidden" + std::to_string(l) + ".";
        if (std::holds_alternative<ChnParams>(hidden_[l])) {
            ChnParams& p = std::get<ChnParams>(hidden_[l]);
            slots.push_back({prefix + "w1", &p.w1, false});
            slots.push_back({prefix + "w2", &p.w2, true});
            slots.push_back({prefix + "b", &p.b, false});
        } else {
            DenseParams& p = std::get<DenseParams>(hidden_[l]);
            slots.push_back({prefix + "w", &p.w, false});
            slots.push_back({prefix + "b", &p.b, false});
        }
    }
    slots.push_back({"output.w", &output_.w, false});
    slots.push_back({"output.b", &output_.b, false});
    return slots;
}

double Network::min_abs_hidden_preactivation(const Matrix& x) const {
    const ForwardState fs = forward(x);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cache : fs.hidden) {
        for (std::size_t k = 0; k < cache.z.size(); ++k) {
            best = std::min(best, std::abs(cache.z.at_index(k)));
        }
    }
    return best;
}

}  // namespace chn

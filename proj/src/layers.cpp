#include "chnnet/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chn {

namespace {

void check_layer_shapes(const Matrix& w, const Matrix& b, const Matrix& a_prev,
                        const char* who) {
    if (w.cols() != a_prev.rows()) {
        throw std::invalid_argument(std::string(who) + ": weights " + w.shape() +
                                    " incompatible with input " + a_prev.shape());
    }
    if (b.cols() != 1 || b.rows() != w.rows()) {
        throw std::invalid_argument(std::string(who) + ": bias " + b.shape() +
                                    " incompatible with weights " + w.shape());
    }
}

Matrix glorot_matrix(std::size_t rows, std::size_t cols, std::size_t fan_in,
                     std::size_t fan_out, Rng& rng) {
    const double limit = glorot_limit(fan_in, fan_out);
    Matrix m(rows, cols);
    for (std::size_t k = 0; k < m.size(); ++k) m.at_index(k) = rng.next_uniform(-limit, limit);
    return m;
}

}  // namespace

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

ForwardResult dense_forward(const DenseParams& p, const Matrix& a_prev) {
    check_layer_shapes(p.w, p.b, a_prev, "dense_forward");
    ForwardResult r;
    r.z = add_bias(matmul(p.w, a_prev), p.b);
    r.cache.a_prev = a_prev;
    r.cache.z = r.z;
    return r;
}

ForwardResult chn_forward(const ChnParams& p, const Matrix& a_prev) {
    check_layer_shapes(p.w1, p.b, a_prev, "chn_forward");
    if (p.w2.rows() != p.w2.cols() || p.w2.rows() != p.w1.rows()) {
        throw std::invalid_argument("chn_forward: w2 " + p.w2.shape() +
                                    " must be square with side " +
                                    std::to_string(p.w1.rows()));
    }
    ForwardResult r;
    const Matrix h = add_bias(matmul(p.w1, a_prev), p.b);
    r.z = h + matmul(p.w2, h);
    r.cache.a_prev = a_prev;
    r.cache.h = h;
    r.cache.has_h = true;
    r.cache.z = r.z;
    return r;
}

DenseBackwardResult dense_backward(const DenseParams& p, const LayerCache& cache,
                                   const Matrix& d) {
    if (cache.a_prev.empty()) {
        throw std::invalid_argument("dense_backward: cache has no stored forward pass");
    }
    DenseBackwardResult r;
    r.grad_w = matmul(d, transpose(cache.a_prev));
    r.grad_b = row_sum(d);
    r.d_u_prev = matmul(transpose(p.w), d);
    return r;
}

ChnBackwardResult chn_backward(const ChnParams& p, const LayerCache& cache, const Matrix& d,
                               GradMode mode) {
    if (!cache.has_h) {
        throw std::invalid_argument("chn_backward: cache has no stored lateral input h");
    }
    ChnBackwardResult r;
    r.grad_w2 = matmul(d, transpose(cache.h));
    if (mode == GradMode::Paper) {
        r.grad_w1 = matmul(d, transpose(cache.a_prev));
        r.grad_b = row_sum(d);
        r.d_u_prev = matmul(transpose(p.w1), d);
    } else {
        // g = (I + w2)^T d, propagated through every path that touches h.
        const Matrix g = d + matmul(transpose(p.w2), d);
        r.grad_w1 = matmul(g, transpose(cache.a_prev));
        r.grad_b = row_sum(g);
        r.d_u_prev = matmul(transpose(p.w1), g);
    }
    return r;
}

DenseParams init_dense(std::size_t n_in, std::size_t n_out, std::uint64_t seed,
                       std::size_t layer_index) {
    if (n_in == 0 || n_out == 0) {
        throw std::invalid_argument("init_dense: widths must be positive");
    }
    Rng rng(mix_seed(seed, RngPurpose::InitW1, layer_index));
    DenseParams p;
    p.w = glorot_matrix(n_out, n_in, n_in, n_out, rng);
    p.b = Matrix::zeros(n_out, 1);
    return p;
}

ChnParams init_chn(std::size_t n_in, std::size_t n_out, InitScheme scheme, std::uint64_t seed,
                   std::size_t layer_index) {
    if (n_in == 0 || n_out == 0) {
        throw std::invalid_argument("init_chn: widths must be positive");
    }
    Rng w1_rng(mix_seed(seed, RngPurpose::InitW1, layer_index));
    ChnParams p;
    p.w1 = glorot_matrix(n_out, n_in, n_in, n_out, w1_rng);
    if (scheme == InitScheme::W2Zero) {
        p.w2 = Matrix::zeros(n_out, n_out);
    } else {
        Rng w2_rng(mix_seed(seed, RngPurpose::InitW2, layer_index));
        p.w2 = glorot_matrix(n_out, n_out, n_out, n_out, w2_rng);
    }
    p.b = Matrix::zeros(n_out, 1);
    return p;
}

std::size_t param_count(const ArchSpec& arch) {
    std::size_t total = 0;
    std::size_t prev = arch.input_width;
    for (std::size_t w : arch.hidden_widths) {
        total += w * prev + w;
        if (arch.layer_kind == LayerKind::Chn) total += w * w;
        prev = w;
    }
    total += arch.output_width * prev + arch.output_width;
    return total;
}

}  // namespace chn

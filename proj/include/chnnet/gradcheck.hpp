#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chnnet/network.hpp"

namespace chn {

struct GradCheckOptions {
    double eps = 1e-5;
    double tol = 1e-6;
    // Above this many total coordinates a seeded random sample of max_coords
    // coordinates is checked instead of every coordinate.
    std::size_t max_coords = 200;
    std::uint64_t seed = 0;
};

struct GradReport {
    struct ParamStats {
        std::string name;
        double max_rel_err = 0.0;
        double mean_rel_err = 0.0;
        std::size_t worst_index = 0;
        std::size_t checked = 0;
    };
    std::vector<ParamStats> params;

    double max_rel_err() const;
    bool within(double tol) const { return max_rel_err() <= tol; }
    std::vector<std::string> failing(double tol) const;
};

// Central difference (L(c + eps) - L(c - eps)) / (2 eps) on a single
// coordinate; the coordinate is restored afterwards. Throws on a non-finite
// loss value.
double numeric_grad(const std::function<double()>& loss_fn, double& coord, double eps);

// |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);

// Compares the network's analytic gradients on (x, y) against central finite
// differences, coordinate by coordinate.
GradReport check_network(Network& net, const Matrix& x, const Labels& y,
                         const GradCheckOptions& opt = {});

}  // namespace chn

#include "chnnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chnnet/error.hpp"
#include "chnnet/rng.hpp"

namespace chn {

double GradReport::max_rel_err() const {
    double worst = 0.0;
    for (const auto& p : params) worst = std::max(worst, p.max_rel_err);
    return worst;
}

std::vector<std::string> GradReport::failing(double tol) const {
    std::vector<std::string> names;
    for (const auto& p : params) {
        if (p.max_rel_err > tol) names.push_back(p.name);
    }
    return names;
}

double numeric_grad(const std::function<double()>& loss_fn, double& coord, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("numeric_grad: eps must be positive");
    }
    const double original = coord;
    coord = original + eps;
    const double plus = loss_fn();
    coord = original - eps;
    const double minus = loss_fn();
    coord = original;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("numeric_grad: non-finite loss during probe");
    }
    return (plus - minus) / (2.0 * eps);
}

double relative_error(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    return std::abs(analytic - numeric) / denom;
}

GradReport check_network(Network& net, const Matrix& x, const Labels& y,
                         const GradCheckOptions& opt) {
    if (y.size() == 0) {
        throw std::invalid_argument("check_network: empty probe batch");
    }
    auto slots = net.param_slots();
    const Network::ForwardState fs = net.forward(x);
    const std::vector<Matrix> analytic = net.backward(fs, y);

    std::size_t total = 0;
    for (const auto& s : slots) total += s.value->size();

    // (slot, coordinate) pairs to probe.
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    if (total <= opt.max_coords) {
        coords.reserve(total);
        for (std::size_t s = 0; s < slots.size(); ++s) {
            for (std::size_t k = 0; k < slots[s].value->size(); ++k) coords.push_back({s, k});
        }
    } else {
        Rng rng(mix_seed(opt.seed, RngPurpose::Probe));
        coords.reserve(opt.max_coords);
        for (std::size_t n = 0; n < opt.max_coords; ++n) {
            std::size_t flat = rng.next_below(total);
            std::size_t s = 0;
            while (flat >= slots[s].value->size()) {
                flat -= slots[s].value->size();
                ++s;
            }
            coords.push_back({s, flat});
        }
    }

    GradReport report;
    report.params.resize(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) report.params[s].name = slots[s].name;

    const auto loss_fn = [&net, &x, &y] { return net.loss(x, y); };
    for (const auto& [s, k] : coords) {
        const double numeric = numeric_grad(loss_fn, slots[s].value->at_index(k), opt.eps);
        const double err = relative_error(analytic[s].at_index(k), numeric);
        auto& st = report.params[s];
        if (err > st.max_rel_err) {
            st.max_rel_err = err;
            st.worst_index = k;
        }
        st.mean_rel_err += err;
        ++st.checked;
    }
    for (auto& st : report.params) {
        if (st.checked > 0) st.mean_rel_err /= static_cast<double>(st.checked);
    }
    return report;
}

}  // namespace chn

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "chnnet/gradcheck.hpp"
#include "test_util.hpp"

using chn::ArchSpec;
using chn::GradCheckOptions;
using chn::GradMode;
using chn::GradReport;
using chn::InitScheme;
using chn::Labels;
using chn::LayerKind;
using chn::Matrix;
using chn::Network;

namespace {

// Probe batch away from ReLU kinks: redraw until every hidden pre-activation
// has magnitude >= 1e-4, so the checked function is differentiable at the
// probe point.
struct Probe {
    Matrix x;
    Labels y;
};

Probe draw_probe(const Network& net, std::size_t batch, std::uint64_t seed) {
    const std::size_t dim = net.arch().input_width;
    const int classes = static_cast<int>(net.arch().output_width);
    chn::Rng rng(seed);
    for (int attempt = 0; attempt < 200; ++attempt) {
        Probe p;
        p.x = test_util::random_matrix(dim, batch, rng, -1.0, 1.0);
        for (std::size_t j = 0; j < batch; ++j) {
            p.y.values.push_back(static_cast<int>(rng.next_below(classes)));
        }
        if (net.min_abs_hidden_preactivation(p.x) >= 1e-4) return p;
    }
    FAIL("could not draw a kink-free probe batch");
    return {};
}

}  // namespace

TEST_CASE("numeric_grad on analytic functions") {
    double theta = 3.0;
    const auto quadratic = [&theta] { return theta * theta; };
    CHECK(std::abs(chn::numeric_grad(quadratic, theta, 1e-5) - 6.0) < 1e-9);
    CHECK(theta == 3.0);  // restored

    const auto linear = [&theta] { return 4.0 * theta + 1.0; };
    for (double eps : {1e-2, 1e-3, 1e-5}) {
        CHECK(chn::numeric_grad(linear, theta, eps) == doctest::Approx(4.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(chn::numeric_grad(quadratic, theta, 0.0), std::invalid_argument);
    const auto bad = [] { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(chn::numeric_grad(bad, theta, 1e-5), std::runtime_error);
}

TEST_CASE("relative_error floors the denominator") {
    CHECK(chn::relative_error(0.0, 0.0) == 0.0);
    CHECK(chn::relative_error(1e-12, 0.0) == doctest::Approx(1e-4));
    CHECK(chn::relative_error(2.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("dense-only network passes at 1e-6") {
    const ArchSpec arch{5, {6, 4}, 3, LayerKind::Dense};
    Network net(arch, GradMode::Paper, InitScheme::Glorot, 101);
    const Probe p = draw_probe(net, 4, 11);
    const GradReport report = chn::check_network(net, p.x, p.y, {});
    CHECK(report.within(1e-6));
}

TEST_CASE("CHN exact mode passes at 1e-6 on random networks") {
    chn::Rng meta(202);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t layers = 1 + meta.next_below(3);
        std::vector<std::size_t> hidden;
        for (std::size_t l = 0; l < layers; ++l) hidden.push_back(2 + meta.next_below(5));
        const ArchSpec arch{4, hidden, 3, LayerKind::Chn};
        Network net(arch, GradMode::Exact, InitScheme::Glorot, 300 + trial);
        const Probe p = draw_probe(net, 4, 500 + trial);
        const GradReport report = chn::check_network(net, p.x, p.y, {});
        INFO("trial ", trial, " max rel err ", report.max_rel_err());
        CHECK(report.within(1e-6));
    }
}

TEST_CASE("CHN paper mode fails on W1 when w2 is nonzero, passes on W2") {
    // Single CHN hidden layer: its upstream gradient arrives through the
    // dense output layer exactly, so its W2 gradient is the true derivative
    // while the detached W1 gradient is not.
    const ArchSpec arch{4, {5}, 3, LayerKind::Chn};
    Network net(arch, GradMode::Paper, InitScheme::Glorot, 77);
    const Probe p = draw_probe(net, 4, 78);
    const GradReport report = chn::check_network(net, p.x, p.y, {});

    CHECK_FALSE(report.within(1e-6));
    const auto failing = report.failing(1e-6);
    bool w1_failed = false;
    for (const auto& name : failing) {
        CHECK(name.find(".w2") == std::string::npos);  // the W2 rule is exact
        if (name.find(".w1") != std::string::npos) w1_failed = true;
    }
    CHECK(w1_failed);
    for (const auto& st : report.params) {
        if (st.name.find(".w2") != std::string::npos) CHECK(st.max_rel_err <= 1e-6);
    }
}

TEST_CASE("paper mode in deep nets: the topmost W2 stays exact, lower layers inherit "
          "the detached upstream") {
    const ArchSpec arch{4, {5, 5}, 3, LayerKind::Chn};
    Network net(arch, GradMode::Paper, InitScheme::Glorot, 79);
    const Probe p = draw_probe(net, 4, 80);
    const GradReport report = chn::check_network(net, p.x, p.y, {});

    double top_w2 = -1.0, bottom_w2 = -1.0;
    for (const auto& st : report.params) {
        if (st.name == "hidden1.w2") top_w2 = st.max_rel_err;
        if (st.name == "hidden0.w2") bottom_w2 = st.max_rel_err;
    }
    REQUIRE(top_w2 >= 0.0);
    REQUIRE(bottom_w2 >= 0.0);
    CHECK(top_w2 <= 1e-6);
    // hidden0's D was propagated with the detached rule, so even its exact
    // per-layer W2 formula no longer matches the network derivative.
    CHECK(bottom_w2 > 1e-6);
}

TEST_CASE("CHN paper mode passes everywhere when w2 is zero") {
    const ArchSpec arch{4, {5, 5}, 3, LayerKind::Chn};
    Network net(arch, GradMode::Paper, InitScheme::W2Zero, 88);
    const Probe p = draw_probe(net, 4, 89);
    const GradReport report = chn::check_network(net, p.x, p.y, {});
    CHECK(report.within(1e-6));
}

TEST_CASE("large networks sample a bounded number of coordinates") {
    const ArchSpec arch{20, {30, 30}, 10, LayerKind::Dense};
    Network net(arch, GradMode::Paper, InitScheme::Glorot, 5);
    const Probe p = draw_probe(net, 2, 6);
    GradCheckOptions opt;
    opt.max_coords = 250;
    const GradReport report = chn::check_network(net, p.x, p.y, opt);
    std::size_t checked = 0;
    for (const auto& st : report.params) checked += st.checked;
    CHECK(checked == 250);
    // wider nets have coordinates with tiny gradients where central
    // differences bottom out near 1e-6; 1e-5 still catches real defects
    CHECK(report.within(1e-5));
}

TEST_CASE("check_network rejects an empty probe batch") {
    const ArchSpec arch{3, {3}, 2, LayerKind::Dense};
    Network net(arch, GradMode::Paper, InitScheme::Glorot, 1);
    CHECK_THROWS_AS(chn::check_network(net, Matrix(3, 1), Labels{}, {}),
                    std::invalid_argument);
}

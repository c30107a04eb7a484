#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "chnnet/activations.hpp"
#include "test_util.hpp"

using chn::Labels;
using chn::Matrix;

TEST_CASE("relu definition, idempotence, fixed point") {
    const Matrix z = Matrix::from_rows({{-1, 0, 2}});
    const Matrix r = chn::relu(z);
    CHECK(r(0, 0) == 0.0);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(0, 2) == 2.0);

    const Matrix rr = chn::relu(r);
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(rr.at_index(k) == r.at_index(k));

    const Matrix zeros = chn::relu(Matrix::zeros(2, 2));
    for (std::size_t k = 0; k < zeros.size(); ++k) CHECK(zeros.at_index(k) == 0.0);
}

TEST_CASE("relu_grad indicator with zero tie-break") {
    const Matrix g = chn::relu_grad(Matrix::from_rows({{-1, 0, 2}}));
    CHECK(g(0, 0) == 0.0);
    CHECK(g(0, 1) == 0.0);  // derivative at exactly 0 is 0
    CHECK(g(0, 2) == 1.0);

    const Matrix all_neg = chn::relu_grad(Matrix::from_rows({{-5, -0.1}}));
    CHECK(all_neg(0, 0) == 0.0);
    CHECK(all_neg(0, 1) == 0.0);
}

TEST_CASE("relu_grad matches finite differences away from zero") {
    chn::Rng rng(3);
    for (int iter = 0; iter < 50; ++iter) {
        double x = rng.next_uniform(-2.0, 2.0);
        if (std::abs(x) < 1e-3) continue;  // stay away from the kink
        const double eps = 1e-7;
        const Matrix plus = chn::relu(Matrix::from_rows({{x + eps}}));
        const Matrix minus = chn::relu(Matrix::from_rows({{x - eps}}));
        const double numeric = (plus(0, 0) - minus(0, 0)) / (2 * eps);
        const double analytic = chn::relu_grad(Matrix::from_rows({{x}}))(0, 0);
        CHECK(std::abs(numeric - analytic) < 1e-9);
    }
}

TEST_CASE("softmax uniform, shift invariance, scalar example") {
    const Matrix u = chn::softmax(Matrix::zeros(3, 1));
    for (std::size_t i = 0; i < 3; ++i) CHECK(u(i, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));

    chn::Rng rng(5);
    const Matrix z = test_util::random_matrix(4, 3, rng, -2.0, 2.0);
    Matrix shifted(4, 3);
    for (std::size_t k = 0; k < z.size(); ++k) shifted.at_index(k) = z.at_index(k) + 100.0;
    const Matrix p1 = chn::softmax(z);
    const Matrix p2 = chn::softmax(shifted);
    for (std::size_t k = 0; k < p1.size(); ++k) {
        CHECK(std::abs(p1.at_index(k) - p2.at_index(k)) < 1e-12);
    }

    // exp-normalize of [1, 2] evaluated by hand
    const Matrix p = chn::softmax(Matrix::from_rows({{1}, {2}}));
    const double e1 = std::exp(1.0), e2 = std::exp(2.0);
    CHECK(p(0, 0) == doctest::Approx(e1 / (e1 + e2)).epsilon(1e-12));
    CHECK(p(1, 0) == doctest::Approx(e2 / (e1 + e2)).epsilon(1e-12));
}

TEST_CASE("softmax columns sum to one under large-magnitude inputs") {
    chn::Rng rng(6);
    for (int iter = 0; iter < 20; ++iter) {
        const Matrix z = test_util::random_matrix(10, 4, rng, -1e3, 1e3);
        const Matrix p = chn::softmax(z);
        for (std::size_t j = 0; j < p.cols(); ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.rows(); ++i) {
                CHECK(p(i, j) >= 0.0);
                sum += p(i, j);
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("sparse cross entropy values and errors") {
    // perfect prediction: clamped at 1e-12, loss is essentially zero
    Matrix perfect(3, 1, 0.0);
    perfect(1, 0) = 1.0;
    CHECK(chn::sparse_ce_loss(perfect, Labels{{1}}) == doctest::Approx(0.0).epsilon(1e-9));

    const Matrix uniform(10, 2, 0.1);
    CHECK(chn::sparse_ce_loss(uniform, Labels{{3, 7}}) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));

    const Matrix p = Matrix::from_rows({{0.7}, {0.3}});
    CHECK(chn::sparse_ce_loss(p, Labels{{1}}) ==
          doctest::Approx(-std::log(0.3)).epsilon(1e-12));

    CHECK_THROWS_AS(chn::sparse_ce_loss(p, Labels{{2}}), std::invalid_argument);
    CHECK_THROWS_AS(chn::sparse_ce_loss(p, Labels{{0, 1}}), std::invalid_argument);
}

TEST_CASE("loss decreases as mass moves toward the true class") {
    double prev = 1e9;
    for (double q = 0.1; q < 0.95; q += 0.1) {
        Matrix p(2, 1);
        p(0, 0) = q;
        p(1, 0) = 1.0 - q;
        const double loss = chn::sparse_ce_loss(p, Labels{{0}});
        CHECK(loss >= 0.0);
        CHECK(loss < prev);
        prev = loss;
    }
}

TEST_CASE("softmax_ce_backward optimum and column sums") {
    Matrix onehot(4, 2, 0.0);
    onehot(2, 0) = 1.0;
    onehot(0, 1) = 1.0;
    const Matrix d = chn::softmax_ce_backward(onehot, Labels{{2, 0}});
    for (std::size_t k = 0; k < d.size(); ++k) CHECK(d.at_index(k) == 0.0);

    chn::Rng rng(9);
    const Matrix p = chn::softmax(test_util::random_matrix(5, 3, rng, -2.0, 2.0));
    const Matrix g = chn::softmax_ce_backward(p, Labels{{0, 4, 2}});
    for (std::size_t j = 0; j < g.cols(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < g.rows(); ++i) sum += g(i, j);
        CHECK(std::abs(sum) <= 1e-12);
    }

    CHECK_THROWS_AS(chn::softmax_ce_backward(p, Labels{{0, 9, 2}}), std::invalid_argument);
}

TEST_CASE("softmax_ce_backward matches finite differences of the composed loss") {
    chn::Rng rng(17);
    for (int iter = 0; iter < 5; ++iter) {
        Matrix z = test_util::random_matrix(5, 4, rng, -1.5, 1.5);
        const Labels y{{static_cast<int>(rng.next_below(5)), static_cast<int>(rng.next_below(5)),
                        static_cast<int>(rng.next_below(5)),
                        static_cast<int>(rng.next_below(5))}};
        const Matrix analytic = chn::softmax_ce_backward(chn::softmax(z), y);
        const double eps = 1e-6;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double orig = z.at_index(k);
            z.at_index(k) = orig + eps;
            const double plus = chn::sparse_ce_loss(chn::softmax(z), y);
            z.at_index(k) = orig - eps;
            const double minus = chn::sparse_ce_loss(chn::softmax(z), y);
            z.at_index(k) = orig;
            const double numeric = (plus - minus) / (2 * eps);
            const double denom =
                std::max({std::abs(analytic.at_index(k)), std::abs(numeric), 1e-8});
            CHECK(std::abs(analytic.at_index(k) - numeric) / denom < 1e-6);
        }
    }
}

#include "chnnet/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chn {

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double variance(const SampleSet& s, double mean) {
    double acc = 0.0;
    for (double v : s.values) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(s.values.size() - s.ddof);
}

}  // namespace

std::pair<double, double> mean_std(const SampleSet& s) {
    const std::size_t n = s.values.size();
    if (n == 0 || static_cast<long>(n) <= s.ddof) {
        throw std::invalid_argument("mean_std: need more than ddof=" + std::to_string(s.ddof) +
                                    " samples, got " + std::to_string(n));
    }
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(n);
    return {mean, std::sqrt(variance(s, mean))};
}

TTestResult welch_t(const SampleSet& a, const SampleSet& b) {
    const std::size_t na = a.values.size();
    const std::size_t nb = b.values.size();
    if (na < 2 || nb < 2) {
        throw std::invalid_argument("welch_t: each sample needs length >= 2, got " +
                                    std::to_string(na) + " and " + std::to_string(nb));
    }
    SampleSet a1 = a;
    SampleSet b1 = b;
    a1.ddof = b1.ddof = 1;  // Welch uses sample variances
    const auto [mean_a, sd_a] = mean_std(a1);
    const auto [mean_b, sd_b] = mean_std(b1);
    const double va = sd_a * sd_a;
    const double vb = sd_b * sd_b;
    const double se2 = va / static_cast<double>(na) + vb / static_cast<double>(nb);

    TTestResult r;
    r.two_sided = true;
    if (se2 == 0.0) {
        if (mean_a == mean_b) {
            r.t_statistic = 0.0;
            r.degrees_of_freedom = static_cast<double>(na + nb - 2);
            r.p_value = 1.0;
        } else {
            r.t_statistic = (mean_a > mean_b ? 1.0 : -1.0) *
                            std::numeric_limits<double>::infinity();
            r.degrees_of_freedom = static_cast<double>(na + nb - 2);
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_statistic = (mean_a - mean_b) / std::sqrt(se2);
    const double num = se2 * se2;
    const double den = (va / na) * (va / na) / static_cast<double>(na - 1) +
                       (vb / nb) * (vb / nb) / static_cast<double>(nb - 1);
    r.degrees_of_freedom = num / den;
    r.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(r.t_statistic), r.degrees_of_freedom));
    return r;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) {
        throw std::invalid_argument("student_t_cdf: df must be positive, got " +
                                    std::to_string(df));
    }
    if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * reg_incomplete_beta(0.5 * df, 0.5, x);  // P(T > |t|)
    return t >= 0.0 ? 1.0 - tail : tail;
}

}  // namespace chn

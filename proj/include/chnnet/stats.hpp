#pragma once

#include <utility>
#include <vector>

namespace chn {

// One scalar per seed. ddof is the degrees-of-freedom adjustment for the
// standard deviation (divisor n - ddof); 1 is the sample-std default.
struct SampleSet {
    std::vector<double> values;
    int ddof = 1;
};

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    bool two_sided = true;
};

std::pair<double, double> mean_std(const SampleSet& s);

// Unequal-variance (Welch) two-sample t-test with Welch-Satterthwaite
// degrees of freedom. Sign convention: t has the sign of mean(a) - mean(b).
// Degenerate inputs: zero pooled variance with equal means gives t = 0,
// p = 1; zero pooled variance with unequal means gives p = 0 and an
// infinite-t sentinel.
TTestResult welch_t(const SampleSet& a, const SampleSet& b);

// Student-t CDF via the regularized incomplete beta function, evaluated with
// a continued fraction to well below 1e-10.
double student_t_cdf(double t, double df);

}  // namespace chn

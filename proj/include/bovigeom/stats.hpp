#pragma once

#include <span>

namespace bovigeom {

/// Regularized incomplete beta function I_x(a, b), evaluated with the
/// Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided survival probability of Student's t at |t| with df degrees of
/// freedom: p = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Welch's unequal-variance two-sided t-test with Welch-Satterthwaite
/// degrees of freedom. Identical inputs give t = 0, p = 1; zero combined
/// variance otherwise is an error.
TTestResult welch_ttest(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs); // n-1 denominator

} // namespace bovigeom

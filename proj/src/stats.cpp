#include "bovigeom/stats.hpp"

#include "bovigeom/error.hpp"

#include <cmath>
#include <limits>

namespace bovigeom {

namespace {

// Continued fraction for the incomplete beta function (Lentz's algorithm).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
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
        const int m2 = 2 * m;
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

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ConfigError("incomplete_beta: a and b must be > 0");
    if (x < 0.0 || x > 1.0)
        throw ConfigError("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // Symmetry keeps the continued fraction in its fast-converging region.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0))
        throw ConfigError("student_t_two_sided_p: df must be > 0");
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

double mean(std::span<const double> xs) {
    if (xs.empty())
        throw ConfigError("mean: empty input");
    double acc = 0.0;
    for (const double v : xs) acc += v;
    return acc / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2)
        throw ConfigError("sample_sd: need at least 2 values");
    const double m = mean(xs);
    double acc = 0.0;
    for (const double v : xs) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

TTestResult welch_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw ConfigError("welch_ttest: each group needs at least 2 values");

    if (a.size() == b.size()) {
        bool identical = true;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) identical = false;
        if (identical) return {0.0, static_cast<double>(a.size() + b.size() - 2), 1.0};
    }

    const double ma = mean(a);
    const double mb = mean(b);
    const double sa = sample_sd(a);
    const double sb = sample_sd(b);
    const double va_n = sa * sa / static_cast<double>(a.size());
    const double vb_n = sb * sb / static_cast<double>(b.size());
    if (va_n + vb_n <= 0.0)
        throw ConfigError("welch_ttest: zero variance in both groups");

    TTestResult r;
    r.t = (ma - mb) / std::sqrt(va_n + vb_n);
    const double denom = va_n * va_n / static_cast<double>(a.size() - 1) +
                         vb_n * vb_n / static_cast<double>(b.size() - 1);
    r.df = (va_n + vb_n) * (va_n + vb_n) / denom;
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

} // namespace bovigeom

#include "diqkd/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace diqkd::stats {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    // The log-gamma front factor is evaluated in extended precision: plain
    // double lgamma at arguments ~1e6 only leaves ~1e-11 relative accuracy.
    const long double ln_front = std::lgamma((long double)a + (long double)b) -
                                 std::lgamma((long double)a) - std::lgamma((long double)b) +
                                 (long double)a * std::log((long double)x) +
                                 (long double)b * std::log1p(-(long double)x);
    const double front = static_cast<double>(std::exp(ln_front));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double binom_cdf_exact(int64_t n, double p, int64_t k) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    // Pr[X <= k] = I_{1-p}(n-k, k+1).
    return incomplete_beta(static_cast<double>(n - k), static_cast<double>(k + 1), 1.0 - p);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double zs_bound(double n, double p, double k) {
    const double x = k / n;
    double g = 0.0;
    if (x > 0.0) g += x * std::log(x / p);
    if (x < 1.0) g += (1.0 - x) * std::log((1.0 - x) / (1.0 - p));
    if (g < 0.0) g = 0.0;  // guard against rounding at x == p
    const double sign = (x > p) ? 1.0 : (x < p ? -1.0 : 0.0);
    return normal_cdf(sign * std::sqrt(2.0 * n * g));
}

double binom_cdf(double n, double p, double k) {
    if (k < 0.0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    if (n <= kExactCdfMaxN)
        return binom_cdf_exact(static_cast<int64_t>(n), p, static_cast<int64_t>(k));
    return zs_bound(n, p, k + 1.0);
}

ChernoffTails chernoff_pe(double n, double gamma, double w_exp, double delta_tol) {
    const double e = n * gamma * delta_tol * delta_tol / w_exp;
    return {std::exp(-e / 2.0), std::exp(-e / 3.0)};
}

}  // namespace diqkd::stats

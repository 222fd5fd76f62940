#pragma once

#include <cstdint>

namespace diqkd::stats {

// Binomial CDF Pr[X <= k] for X ~ Binom(n, p). Exact (regularized incomplete
// beta) for n <= 1e6; for larger n the Zubkov-Serov upper bound
// zs_bound(n, p, k+1) is substituted, which only ever over-estimates the CDF.
double binom_cdf(double n, double p, double k);

// Exact binomial CDF via the regularized incomplete beta function.
double binom_cdf_exact(int64_t n, double p, int64_t k);

// Normal-CDF approximation fZS(n, p, k) = Phi(sign(k/n - p) sqrt(2 n G(k/n, p)))
// with G(x, p) = x ln(x/p) + (1-x) ln((1-x)/(1-p)). For 1 <= k <= n-1 it
// satisfies fZS(n,p,k) <= binom_cdf(n,p,k) <= fZS(n,p,k+1).
double zs_bound(double n, double p, double k);

// Multiplicative Chernoff bounds on the lower/upper tail of the test-round
// win count: exp(-n g d^2 / (2w)) and exp(-n g d^2 / (3w)).
struct ChernoffTails {
    double lower;
    double upper;
};
ChernoffTails chernoff_pe(double n, double gamma, double w_exp, double delta_tol);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Standard normal CDF.
double normal_cdf(double z);

constexpr double kExactCdfMaxN = 1e6;

}  // namespace diqkd::stats

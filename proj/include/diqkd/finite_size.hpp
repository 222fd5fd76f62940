#pragma once

#include <cstdint>
#include <string>

#include "diqkd/certify.hpp"
#include "diqkd/device_model.hpp"

namespace diqkd::finitesize {

using certify::AffineEntropyBound;
using devices::EcModel;
using devices::HonestDeviceModel;

// Affine function of the win probability w.
struct Affine {
    double intercept = 0.0;  // value at w = 0
    double slope = 0.0;
    double operator()(double w) const { return intercept + slope * w; }
};

// Per-round accumulated-entropy bound g(w) = (1-gamma)/2 lin_p(w) + gamma lin_0(w).
Affine g_of_w(const AffineEntropyBound& lin_p, const AffineEntropyBound& lin_0, double gamma);
double g_of_w(const AffineEntropyBound& lin_p, const AffineEntropyBound& lin_0, double gamma,
              double w);

// Pre-shared-key variant without the sifting factor:
// g~(w) = (1-gamma) lin_p(w) + gamma lin_0(w).
Affine g_tilde_of_w(const AffineEntropyBound& lin_p, const AffineEntropyBound& lin_0, double gamma);

// Soundness / completeness error budget.
struct EpsilonLedger {
    double eps_ec_com = 0.0;
    double eps_pe_com = 0.0;
    double eps_ea = 0.0;
    double eps_pa = 0.0;
    double eps_h = 0.0;
    double eps_s = 0.0;
    double eps_s1 = 0.0;  // smoothing split eps_s'
    double eps_s2 = 0.0;  // smoothing split eps_s''

    void validate() const;  // all in (0,1], eps_s > eps_s1 + 2 eps_s2
};

struct Tuning {
    double alpha = 1.0001;
    double alpha_prime = 1.0001;
    double beta = 0.0;
};

struct FiniteSizeInputs {
    double n = 0.0;
    double gamma = 0.0;
    double p = 0.0;
    double delta_tol = 0.0;
    double delta_iid = 0.0;  // collective variants only
    int64_t ec_max = 0;
    EpsilonLedger eps;
    Tuning tuning;
};

// Min-tradeoff statistics for the entropy-accumulation correction terms:
//   Max    = (1/gamma) g(1) + (1 - 1/gamma) beta
//   Min    = g((2 - sqrt 2)/4)
//   Var   <= (2-sqrt2)/(4 gamma) min{D0^2, D1^2} + (2+sqrt2)/(4 gamma) max{D0^2, D1^2}
// with D_w = beta - g(w). beta must lie in [g(0), g(1)].
struct TradeoffStats {
    double max_f = 0.0;
    double min_f = 0.0;
    double var_f_bound = 0.0;
};
TradeoffStats tradeoff_stats(const Affine& g, double gamma, double beta);

// Correction constants:
//   V       = sqrt(Var + 2) + log2(2 d^2 + 1)
//   K_alpha = 2^{(alpha-1)(2 log2 d + Max - Min)} / (6 (2-alpha)^3 ln 2)
//             * ln^3(2^{2 log2 d + Max - Min} + e^2)
// where d = 2^dim_s_log is the per-round output dimension (6 for the standard
// protocol, 12 for the pre-shared-key variant).
struct VK {
    double v = 0.0;
    double k_alpha = 0.0;
};
VK v_and_k(const TradeoffStats& stats, double alpha, double dim_s_log);

// eta(eps) = log2(2/eps^2), the numerically stable stand-in for
// log2(1/(1 - sqrt(1 - eps^2))).
double eta(double eps);

// Completeness failure probability of the two-sided parameter-estimation test.
double completeness_pe_general(double n, double gamma, double w_exp, double delta_tol);

// General-attack key length (floored at zero). `g` is the accumulated-entropy
// bound whose value at w_exp - delta_tol enters the leading term; for the
// pre-shared variant pass 1 + g~ and dim_s_log = log2(12).
int64_t key_length_general(const FiniteSizeInputs& inp, const Affine& g, double w_exp,
                           double dim_s_log = 0.0 /* 0 -> log2(6) */);

// Same, without the final floor/clamp (used by the optimizer).
double key_length_general_real(const FiniteSizeInputs& inp, const Affine& g, double w_exp,
                               double dim_s_log = 0.0);

// Pre-shared-key variant: the leading term becomes 1 + g~(w_exp - delta_tol),
// the per-round output dimension grows to 12 (V with log2 289, K with
// 2 log2 12), and beta must lie in [1 + g~(0), 1 + g~(1)]. The alpha'
// admissible range is kept at (1, 1 + 2/V') with V' = 2 log2 7.
int64_t key_length_preshared(const FiniteSizeInputs& inp, const Affine& g_tilde, double w_exp);

struct CollectiveResult {
    int64_t key_length = 0;
    double eps_iid = 0.0;
};

// Collective attacks on the standard protocol.
CollectiveResult key_length_collective(const FiniteSizeInputs& inp, const Affine& g, double w_exp);

struct OptCollResult {
    int64_t key_length = 0;
    double eps_iid = 0.0;
    double eps_pe_com = 0.0;
};

// Collective attacks with a fixed test subset of size m = round(gamma n);
// ec_max must be sized from generation rounds only ((1-gamma) n rounds).
OptCollResult key_length_optcoll(const FiniteSizeInputs& inp, const AffineEntropyBound& lin_p,
                                 double w_exp);

enum class Protocol { standard, preshared };

// Asymptotic keyrate in bits per round:
//   standard:  (1/2)(lin_p(w_exp) - h(p + (1-2p) p_err))
//   preshared: lin_p(w_exp) - h(p + (1-2p) p_err)   (net of the seed)
double asymptotic_rate(const AffineEntropyBound& lin_p, const HonestDeviceModel& model,
                       Protocol protocol);

enum class Theorem { general, preshared, collective, optcoll };

struct OptimizeTargets {
    double eps_sou = 1e-6;
    double eps_com = 1e-2;
};

struct OptimizeResult {
    int64_t key_length = 0;
    FiniteSizeInputs inputs;
    double eps_iid = 0.0;      // collective variants
    double sound = 0.0;        // achieved soundness expression
    double complete = 0.0;     // achieved completeness expression
    bool feasible = false;
};

// Maximizes the key length for the chosen theorem subject to the soundness and
// completeness targets. Deterministic: joint log-grid over (gamma, delta_tol)
// followed by coordinate descent over the ledger ratios, with the Renyi
// parameters seeded at their large-n closed forms and refined locally.
// Only mode and xi of `ec` are honored; its epsilons come from the ledger.
OptimizeResult optimize_params(double n, const HonestDeviceModel& model,
                               const AffineEntropyBound& lin_p, const AffineEntropyBound& lin_0,
                               const OptimizeTargets& targets, Theorem theorem,
                               const EcModel& ec = {});

// Soundness expression for a given theorem and ledger.
double soundness_of(Theorem theorem, const EpsilonLedger& eps, double eps_iid);

constexpr double kVPrime = 5.614709844115208;  // 2 log2 7
double dim_s_log_standard();  // log2 6
double dim_s_log_preshared(); // log2 12

}  // namespace diqkd::finitesize

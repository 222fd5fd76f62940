#pragma once

#include <cstdint>

#include "diqkd/frank_wolfe.hpp"

namespace diqkd::certify {

// Affine lower bound lin_p(nu) = slope (nu - 2) + intercept on the weighted
// conditional entropy, as a function of the CHSH value nu; win probability w
// converts via nu = 8w - 4.
struct AffineEntropyBound {
    double slope = 0.0;      // per CHSH value
    double intercept = 0.0;  // value at nu = 2, bits
    double p = 0.0;          // preprocessing bias the bound was computed for
    bool certified = false;

    double at_nu(double nu) const { return slope * (nu - 2.0) + intercept; }
    double at_w(double w) const { return at_nu(8.0 * w - 4.0); }
};

AffineEntropyBound affine_bound(double lambda, double intercept, double p, bool certified);

// Bound on the objective change when Alice's second measurement angle moves
// by at most delta: 2.012 w1 delta + (|l10| + |l11|) sqrt(2 - 2 cos delta).
double continuity_penalty(double delta, const ObjectiveSpec& spec);

struct HeuristicResult {
    double value = 0.0;  // feasible objective value (upper bound on the optimum)
    double theta_a = 0.0;
    BobVector r;
    StructuredState state;
};

struct HeuristicOptions {
    int rounds = 6;
    int fw_iters_per_round = 60;
    int threads = 1;
    bool rank2_restricted = false;  // force states to rank <= 2 (diagnostics)
};

// Multi-start local minimization over (theta_a, theta_b, state); returns the
// best feasible value found. States are projected to PSD by eigenvalue
// clipping; Bob's vector is updated in closed form on the semicircular arc.
HeuristicResult heuristic_min(const ObjectiveSpec& spec, int restarts, uint64_t seed,
                              const HeuristicOptions& opts = {});

struct CertifyOptions {
    int threads = 1;
    uint64_t seed = 1;
    int initial_theta_intervals = 16;
    int heuristic_restarts = 8;
    int fw_max_iters = 1500;
    double fw_eps_coarse = 0.02;
};

// Certified lower bound on the optimization intercept: branch-and-bound over
// Alice's angle with the continuity penalty, an outer polygon over Bob's
// semicircle refined by tangent construction, and Frank-Wolfe at every leaf.
// Stops when feasible - certified <= gap_tol or after `budget` leaf solves;
// the returned bound is valid either way.
CertifiedValue certify_c_lambda(const ObjectiveSpec& spec, double gap_tol, long budget,
                                const CertifyOptions& opts = {});

}  // namespace diqkd::certify

#pragma once

#include <optional>

#include "diqkd/objective.hpp"

namespace diqkd::certify {

// Exact minimizer of tr(cost rho) over structured states. The feasible set
// splits into two real-symmetric 2x2 blocks, so the minimum is the smaller of
// the two block minimum eigenvalues and is attained at a rank-1 block
// projector. The value is an exact optimum, not a relaxation.
struct LinearMinResult {
    StructuredState state;
    double value = 0.0;
};
LinearMinResult linear_min_structured(const Matrix& cost);

// Outcome of a certified minimization.
struct CertifiedValue {
    double lower_bound = 0.0;    // certified lower bound, bits
    double feasible_value = 0.0; // best feasible objective value seen, bits
    double gap = 0.0;            // feasible_value - lower_bound
    bool converged = false;      // gap <= requested tolerance
    long iterations = 0;
    double argmin_theta_a = 0.0;
    BobVector argmin_r;
    StructuredState argmin_state;
};

struct FrankWolfeOptions {
    double eps_tol = 1e-3;
    int max_iters = 2000;
    std::optional<StructuredState> initial_state;
    double line_search_width = 1e-6;
};

// Conditional-gradient minimization of the objective over structured states
// at fixed measurements. Every reported lower_bound is valid regardless of
// convergence: it is F(rho~) minus the exact linearized decrease, where rho~
// is the iterate pushed to full rank by mixing in delta * I/4 with
// delta = max(-min block eigenvalue, 1e-14).
CertifiedValue frank_wolfe(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                           const FrankWolfeOptions& opts = {});

}  // namespace diqkd::certify

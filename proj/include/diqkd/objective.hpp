#pragma once

#include <array>

#include "diqkd/structured_state.hpp"

namespace diqkd::certify {

// Bob's key operator direction: B = r_z Z + r_x X. For certified bounds r may
// lie outside the unit circle (outer polygon vertices); the objective is
// affine in r either way.
struct BobVector {
    double r_z = 1.0;
    double r_x = 0.0;
    double norm() const;
};

// Pauli measurement at angle theta in the X-Z plane: cos(theta) Z + sin(theta) X.
Matrix pauli_at_angle(double theta);

// Projectors of the flip-dilated key measurement on A (x) T:
//   P_a = Pi_{a|theta} (x) |0><0| + Pi_{a xor 1|theta} (x) |1><1|.
// The bias p enters through the ancilla state |phi_p>, not the projectors;
// it is validated here for interface consistency.
std::array<Matrix, 2> noisy_projectors(double theta, double p);

// Ancilla state |phi_p><phi_p| with |phi_p> = sqrt(1-p)|0> + sqrt(p)|1>.
Matrix ancilla_state(double p);

// sum_xy lambda_xy A_x (x) B_y as a 4x4 operator (A_0 = Z, A_1 at theta_a).
Matrix lambda_correlator(const LagrangeVector& lambda, double theta_a, const BobVector& r);

// CHSH operator A0 B0 + A0 B1 + A1 B0 - A1 B1 at the given measurement angles.
Matrix chsh_operator(double theta_a, double theta_b);

// Weighted objective
//   F(theta_a, r, rho) = sum_x w_x D(G(rho) || Z_x(G(rho))) - lambda . <correlators>
// where G appends the |phi_p> ancilla and Z_x pinches with the dilated key
// projectors (theta_0 = 0, theta_1 = theta_a).
double eval_fobj(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                 const StructuredState& state);

// Same value through the flip isometry V|psi> = sqrt(1-p)|psi>|0> + sqrt(p) Y|psi>|1>
// and plain pinching by Alice's projectors; cross-check of eval_fobj.
double eval_fobj_alt(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                     const StructuredState& state);

// Cost operator whose Hilbert-Schmidt pairing with a traceless structured
// direction gives the directional derivative of eval_fobj; projected onto the
// structured-state span. Requires a state of full rank (callers perturb first).
Matrix grad_state(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                  const StructuredState& state);

// Correlator part of the objective, tr(lambda . Gamma rho).
double lambda_term(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                   const StructuredState& state);

}  // namespace diqkd::certify

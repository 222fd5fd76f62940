#pragma once

#include "diqkd/linalg.hpp"

namespace diqkd::certify {

using linalg::Matrix;

// Two-qubit state in the Bell basis {Phi+, Psi-, Phi-, Psi+}: two real
// symmetric 2x2 blocks, all other entries zero.
//
//   [ L_phi_plus   l1          0            0         ]
//   [ l1           L_psi_minus 0            0         ]
//   [ 0            0           L_phi_minus  l2        ]
//   [ 0            0           l2           L_psi_plus]
struct StructuredState {
    double L_phi_plus = 0.0;
    double L_psi_minus = 0.0;
    double L_phi_minus = 0.0;
    double L_psi_plus = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;

    static StructuredState maximally_mixed() { return {0.25, 0.25, 0.25, 0.25, 0.0, 0.0}; }
    static StructuredState pure_phi_plus() { return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }

    double trace() const { return L_phi_plus + L_psi_minus + L_phi_minus + L_psi_plus; }

    // Eigenvalues of the two blocks, ascending per block.
    void block_eigenvalues(double out[4]) const;

    double min_eigenvalue() const;

    bool is_valid(double tol = 1e-10) const;

    // Convex mixture (1-t) a + t b.
    static StructuredState mix(const StructuredState& a, const StructuredState& b, double t);

    // Density matrix in the computational basis.
    Matrix to_density() const;

    // Clip negative block eigenvalues to zero and renormalize to unit trace.
    StructuredState clipped_to_psd() const;
};

// Unitary with the Bell vectors as columns (computational basis).
const Matrix& bell_basis();

// Hilbert-Schmidt projection of a Hermitian 4x4 operator onto the span of the
// structured-state directions, returned in the computational basis.
Matrix project_structured(const Matrix& cost);

// The two real-symmetrized Bell-basis blocks of a Hermitian 4x4 operator.
struct BlockPair {
    double a0, b0, d0;  // [[a0, b0], [b0, d0]]
    double a1, b1, d1;
};
BlockPair structured_blocks(const Matrix& cost);

// Lagrange multipliers for the four correlators A_x (x) B_y.
struct LagrangeVector {
    double l00 = 0.0, l01 = 0.0, l10 = 0.0, l11 = 0.0;
    bool chsh_restricted = false;

    // (lambda, lambda, lambda, -lambda): the CHSH combination.
    static LagrangeVector chsh(double lambda) { return {lambda, lambda, lambda, -lambda, true}; }
};

// Weighted objective: sum_x w_x H(hat A_x | E) - lambda . correlators, with
// noisy-preprocessing bias p on the key measurements.
struct ObjectiveSpec {
    LagrangeVector lambda;
    double w0 = 0.5;
    double w1 = 0.5;
    double p = 0.0;

    void validate() const;
};

}  // namespace diqkd::certify

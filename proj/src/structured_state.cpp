#include "diqkd/structured_state.hpp"

#include <cmath>
#include <stdexcept>

namespace diqkd::certify {

namespace {

void sym2x2_eigs(double a, double b, double d, double& lo, double& hi) {
    const double tr = a + d;
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * b);
    lo = 0.5 * (tr - disc);
    hi = 0.5 * (tr + disc);
}

}  // namespace

void StructuredState::block_eigenvalues(double out[4]) const {
    sym2x2_eigs(L_phi_plus, l1, L_psi_minus, out[0], out[1]);
    sym2x2_eigs(L_phi_minus, l2, L_psi_plus, out[2], out[3]);
}

double StructuredState::min_eigenvalue() const {
    double e[4];
    block_eigenvalues(e);
    return std::min(e[0], e[2]);
}

bool StructuredState::is_valid(double tol) const {
    return std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -tol;
}

StructuredState StructuredState::mix(const StructuredState& a, const StructuredState& b, double t) {
    const double s = 1.0 - t;
    return {s * a.L_phi_plus + t * b.L_phi_plus, s * a.L_psi_minus + t * b.L_psi_minus,
            s * a.L_phi_minus + t * b.L_phi_minus, s * a.L_psi_plus + t * b.L_psi_plus,
            s * a.l1 + t * b.l1, s * a.l2 + t * b.l2};
}

const Matrix& bell_basis() {
    static const Matrix u = [] {
        Matrix m(4);
        const double r = 1.0 / std::sqrt(2.0);
        // columns: Phi+, Psi-, Phi-, Psi+ over |00>,|01>,|10>,|11>
        m(0, 0) = r;
        m(3, 0) = r;
        m(1, 1) = r;
        m(2, 1) = -r;
        m(0, 2) = r;
        m(3, 2) = -r;
        m(1, 3) = r;
        m(2, 3) = r;
        return m;
    }();
    return u;
}

Matrix StructuredState::to_density() const {
    Matrix b(4);
    b(0, 0) = L_phi_plus;
    b(1, 1) = L_psi_minus;
    b(2, 2) = L_phi_minus;
    b(3, 3) = L_psi_plus;
    b(0, 1) = l1;
    b(1, 0) = l1;
    b(2, 3) = l2;
    b(3, 2) = l2;
    const Matrix& u = bell_basis();
    return u * b * u.adjoint();
}

StructuredState StructuredState::clipped_to_psd() const {
    // Clip each block's eigenvalues to >= 0, then renormalize the trace.
    auto clip_block = [](double a, double b, double d, double& oa, double& ob, double& od) {
        double lo, hi;
        sym2x2_eigs(a, b, d, lo, hi);
        if (lo >= 0.0) {
            oa = a;
            ob = b;
            od = d;
            return;
        }
        // eigenvector for hi: (a - d \pm disc) parametrization
        double vx = b, vy = hi - a;
        double norm = std::hypot(vx, vy);
        if (norm < 1e-300) {
            vx = 1.0;
            vy = 0.0;
            norm = 1.0;
        }
        vx /= norm;
        vy /= norm;
        const double h = std::max(hi, 0.0);
        oa = h * vx * vx;
        ob = h * vx * vy;
        od = h * vy * vy;
    };
    StructuredState s;
    clip_block(L_phi_plus, l1, L_psi_minus, s.L_phi_plus, s.l1, s.L_psi_minus);
    clip_block(L_phi_minus, l2, L_psi_plus, s.L_phi_minus, s.l2, s.L_psi_plus);
    const double tr = s.trace();
    if (tr <= 1e-300) return maximally_mixed();
    const double inv = 1.0 / tr;
    s.L_phi_plus *= inv;
    s.L_psi_minus *= inv;
    s.L_phi_minus *= inv;
    s.L_psi_plus *= inv;
    s.l1 *= inv;
    s.l2 *= inv;
    return s;
}

BlockPair structured_blocks(const Matrix& cost) {
    const Matrix& u = bell_basis();
    const Matrix cb = u.adjoint() * cost * u;
    BlockPair bp;
    bp.a0 = cb(0, 0).real();
    bp.d0 = cb(1, 1).real();
    bp.b0 = 0.5 * (cb(0, 1).real() + cb(1, 0).real());
    bp.a1 = cb(2, 2).real();
    bp.d1 = cb(3, 3).real();
    bp.b1 = 0.5 * (cb(2, 3).real() + cb(3, 2).real());
    return bp;
}

Matrix project_structured(const Matrix& cost) {
    const BlockPair bp = structured_blocks(cost);
    Matrix b(4);
    b(0, 0) = bp.a0;
    b(1, 1) = bp.d0;
    b(0, 1) = bp.b0;
    b(1, 0) = bp.b0;
    b(2, 2) = bp.a1;
    b(3, 3) = bp.d1;
    b(2, 3) = bp.b1;
    b(3, 2) = bp.b1;
    const Matrix& u = bell_basis();
    return u * b * u.adjoint();
}

void ObjectiveSpec::validate() const {
    if (w0 < 0.0 || w1 < 0.0 || w0 + w1 > 1.0 + 1e-12)
        throw std::invalid_argument("objective weights must be nonnegative with w0 + w1 <= 1");
    if (p < 0.0 || p > 0.5) throw std::invalid_argument("preprocessing bias p must be in [0, 1/2]");
}

}  // namespace diqkd::certify

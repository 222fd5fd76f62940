#include "diqkd/objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace diqkd::certify {

using linalg::cplx;
using linalg::EigDecomposition;
using linalg::kSupportCutoff;

double BobVector::norm() const { return std::hypot(r_z, r_x); }

Matrix pauli_at_angle(double theta) {
    Matrix m = linalg::pauli_z() * std::cos(theta);
    m += linalg::pauli_x() * std::sin(theta);
    return m;
}

static Matrix bob_operator(const BobVector& r) {
    Matrix m = linalg::pauli_z() * r.r_z;
    m += linalg::pauli_x() * r.r_x;
    return m;
}

std::array<Matrix, 2> noisy_projectors(double theta, double p) {
    if (theta < 0.0 || theta > M_PI) throw std::invalid_argument("theta must be in [0, pi]");
    if (p < 0.0 || p > 0.5) throw std::invalid_argument("p must be in [0, 1/2]");
    const Matrix obs = pauli_at_angle(theta);
    const Matrix id2 = Matrix::identity(2);
    const Matrix pi0 = (id2 + obs) * 0.5;
    const Matrix pi1 = (id2 - obs) * 0.5;
    Matrix t0(2), t1(2);
    t0(0, 0) = 1.0;
    t1(1, 1) = 1.0;
    std::array<Matrix, 2> out = {kron(pi0, t0) + kron(pi1, t1), kron(pi1, t0) + kron(pi0, t1)};
    return out;
}

Matrix ancilla_state(double p) {
    Matrix m(2);
    const double c0 = std::sqrt(1.0 - p), c1 = std::sqrt(p);
    m(0, 0) = c0 * c0;
    m(0, 1) = c0 * c1;
    m(1, 0) = c1 * c0;
    m(1, 1) = c1 * c1;
    return m;
}

Matrix lambda_correlator(const LagrangeVector& lambda, double theta_a, const BobVector& r) {
    const Matrix a0 = linalg::pauli_z();
    const Matrix a1 = pauli_at_angle(theta_a);
    const Matrix b0 = linalg::pauli_z();
    const Matrix b1 = bob_operator(r);
    Matrix m = kron(a0, b0) * lambda.l00;
    m += kron(a0, b1) * lambda.l01;
    m += kron(a1, b0) * lambda.l10;
    m += kron(a1, b1) * lambda.l11;
    return m;
}

Matrix chsh_operator(double theta_a, double theta_b) {
    const Matrix a0 = linalg::pauli_z();
    const Matrix a1 = pauli_at_angle(theta_a);
    const Matrix b0 = linalg::pauli_z();
    const Matrix b1 = pauli_at_angle(theta_b);
    return kron(a0, b0) + kron(a0, b1) + kron(a1, b0) - kron(a1, b1);
}

namespace {

// Embed an operator on A (x) T into A (x) B (x) T (identity on B).
Matrix embed_at(const Matrix& m_at) {
    Matrix out(8);
    for (int a = 0; a < 2; ++a)
        for (int t = 0; t < 2; ++t)
            for (int ap = 0; ap < 2; ++ap)
                for (int tp = 0; tp < 2; ++tp) {
                    const cplx v = m_at(a * 2 + t, ap * 2 + tp);
                    if (v == cplx(0.0, 0.0)) continue;
                    for (int b = 0; b < 2; ++b)
                        out((a * 2 + b) * 2 + t, (ap * 2 + b) * 2 + tp) = v;
                }
    return out;
}

Matrix pinch(const Matrix& rho, const std::array<Matrix, 2>& projs) {
    Matrix out(rho.dim());
    for (const Matrix& pr : projs) out += pr * rho * pr;
    return out;
}

// log of a PSD matrix restricted to its support (eigenvalues > cutoff).
Matrix support_log(const EigDecomposition& eig) {
    const int n = eig.vectors.dim();
    Matrix out(n);
    for (int k = 0; k < n; ++k) {
        const double lam = eig.eigenvalues[k];
        if (lam <= kSupportCutoff) continue;
        const double lg = std::log2(lam);
        for (int i = 0; i < n; ++i) {
            const cplx vik = eig.vectors(i, k);
            for (int j = 0; j < n; ++j)
                out(i, j) += lg * vik * std::conj(eig.vectors(j, k));
        }
    }
    return out;
}

// tr_T[ m (I_AB (x) phi) ] as an operator on A (x) B.
Matrix trace_out_ancilla(const Matrix& m, const Matrix& phi) {
    Matrix out(4);
    for (int ab = 0; ab < 4; ++ab)
        for (int apbp = 0; apbp < 4; ++apbp) {
            cplx s(0.0, 0.0);
            for (int t = 0; t < 2; ++t)
                for (int tp = 0; tp < 2; ++tp)
                    s += m(ab * 2 + t, apbp * 2 + tp) * phi(tp, t);
            out(ab, apbp) = s;
        }
    return out;
}

// Eigendecomposition of rho (x) |phi_p><phi_p| assembled from the 4x4
// problem: eigenvectors v_i (x) phi with the eigenvalues of rho, and
// v_i (x) phi_perp with eigenvalue zero.
EigDecomposition eigh_with_pure_ancilla(const Matrix& rho4, double p) {
    const EigDecomposition e4 = linalg::eigh(rho4);
    const double f[2] = {std::sqrt(1.0 - p), std::sqrt(p)};
    const double fp[2] = {f[1], -f[0]};

    struct Pair {
        double value;
        int src;   // eigenvector index in e4
        bool perp; // ancilla factor
    };
    std::array<Pair, 8> pairs;
    for (int i = 0; i < 4; ++i) {
        pairs[i] = {0.0, i, true};
        pairs[4 + i] = {e4.eigenvalues[i], i, false};
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& a, const Pair& b) { return a.value < b.value; });

    EigDecomposition out;
    out.eigenvalues.resize(8);
    out.vectors = Matrix(8);
    for (int k = 0; k < 8; ++k) {
        out.eigenvalues[k] = pairs[k].value;
        const double* anc = pairs[k].perp ? fp : f;
        for (int ab = 0; ab < 4; ++ab)
            for (int t = 0; t < 2; ++t)
                out.vectors(ab * 2 + t, k) = e4.vectors(ab, pairs[k].src) * anc[t];
    }
    return out;
}

struct DilatedObjects {
    Matrix ghat;                          // G(rho), 8x8
    std::array<std::array<Matrix, 2>, 2> projs;  // per x, embedded projectors
};

DilatedObjects build_dilated(const ObjectiveSpec& spec, double theta_a,
                             const StructuredState& state, Matrix* rho4_out = nullptr) {
    DilatedObjects d{Matrix(8), {}};
    const Matrix rho4 = state.to_density();
    if (rho4_out) *rho4_out = rho4;
    d.ghat = kron(rho4, ancilla_state(spec.p));
    const double thetas[2] = {0.0, theta_a};
    for (int x = 0; x < 2; ++x) {
        const auto pr = noisy_projectors(thetas[x], spec.p);
        d.projs[x] = {embed_at(pr[0]), embed_at(pr[1])};
    }
    return d;
}

}  // namespace

double lambda_term(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                   const StructuredState& state) {
    const Matrix gam = lambda_correlator(spec.lambda, theta_a, r);
    return linalg::real_trace_product(gam, state.to_density());
}

double eval_fobj(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                 const StructuredState& state) {
    spec.validate();
    Matrix rho4(4);
    const DilatedObjects d = build_dilated(spec, theta_a, state, &rho4);
    const EigDecomposition eig_g = eigh_with_pure_ancilla(rho4, spec.p);
    const double weights[2] = {spec.w0, spec.w1};
    double entropy = 0.0;
    for (int x = 0; x < 2; ++x) {
        if (weights[x] == 0.0) continue;
        const Matrix zx = pinch(d.ghat, d.projs[x]);
        entropy += weights[x] * linalg::rel_entropy_eig(eig_g, linalg::eigh(zx));
    }
    return entropy - lambda_term(spec, theta_a, r, state);
}

Matrix grad_state(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                  const StructuredState& state) {
    spec.validate();
    if (state.min_eigenvalue() <= 0.0)
        throw std::invalid_argument("grad_state: state must be positive definite");
    Matrix rho4(4);
    const DilatedObjects d = build_dilated(spec, theta_a, state, &rho4);
    const EigDecomposition eig_g = eigh_with_pure_ancilla(rho4, spec.p);
    const Matrix log_g = support_log(eig_g);
    const double weights[2] = {spec.w0, spec.w1};
    Matrix m(8);
    for (int x = 0; x < 2; ++x) {
        if (weights[x] == 0.0) continue;
        const Matrix zx = pinch(d.ghat, d.projs[x]);
        Matrix diff = log_g - support_log(linalg::eigh(zx));
        m += diff * weights[x];
    }
    Matrix cost = trace_out_ancilla(m, ancilla_state(spec.p));
    cost -= lambda_correlator(spec.lambda, theta_a, r);
    // Hermitize before projecting; m is Hermitian up to rounding.
    cost = (cost + cost.adjoint()) * 0.5;
    return project_structured(cost);
}

double eval_fobj_alt(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                     const StructuredState& state) {
    spec.validate();
    const Matrix rho = state.to_density();
    const double c0 = std::sqrt(1.0 - spec.p), c1 = std::sqrt(spec.p);
    const Matrix y = linalg::pauli_y();

    // V[(a,t), a'] for the flip isometry on A.
    cplx v[2][2][2] = {};
    for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap) {
            v[a][0][ap] = (a == ap) ? cplx(c0, 0.0) : cplx(0.0, 0.0);
            v[a][1][ap] = c1 * y(a, ap);
        }

    // G~(rho) = (V (x) I_B) rho (V (x) I_B)^dag on A (x) B (x) T.
    Matrix ghat(8);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int t = 0; t < 2; ++t)
                for (int ap = 0; ap < 2; ++ap)
                    for (int bp = 0; bp < 2; ++bp)
                        for (int tp = 0; tp < 2; ++tp) {
                            cplx s(0.0, 0.0);
                            for (int al = 0; al < 2; ++al)
                                for (int alp = 0; alp < 2; ++alp)
                                    s += v[a][t][al] * rho(al * 2 + b, alp * 2 + bp) *
                                         std::conj(v[ap][tp][alp]);
                            ghat((a * 2 + b) * 2 + t, (ap * 2 + bp) * 2 + tp) = s;
                        }

    const EigDecomposition eig_g = linalg::eigh(ghat);
    const double thetas[2] = {0.0, theta_a};
    const double weights[2] = {spec.w0, spec.w1};
    const Matrix id2 = Matrix::identity(2);
    double entropy = 0.0;
    for (int x = 0; x < 2; ++x) {
        if (weights[x] == 0.0) continue;
        const Matrix obs = pauli_at_angle(thetas[x]);
        const Matrix pi0 = (id2 + obs) * 0.5;
        const Matrix pi1 = (id2 - obs) * 0.5;
        // Pinch by Alice's plain projectors, identity on B and T.
        const std::array<Matrix, 2> projs = {kron(kron(pi0, id2), id2), kron(kron(pi1, id2), id2)};
        const Matrix zx = pinch(ghat, projs);
        entropy += weights[x] * linalg::rel_entropy_eig(eig_g, linalg::eigh(zx));
    }
    return entropy - lambda_term(spec, theta_a, r, state);
}

}  // namespace diqkd::certify

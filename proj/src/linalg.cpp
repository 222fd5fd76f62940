#include "diqkd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diqkd::linalg {

Matrix& Matrix::operator+=(const Matrix& o) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    const int n = a.dim();
    Matrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix Matrix::adjoint() const {
    Matrix m(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = std::conj((*this)(j, i));
    return m;
}

cplx Matrix::trace() const {
    cplx t(0.0, 0.0);
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += std::norm((*this)(i, j));
    return std::sqrt(s);
}

double Matrix::hermiticity_defect() const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

namespace {

double offdiag_norm(const Matrix& a) {
    double s = 0.0;
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigDecomposition eigh(const Matrix& m) {
    if (m.hermiticity_defect() > 1e-12)
        throw std::invalid_argument("eigh: input is not Hermitian within 1e-12");

    const int n = m.dim();
    // Symmetrize away the sub-tolerance defect so the iteration sees an
    // exactly Hermitian matrix.
    Matrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    Matrix v = Matrix::identity(n);

    constexpr int kMaxSweeps = 100;
    constexpr double kOffTol = 1e-13;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = offdiag_norm(a);
        if (off <= kOffTol) break;
        // Threshold sweep: skip rotations that cannot move the off-diagonal
        // norm much; the threshold decays with the remaining norm, so
        // convergence to the final tolerance is unaffected.
        const double thresh = off * 0.05 / (n * n);
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= thresh || mag < 1e-300) continue;
                const cplx phase = a(p, q) / mag;
                const cplx phase_c = std::conj(phase);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0.
                double t;
                if (tau >= 0.0)
                    t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * phase, spc = s * phase_c;

                // Unitary J = I except J(p,p)=c, J(p,q)=-s*phase,
                // J(q,p)=s*conj(phase), J(q,q)=c; apply A <- J^dag A J, V <- V J.
                for (int i = 0; i < n; ++i) {
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + spc * aiq;
                    a(i, q) = c * aiq - sp * aip;
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + spc * viq;
                    v(i, q) = c * viq - sp * vip;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + sp * aqj;
                    a(q, j) = c * aqj - spc * apj;
                }
            }
        }
    }

    std::vector<double> evals(n);
    for (int i = 0; i < n; ++i) evals[i] = a(i, i).real();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return evals[i] < evals[j]; });

    EigDecomposition out;
    out.eigenvalues.resize(n);
    out.vectors = Matrix(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = evals[order[k]];
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

double rel_entropy_eig(const EigDecomposition& rho_eig, const EigDecomposition& sigma_eig) {
    const int n = rho_eig.vectors.dim();
    const double log2e = 1.0 / std::log(2.0);

    double tr_rho_log_rho = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = rho_eig.eigenvalues[i];
        if (r > kSupportCutoff) tr_rho_log_rho += r * std::log(r) * log2e;
    }

    // Overlaps |<u_i|v_j>|^2 between the two eigenbases.
    double tr_rho_log_sigma = 0.0;
    double bad_weight = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = rho_eig.eigenvalues[i];
        if (r <= kSupportCutoff) continue;
        for (int j = 0; j < n; ++j) {
            cplx ov(0.0, 0.0);
            for (int k = 0; k < n; ++k)
                ov += std::conj(rho_eig.vectors(k, i)) * sigma_eig.vectors(k, j);
            const double w = std::norm(ov);
            const double s = sigma_eig.eigenvalues[j];
            if (s > kSupportCutoff)
                tr_rho_log_sigma += r * w * std::log(s) * log2e;
            else
                bad_weight += r * w;
        }
    }
    if (bad_weight > 1e-9)
        throw support_error("rel_entropy: rho has weight " + std::to_string(bad_weight) +
                            " outside the support of sigma");
    return tr_rho_log_rho - tr_rho_log_sigma;
}

double rel_entropy(const Matrix& rho, const Matrix& sigma) {
    const auto er = eigh(rho);
    const auto es = eigh(sigma);
    double tr = 0.0;
    for (double v : er.eigenvalues) tr += v;
    if (std::abs(tr - 1.0) > 1e-10)
        throw std::invalid_argument("rel_entropy: rho must have unit trace");
    for (double v : er.eigenvalues)
        if (v < -1e-10) throw std::invalid_argument("rel_entropy: rho must be PSD");
    return rel_entropy_eig(er, es);
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("binary_entropy: argument outside [0,1]");
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    const int na = a.dim(), nb = b.dim();
    const int n = na * nb;
    if (n != 4 && n != 8)
        throw std::invalid_argument("kron: product dimension must be 4 or 8");
    Matrix c(n);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l)
                    c(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
    return c;
}

Matrix pauli_x() {
    Matrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2);
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return m;
}

Matrix pauli_z() {
    Matrix m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

}  // namespace diqkd::linalg

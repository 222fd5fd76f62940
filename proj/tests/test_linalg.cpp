#include <cmath>

#include "diqkd/linalg.hpp"
#include "diqkd/rng.hpp"
#include "doctest.h"

using namespace diqkd;
using linalg::cplx;
using linalg::Matrix;

namespace {

Matrix random_hermitian(CounterRng& rng, int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = rng.next_range(-1.0, 1.0);
        for (int j = i + 1; j < n; ++j) {
            const cplx v(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0));
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return m;
}

Matrix random_density(CounterRng& rng, int n) {
    // A A^dag / tr, positive by construction.
    Matrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = cplx(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0));
    Matrix rho = a * a.adjoint();
    const double tr = rho.trace().real();
    return rho * (1.0 / tr);
}

double reconstruction_error(const Matrix& m, const linalg::EigDecomposition& e) {
    const int n = m.dim();
    Matrix lam(n);
    for (int i = 0; i < n; ++i) lam(i, i) = e.eigenvalues[i];
    const Matrix rec = e.vectors * lam * e.vectors.adjoint();
    return (rec - m).frobenius_norm();
}

}  // namespace

TEST_CASE("eigh identity") {
    const auto e = linalg::eigh(Matrix::identity(4));
    for (double v : e.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh pauli x spectrum") {
    const auto e = linalg::eigh(linalg::pauli_x());
    CHECK(e.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstructs random hermitian 8x8") {
    CounterRng rng(42, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = random_hermitian(rng, 8);
        const auto e = linalg::eigh(m);
        CHECK(reconstruction_error(m, e) < 1e-11);
        // unitarity
        const Matrix vv = e.vectors.adjoint() * e.vectors;
        CHECK((vv - Matrix::identity(8)).frobenius_norm() < 1e-11);
        // ascending order
        for (size_t i = 1; i < e.eigenvalues.size(); ++i)
            CHECK(e.eigenvalues[i] >= e.eigenvalues[i - 1]);
        // eigenvalue sum equals trace
        double sum = 0.0;
        for (double v : e.eigenvalues) sum += v;
        CHECK(sum == doctest::Approx(m.trace().real()).epsilon(1e-11));
    }
}

TEST_CASE("eigh rejects non-hermitian input") {
    Matrix m = Matrix::identity(2);
    m(0, 1) = 0.5;  // no conjugate partner
    CHECK_THROWS_AS(linalg::eigh(m), std::invalid_argument);
}

TEST_CASE("rel_entropy identical states is zero") {
    CounterRng rng(7, 0);
    const Matrix rho = random_density(rng, 4);
    CHECK(linalg::rel_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("rel_entropy deterministic vs uniform bit") {
    Matrix rho(2), sigma(2);
    rho(0, 0) = 1.0;
    sigma(0, 0) = 0.5;
    sigma(1, 1) = 0.5;
    CHECK(linalg::rel_entropy(rho, sigma) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rel_entropy matches classical KL for commuting diagonal pairs") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix rho(4), sigma(4);
        double pr[4], ps[4], zr = 0.0, zs = 0.0;
        for (int i = 0; i < 4; ++i) {
            pr[i] = rng.next_range(0.05, 1.0);
            ps[i] = rng.next_range(0.05, 1.0);
            zr += pr[i];
            zs += ps[i];
        }
        double kl = 0.0;
        for (int i = 0; i < 4; ++i) {
            pr[i] /= zr;
            ps[i] /= zs;
            rho(i, i) = pr[i];
            sigma(i, i) = ps[i];
            kl += pr[i] * std::log2(pr[i] / ps[i]);
        }
        CHECK(linalg::rel_entropy(rho, sigma) == doctest::Approx(kl).epsilon(1e-10));
    }
}

TEST_CASE("rel_entropy signals support violation") {
    Matrix rho(2), sigma(2);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    sigma(0, 0) = 1.0;  // null space carries rho weight
    CHECK_THROWS_AS(linalg::rel_entropy(rho, sigma), linalg::support_error);
}

TEST_CASE("rel_entropy nonnegative with equality iff equal") {
    CounterRng rng(13, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const Matrix rho = random_density(rng, 4);
        const Matrix sigma = random_density(rng, 4);
        const double d = linalg::rel_entropy(rho, sigma);
        CHECK(d >= -1e-9);
        if ((rho - sigma).frobenius_norm() > 1e-3) CHECK(d > 1e-9);
    }
}

TEST_CASE("rel_entropy invariant under eigenbasis representation of inputs") {
    // Conjugating both arguments by the same unitary permutation leaves the
    // value unchanged.
    CounterRng rng(17, 0);
    const Matrix rho = random_density(rng, 4);
    const Matrix sigma = random_density(rng, 4);
    Matrix perm(4);
    perm(0, 2) = 1.0;
    perm(1, 0) = 1.0;
    perm(2, 3) = 1.0;
    perm(3, 1) = 1.0;
    const double d1 = linalg::rel_entropy(rho, sigma);
    const double d2 = linalg::rel_entropy(perm * rho * perm.adjoint(), perm * sigma * perm.adjoint());
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-10));
}

TEST_CASE("binary_entropy values") {
    CHECK(linalg::binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(linalg::binary_entropy(0.0) == 0.0);
    CHECK(linalg::binary_entropy(1.0) == 0.0);
    CHECK(linalg::binary_entropy(0.06) == doctest::Approx(0.327444919154476).epsilon(1e-12));
    CHECK_THROWS_AS(linalg::binary_entropy(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(linalg::binary_entropy(1.1), std::invalid_argument);
}

TEST_CASE("kron basics") {
    const Matrix i4 = linalg::kron(Matrix::identity(2), Matrix::identity(2));
    CHECK((i4 - Matrix::identity(4)).frobenius_norm() < 1e-15);

    // Bell state correlators.
    Matrix phi_plus(4);
    phi_plus(0, 0) = 0.5;
    phi_plus(0, 3) = 0.5;
    phi_plus(3, 0) = 0.5;
    phi_plus(3, 3) = 0.5;
    const Matrix zz = linalg::kron(linalg::pauli_z(), linalg::pauli_z());
    const Matrix xx = linalg::kron(linalg::pauli_x(), linalg::pauli_x());
    CHECK(linalg::real_trace_product(zz, phi_plus) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linalg::real_trace_product(xx, phi_plus) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(linalg::kron(Matrix::identity(4), Matrix::identity(4)), std::invalid_argument);
}

#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace diqkd::linalg {

using cplx = std::complex<double>;

// Dense complex matrix with a fixed capacity of 8x8. All operators in this
// project act on 2-, 4- or 8-dimensional spaces, so a value type with inline
// storage avoids heap traffic in the hot loops.
class Matrix {
  public:
    Matrix() : n_(0) { a_.fill(cplx(0.0, 0.0)); }
    explicit Matrix(int n) : n_(n) {
        check_dim(n);
        a_.fill(cplx(0.0, 0.0));
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }

    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * 8 + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * 8 + j]; }

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);

    Matrix adjoint() const;
    cplx trace() const;
    double frobenius_norm() const;

    // Largest |A_ij - conj(A_ji)| over all entries.
    double hermiticity_defect() const;

    static void check_dim(int n) {
        if (n != 2 && n != 4 && n != 8)
            throw std::invalid_argument("matrix dimension must be 2, 4 or 8");
    }

  private:
    int n_;
    std::array<cplx, 64> a_;
};

struct EigDecomposition {
    std::vector<double> eigenvalues;  // ascending
    Matrix vectors;                   // columns are eigenvectors
};

// Cyclic Jacobi diagonalization of a Hermitian matrix. Sweeps until the
// off-diagonal Frobenius norm drops below 1e-13 (at most 100 sweeps).
// Throws std::invalid_argument if the input is not Hermitian within 1e-12.
EigDecomposition eigh(const Matrix& m);

// Thrown when rel_entropy detects weight of rho outside the support of sigma.
class support_error : public std::runtime_error {
  public:
    explicit support_error(const std::string& what) : std::runtime_error(what) {}
};

// Base-2 quantum relative entropy D(rho || sigma) = tr rho (log rho - log sigma).
// Eigenvalues below 1e-14 are treated as outside the support (0 log 0 = 0 on
// rho's null space). Throws support_error if rho carries more than 1e-9 weight
// on sigma's null space.
double rel_entropy(const Matrix& rho, const Matrix& sigma);

// Same, reusing precomputed eigendecompositions of both arguments.
double rel_entropy_eig(const EigDecomposition& rho_eig, const EigDecomposition& sigma_eig);

// Binary entropy in bits, with h(0) = h(1) = 0. Rejects x outside [0,1].
double binary_entropy(double x);

// Tensor product; the product dimension must be 4 or 8.
Matrix kron(const Matrix& a, const Matrix& b);

inline double real_trace_product(const Matrix& a, const Matrix& b) {
    // Re tr(a b), enough for pairings of Hermitian operators.
    double s = 0.0;
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s += (a(i, j) * b(j, i)).real();
    return s;
}

// Pauli matrices and friends.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

constexpr double kSupportCutoff = 1e-14;

}  // namespace diqkd::linalg

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coe/constants.hpp"

namespace coe {

using cplx = std::complex<double>;

// Dense row-major complex matrix for dimensions up to 16. Dimensions are
// fixed at construction; all operations return new values.
class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}
    ComplexMatrix(int rows, int cols);
    ComplexMatrix(int rows, int cols, std::vector<cplx> entries);

    static ComplexMatrix identity(int n);
    static ComplexMatrix zero(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<cplx>& data() const { return a_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conj() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    // max entrywise |A - A^dag|
    double hermiticity_defect() const;
    bool is_hermitian(double tol = tols::hermiticity) const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

    std::vector<cplx> apply(const std::vector<cplx>& v) const;

private:
    int rows_, cols_;
    std::vector<cplx> a_;
};

struct HermitianEigenSystem {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // orthonormal columns, phase-fixed
};

// Cyclic Jacobi eigensolver for complex Hermitian matrices (dim <= 16).
// Eigenvalues ascend; each eigenvector's largest-magnitude entry is made
// real and non-negative; degenerate clusters (gap < degenerate_gap) are
// re-orthonormalized against projected standard basis vectors so their
// resolution is deterministic.
HermitianEigenSystem hermitian_eig(const ComplexMatrix& a,
                                   double input_tol = tols::hermitian_input_reject);

// Real 3x3 helper type for coupling matrices and rotations.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity();
    static Mat3 zero();

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    Mat3 transposed() const;
    double det() const;
    double frobenius_norm() const;

    friend Mat3 operator*(const Mat3& a, const Mat3& b);
    friend Mat3 operator-(const Mat3& a, const Mat3& b);
};

struct SVD3 {
    Mat3 u;                      // proper rotation
    Mat3 v;                      // proper rotation
    std::array<double, 3> d{};   // sorted by descending |value|; signs absorbed here
};

// SVD of a real 3x3 matrix with both factors forced into SO(3): any
// reflection is repaired by flipping the sign of the column paired with
// the smallest-|d| entry, moving the sign into d.
SVD3 svd3(const Mat3& m);

// Kronecker product, first argument is the outer (slow) factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Adaptive Dormand-Prince RK45 propagation of v' = L v up to time t with
// relative local error controlled at tol. Throws on step-size underflow.
std::vector<cplx> propagate_linear(const ComplexMatrix& l, const std::vector<cplx>& v0,
                                   double t, double tol = tols::integrator_tol);

// Same integrator, recording the solution at every ascending grid time.
std::vector<std::vector<cplx>> propagate_linear_grid(const ComplexMatrix& l,
                                                     const std::vector<cplx>& v0,
                                                     const std::vector<double>& times,
                                                     double tol = tols::integrator_tol);

class LinalgError : public std::runtime_error {
public:
    explicit LinalgError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace coe

#pragma once

#include <array>

#include "coe/linalg.hpp"

namespace coe {

// Pauli matrices and friends, in the fixed computational basis
// |00>, |01>, |10>, |11> (qubit 1 is the left factor).
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& pauli_id();
const ComplexMatrix& sigma_minus();   // |0><1|, decay toward |0>
const ComplexMatrix& sigma_plus();    // |1><0|
const ComplexMatrix& pauli(int k);    // 0 -> x, 1 -> y, 2 -> z

// Columns are the Bell states |beta_ab| in order (00, 01, 10, 11):
//   |beta_ab> = (|0,b> + (-1)^a |1,~b>) / sqrt(2)
const ComplexMatrix& bell_matrix();

// Coefficient matrix eta plus scalar coupling g for
//   H = g * sum_{jk} eta_jk sigma_j (x) sigma_k.
struct CouplingMatrix {
    Mat3 eta;
    double g = 1.0;

    // eta = diag(exy/2, exy/2, 0), so H = g * exy * (s+ s- + s- s+)
    static CouplingMatrix flipflop(double eta_xy, double g = 1.0);
    static CouplingMatrix heisenberg(double ex, double ey, double ez, double g = 1.0);
    // eta_xy s_x s_y + eta_yz s_y s_z + eta_zx s_z s_x
    static CouplingMatrix permutation(double eta_xy, double eta_yz, double eta_zx, double g = 1.0);
};

// Diagonal couplings plus the local SU(2) factors realizing
//   (u1 (x) u2) H (u1 (x) u2)^dag = g * sum_k eta_k sigma_k (x) sigma_k,
// with eta_x >= eta_y >= eta_z (signs retained in the eta_k).
struct CanonicalHamiltonian {
    double eta_x = 0.0, eta_y = 0.0, eta_z = 0.0;
    ComplexMatrix u1, u2;  // 2x2 special-unitary
    double g = 1.0;

    std::array<double, 3> etas() const { return {eta_x, eta_y, eta_z}; }
    // g * sum_k eta_k sigma_k (x) sigma_k
    ComplexMatrix matrix() const;
    // sum_k eta_k sigma_k (x) sigma_k (the generator h, no g)
    ComplexMatrix generator() const;

    static CanonicalHamiltonian diagonal(double ex, double ey, double ez, double g = 1.0);
    static CanonicalHamiltonian flipflop(double eta_xy, double g = 1.0);
};

// omega_ab = (-1)^a eta_x - (-1)^(a+b) eta_y + (-1)^b eta_z, indexed
// (00, 01, 10, 11), together with the Bell eigenvectors.
struct BellEigensystem {
    std::array<double, 4> omegas{};
    ComplexMatrix bell_vectors;  // columns, same (ab) order

    double omega(int a, int b) const { return omegas[static_cast<std::size_t>(2 * a + b)]; }
};

ComplexMatrix build_matrix(const CouplingMatrix& cm);

CanonicalHamiltonian canonicalize(const CouplingMatrix& cm);

// Lift R in SO(3) to u in SU(2) with u sigma_k u^dag = sum_l R_kl sigma_l.
// Sign fixed by non-negative real trace; at the theta = pi branch the axis
// is drawn from the largest column of R + I with its first nonzero
// component made positive. Improper rotations are rejected.
ComplexMatrix su2_from_so3(const Mat3& r, double tol = tols::rotation_check);

BellEigensystem bell_eigensystem(const CanonicalHamiltonian& ch);

} // namespace coe

#pragma once

#include <cmath>

#include "coe/dynamics.hpp"
#include "coe/hamiltonian.hpp"
#include "coe/linalg.hpp"
#include "coe/rng.hpp"
#include "coe/states.hpp"

namespace coe::test {

inline double max_entry_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

inline ComplexMatrix random_hermitian(SplitMix64& rng, int n, double scale = 1.0) {
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = scale * rng.gaussian();
        for (int j = i + 1; j < n; ++j) {
            const cplx z(scale * rng.gaussian(), scale * rng.gaussian());
            a(i, j) = z;
            a(j, i) = std::conj(z);
        }
    }
    return a;
}

inline Mat3 random_mat3(SplitMix64& rng) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

// Rodrigues rotation about a random axis.
inline Mat3 random_rotation(SplitMix64& rng) {
    double n[3];
    double n2 = 0.0;
    for (double& e : n) {
        e = rng.gaussian();
        n2 += e * e;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double& e : n) e *= inv;
    const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double c = std::cos(ang), s = std::sin(ang);
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double nij = n[i] * n[j];
            r(i, j) = c * (i == j ? 1.0 : 0.0) + (1.0 - c) * nij;
        }
    r(0, 1) += -s * n[2];
    r(0, 2) += s * n[1];
    r(1, 0) += s * n[2];
    r(1, 2) += -s * n[0];
    r(2, 0) += -s * n[1];
    r(2, 1) += s * n[0];
    return r;
}

// Adjoint action defect: max_k || u sigma_k u^dag - sum_l R_kl sigma_l ||
inline double adjoint_action_defect(const ComplexMatrix& u, const Mat3& r) {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        ComplexMatrix lhs = u * pauli(k) * u.adjoint();
        ComplexMatrix rhs(2, 2);
        for (int l = 0; l < 3; ++l) rhs += cplx(r(k, l)) * pauli(l);
        worst = std::max(worst, max_entry_diff(lhs, rhs));
    }
    return worst;
}

} // namespace coe::test

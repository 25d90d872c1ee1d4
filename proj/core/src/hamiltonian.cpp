#include "coe/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coe {

namespace {

ComplexMatrix make2(cplx a, cplx b, cplx c, cplx d) {
    return ComplexMatrix(2, 2, {a, b, c, d});
}

} // namespace

const ComplexMatrix& pauli_x() {
    static const ComplexMatrix m = make2(0, 1, 1, 0);
    return m;
}
const ComplexMatrix& pauli_y() {
    static const ComplexMatrix m = make2(0, cplx(0, -1), cplx(0, 1), 0);
    return m;
}
const ComplexMatrix& pauli_z() {
    static const ComplexMatrix m = make2(1, 0, 0, -1);
    return m;
}
const ComplexMatrix& pauli_id() {
    static const ComplexMatrix m = make2(1, 0, 0, 1);
    return m;
}
const ComplexMatrix& sigma_minus() {
    static const ComplexMatrix m = make2(0, 1, 0, 0);
    return m;
}
const ComplexMatrix& sigma_plus() {
    static const ComplexMatrix m = make2(0, 0, 1, 0);
    return m;
}
const ComplexMatrix& pauli(int k) {
    switch (k) {
        case 0: return pauli_x();
        case 1: return pauli_y();
        case 2: return pauli_z();
        default: throw LinalgError("pauli: index out of range");
    }
}

const ComplexMatrix& bell_matrix() {
    static const ComplexMatrix b = [] {
        const double r = 1.0 / std::sqrt(2.0);
        ComplexMatrix m(4, 4);
        // |beta_00> = (|00> + |11>)/sqrt2
        m(0, 0) = r; m(3, 0) = r;
        // |beta_01> = (|01> + |10>)/sqrt2
        m(1, 1) = r; m(2, 1) = r;
        // |beta_10> = (|00> - |11>)/sqrt2
        m(0, 2) = r; m(3, 2) = -r;
        // |beta_11> = (|01> - |10>)/sqrt2
        m(1, 3) = r; m(2, 3) = -r;
        return m;
    }();
    return b;
}

CouplingMatrix CouplingMatrix::flipflop(double eta_xy, double g) {
    CouplingMatrix cm;
    cm.eta = Mat3::zero();
    cm.eta(0, 0) = 0.5 * eta_xy;
    cm.eta(1, 1) = 0.5 * eta_xy;
    cm.g = g;
    return cm;
}

CouplingMatrix CouplingMatrix::heisenberg(double ex, double ey, double ez, double g) {
    CouplingMatrix cm;
    cm.eta = Mat3::zero();
    cm.eta(0, 0) = ex;
    cm.eta(1, 1) = ey;
    cm.eta(2, 2) = ez;
    cm.g = g;
    return cm;
}

CouplingMatrix CouplingMatrix::permutation(double eta_xy, double eta_yz, double eta_zx, double g) {
    CouplingMatrix cm;
    cm.eta = Mat3::zero();
    cm.eta(0, 1) = eta_xy;
    cm.eta(1, 2) = eta_yz;
    cm.eta(2, 0) = eta_zx;
    cm.g = g;
    return cm;
}

ComplexMatrix CanonicalHamiltonian::generator() const {
    ComplexMatrix h(4, 4);
    const std::array<double, 3> e = etas();
    for (int k = 0; k < 3; ++k) {
        if (e[static_cast<std::size_t>(k)] == 0.0) continue;
        h += e[static_cast<std::size_t>(k)] * kron(pauli(k), pauli(k));
    }
    return h;
}

ComplexMatrix CanonicalHamiltonian::matrix() const { return cplx(g) * generator(); }

CanonicalHamiltonian CanonicalHamiltonian::diagonal(double ex, double ey, double ez, double g) {
    CanonicalHamiltonian ch;
    ch.eta_x = ex;
    ch.eta_y = ey;
    ch.eta_z = ez;
    ch.u1 = ComplexMatrix::identity(2);
    ch.u2 = ComplexMatrix::identity(2);
    ch.g = g;
    return ch;
}

CanonicalHamiltonian CanonicalHamiltonian::flipflop(double eta_xy, double g) {
    return diagonal(0.5 * eta_xy, 0.5 * eta_xy, 0.0, g);
}

ComplexMatrix build_matrix(const CouplingMatrix& cm) {
    ComplexMatrix h(4, 4);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const double c = cm.eta(j, k);
            if (c == 0.0) continue;
            h += cplx(c) * kron(pauli(j), pauli(k));
        }
    h *= cplx(cm.g);
    return h;
}

ComplexMatrix su2_from_so3(const Mat3& r, double tol) {
    // Validate R^T R = I and det R = +1.
    const Mat3 gram = r.transposed() * r;
    double defect = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            defect = std::max(defect, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    if (defect > tol) {
        std::ostringstream os;
        os << "su2_from_so3: input not orthogonal, max |R^T R - I| = " << defect;
        throw LinalgError(os.str());
    }
    if (std::abs(r.det() - 1.0) > std::max(tol, 1e-9)) {
        std::ostringstream os;
        os << "su2_from_so3: improper rotation, det R = " << r.det();
        throw LinalgError(os.str());
    }

    const double trace = r(0, 0) + r(1, 1) + r(2, 2);
    const double cang = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
    const double angle = std::acos(cang);

    // Axis from the antisymmetric part: w = n sin(angle).
    std::array<double, 3> w = {0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
                               0.5 * (r(1, 0) - r(0, 1))};
    const double wn = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);

    std::array<double, 3> axis{0.0, 0.0, 1.0};
    if (angle < 1e-12) {
        return ComplexMatrix::identity(2);
    }
    if (wn > 1e-6) {
        for (int i = 0; i < 3; ++i) axis[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / wn;
    } else {
        // theta = pi branch: R + I = 2 n n^T, take the largest column.
        int best = 0;
        double bestn = -1.0;
        for (int c = 0; c < 3; ++c) {
            double n2 = 0.0;
            for (int rr = 0; rr < 3; ++rr) {
                const double e = r(rr, c) + (rr == c ? 1.0 : 0.0);
                n2 += e * e;
            }
            if (n2 > bestn) {
                bestn = n2;
                best = c;
            }
        }
        double nn = 0.0;
        for (int rr = 0; rr < 3; ++rr) {
            axis[static_cast<std::size_t>(rr)] = r(rr, best) + (rr == best ? 1.0 : 0.0);
            nn += axis[static_cast<std::size_t>(rr)] * axis[static_cast<std::size_t>(rr)];
        }
        nn = std::sqrt(nn);
        for (auto& e : axis) e /= nn;
        // Align with the antisymmetric part if it still carries signal,
        // otherwise fix the sign deterministically.
        if (wn > 1e-12) {
            const double dot = axis[0] * w[0] + axis[1] * w[1] + axis[2] * w[2];
            if (dot < 0.0)
                for (auto& e : axis) e = -e;
        } else {
            for (int i = 0; i < 3; ++i) {
                if (std::abs(axis[static_cast<std::size_t>(i)]) > 1e-12) {
                    if (axis[static_cast<std::size_t>(i)] < 0.0)
                        for (auto& e : axis) e = -e;
                    break;
                }
            }
        }
    }

    // u = cos(angle/2) I + i sin(angle/2) (n . sigma) satisfies
    // u sigma_k u^dag = sum_l R_kl sigma_l; trace 2 cos(angle/2) >= 0.
    const double ch = std::cos(0.5 * angle);
    const double sh = std::sin(0.5 * angle);
    ComplexMatrix u = ComplexMatrix::identity(2);
    u *= cplx(ch);
    u += cplx(0.0, sh) * (cplx(axis[0]) * pauli_x() + cplx(axis[1]) * pauli_y() +
                          cplx(axis[2]) * pauli_z());
    return u;
}

CanonicalHamiltonian canonicalize(const CouplingMatrix& cm) {
    SVD3 dec = svd3(cm.eta);

    // Re-order the diagonal by descending value (the SVD sorts by |value|),
    // absorbing the axis relabeling into U and V as a proper rotation.
    std::array<int, 3> perm{0, 1, 2};
    std::stable_sort(perm.begin(), perm.end(), [&](int i, int j) {
        return dec.d[static_cast<std::size_t>(i)] > dec.d[static_cast<std::size_t>(j)];
    });

    Mat3 u = Mat3::zero();
    Mat3 v = Mat3::zero();
    std::array<double, 3> d{};
    for (int k = 0; k < 3; ++k) {
        const int src = perm[static_cast<std::size_t>(k)];
        d[static_cast<std::size_t>(k)] = dec.d[static_cast<std::size_t>(src)];
        for (int r = 0; r < 3; ++r) {
            u(r, k) = dec.u(r, src);
            v(r, k) = dec.v(r, src);
        }
    }
    // Odd permutations flip both determinants; flipping the same column of
    // U and V restores them without touching the couplings.
    const bool odd = (perm[0] == 0 && perm[1] == 2) || (perm[0] == 1 && perm[1] == 0) ||
                     (perm[0] == 2 && perm[1] == 1);
    if (odd) {
        int k = 0;
        double smallest = std::abs(d[0]);
        for (int i = 1; i < 3; ++i) {
            if (std::abs(d[static_cast<std::size_t>(i)]) <= smallest) {
                smallest = std::abs(d[static_cast<std::size_t>(i)]);
                k = i;
            }
        }
        for (int r = 0; r < 3; ++r) {
            u(r, k) = -u(r, k);
            v(r, k) = -v(r, k);
        }
    }

    CanonicalHamiltonian ch;
    ch.eta_x = d[0];
    ch.eta_y = d[1];
    ch.eta_z = d[2];
    ch.g = cm.g;
    ch.u1 = su2_from_so3(u);
    ch.u2 = su2_from_so3(v);
    return ch;
}

BellEigensystem bell_eigensystem(const CanonicalHamiltonian& ch) {
    BellEigensystem out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double sa = (a == 0) ? 1.0 : -1.0;
            const double sab = ((a + b) % 2 == 0) ? 1.0 : -1.0;
            const double sb = (b == 0) ? 1.0 : -1.0;
            out.omegas[static_cast<std::size_t>(2 * a + b)] =
                sa * ch.eta_x - sab * ch.eta_y + sb * ch.eta_z;
        }
    out.bell_vectors = bell_matrix();
    return out;
}

} // namespace coe

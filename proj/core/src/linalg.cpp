#include "coe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace coe {

namespace {
constexpr int kMaxDim = 16;

void check_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0 || rows > kMaxDim || cols > kMaxDim) {
        std::ostringstream os;
        os << "ComplexMatrix: dimensions " << rows << "x" << cols
           << " outside supported range 1.." << kMaxDim;
        throw LinalgError(os.str());
    }
}
} // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
    a_.assign(static_cast<std::size_t>(rows) * cols, cplx(0.0, 0.0));
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    check_dims(rows, cols);
    if (a_.size() != static_cast<std::size_t>(rows) * cols) {
        throw LinalgError("ComplexMatrix: entry count does not match dimensions");
    }
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::zero(int rows, int cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(i, j) = std::conj((*this)(i, j));
    return r;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    const int n = std::min(rows_, cols_);
    for (int i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double s = 0.0;
    for (const auto& z : a_) s = std::max(s, std::abs(z));
    return s;
}

double ComplexMatrix::hermiticity_defect() const {
    if (rows_ != cols_) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

bool ComplexMatrix::is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw LinalgError("matrix add: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw LinalgError("matrix sub: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& z : a_) z *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw LinalgError("matrix mul: shape mismatch");
    ComplexMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
        for (int k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

std::vector<cplx> ComplexMatrix::apply(const std::vector<cplx>& v) const {
    if (static_cast<int>(v.size()) != cols_) throw LinalgError("matrix apply: shape mismatch");
    std::vector<cplx> r(static_cast<std::size_t>(rows_), cplx(0.0, 0.0));
    for (int i = 0; i < rows_; ++i) {
        cplx s = 0.0;
        const cplx* row = a_.data() + static_cast<std::size_t>(i) * cols_;
        for (int j = 0; j < cols_; ++j) s += row[j] * v[j];
        r[i] = s;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver: cyclic Jacobi with complex rotations.
// ---------------------------------------------------------------------------

namespace {

double offdiag_frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Fix each column's phase: the largest-magnitude entry becomes real >= 0.
void apply_phase_convention(ComplexMatrix& v) {
    for (int c = 0; c < v.cols(); ++c) {
        int imax = 0;
        double best = -1.0;
        for (int r = 0; r < v.rows(); ++r) {
            const double m = std::abs(v(r, c));
            if (m > best) {
                best = m;
                imax = r;
            }
        }
        const cplx pivot = v(imax, c);
        if (std::abs(pivot) < 1e-300) continue;
        const cplx phase = std::conj(pivot) / std::abs(pivot);
        for (int r = 0; r < v.rows(); ++r) v(r, c) *= phase;
        v(imax, c) = cplx(v(imax, c).real(), 0.0);  // kill residual imaginary dust
    }
}

// Deterministic resolution of a degenerate cluster: greedily project the
// standard basis onto the cluster subspace and orthonormalize. Consumers
// must not rely on individual identities inside a cluster, but figures and
// reports want a stable choice.
void canonicalize_cluster(ComplexMatrix& v, int c0, int c1) {
    const int n = v.rows();
    const int m = c1 - c0;
    if (m < 2) return;

    // Cluster projector applied to standard basis vectors.
    std::vector<std::vector<cplx>> proj(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) {
        std::vector<cplx> p(static_cast<std::size_t>(n), cplx(0.0, 0.0));
        for (int c = c0; c < c1; ++c) {
            cplx coef = std::conj(v(e, c));  // <v_c | e>
            for (int r = 0; r < n; ++r) p[r] += coef * v(r, c);
        }
        proj[static_cast<std::size_t>(e)] = std::move(p);
    }

    std::vector<std::vector<cplx>> basis;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    while (static_cast<int>(basis.size()) < m) {
        int pick = -1;
        double best = -1.0;
        for (int e = 0; e < n; ++e) {
            if (used[static_cast<std::size_t>(e)]) continue;
            std::vector<cplx> cand = proj[static_cast<std::size_t>(e)];
            for (const auto& b : basis) {
                cplx ov = 0.0;
                for (int r = 0; r < n; ++r) ov += std::conj(b[r]) * cand[r];
                for (int r = 0; r < n; ++r) cand[r] -= ov * b[r];
            }
            double nrm = 0.0;
            for (const auto& z : cand) nrm += std::norm(z);
            nrm = std::sqrt(nrm);
            if (nrm > best + 1e-12) {
                best = nrm;
                pick = e;
            }
        }
        if (pick < 0 || best < 1e-8) break;  // fall back to Jacobi vectors
        used[static_cast<std::size_t>(pick)] = true;
        std::vector<cplx> nb = proj[static_cast<std::size_t>(pick)];
        for (const auto& b : basis) {
            cplx ov = 0.0;
            for (int r = 0; r < n; ++r) ov += std::conj(b[r]) * nb[r];
            for (int r = 0; r < n; ++r) nb[r] -= ov * b[r];
        }
        double nrm = 0.0;
        for (const auto& z : nb) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        for (auto& z : nb) z /= nrm;
        basis.push_back(std::move(nb));
    }
    if (static_cast<int>(basis.size()) != m) return;
    for (int k = 0; k < m; ++k)
        for (int r = 0; r < n; ++r) v(r, c0 + k) = basis[static_cast<std::size_t>(k)][r];
}

} // namespace

HermitianEigenSystem hermitian_eig(const ComplexMatrix& a, double input_tol) {
    if (a.rows() != a.cols()) throw LinalgError("hermitian_eig: matrix not square");
    const int n = a.rows();
    const double scale = std::max(a.frobenius_norm(), 1e-300);
    const double defect = a.hermiticity_defect();
    if (defect > input_tol * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "hermitian_eig: input not Hermitian, max |A - A^dag| = " << defect;
        throw LinalgError(os.str());
    }

    // Work on the symmetrized copy so the iteration sees an exactly
    // Hermitian matrix.
    ComplexMatrix w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double target = tols::jacobi_convergence * scale;

    for (int sweep = 0; sweep < 60; ++sweep) {
        if (offdiag_frobenius(w) <= target) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = w(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();

                // Angle zeroing the (p, q) element.
                const double tau = (aqq - app) / (2.0 * mag);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx phase = apq / mag;
                const cplx sp = s * phase;            // J(p,q) entry
                const cplx spc = s * std::conj(phase); // -J(q,p) entry

                // A <- J^dag A J, update rows/cols p and q.
                for (int k = 0; k < n; ++k) {
                    const cplx akp = w(k, p);
                    const cplx akq = w(k, q);
                    w(k, p) = c * akp - spc * akq;
                    w(k, q) = sp * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = w(p, k);
                    const cplx aqk = w(q, k);
                    w(p, k) = c * apk - sp * aqk;
                    w(q, k) = spc * apk + c * aqk;
                }
                w(p, q) = 0.0;
                w(q, p) = 0.0;
                w(p, p) = cplx(w(p, p).real(), 0.0);
                w(q, q) = cplx(w(q, q).real(), 0.0);

                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp - spc * vkq;
                    v(k, q) = sp * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return w(i, i).real() < w(j, j).real(); });

    HermitianEigenSystem out;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    out.eigenvectors = ComplexMatrix(n, n);
    for (int c = 0; c < n; ++c) {
        out.eigenvalues[static_cast<std::size_t>(c)] = w(order[static_cast<std::size_t>(c)], order[static_cast<std::size_t>(c)]).real();
        for (int r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[static_cast<std::size_t>(c)]);
    }

    // Deterministic treatment of degenerate clusters, then phase fixing.
    const double gap = tols::degenerate_gap * std::max(1.0, scale);
    int c0 = 0;
    while (c0 < n) {
        int c1 = c0 + 1;
        while (c1 < n && out.eigenvalues[static_cast<std::size_t>(c1)] - out.eigenvalues[static_cast<std::size_t>(c1 - 1)] < gap) ++c1;
        canonicalize_cluster(out.eigenvectors, c0, c1);
        c0 = c1;
    }
    apply_phase_convention(out.eigenvectors);
    return out;
}

// ---------------------------------------------------------------------------
// 3x3 real helpers and SVD
// ---------------------------------------------------------------------------

Mat3 Mat3::identity() {
    Mat3 r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = 1.0;
    return r;
}

Mat3 Mat3::zero() { return Mat3{}; }

Mat3 Mat3::transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[j][i] = m[i][j];
    return r;
}

double Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double Mat3::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
    return std::sqrt(s);
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

namespace {

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

} // namespace

SVD3 svd3(const Mat3& m) {
    // Eigendecomposition of M^T M via the Hermitian solver.
    ComplexMatrix b(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m.m[k][i] * m.m[k][j];
            b(i, j) = s;
        }
    HermitianEigenSystem es = hermitian_eig(b);

    // Singular values as ||M v_c||: the eigenvalues of M^T M lose half
    // their digits under the square root when tiny, while the
    // eigenvectors stay accurate (their gaps are set by the large
    // eigenvalues).
    std::array<double, 3> raw{};
    for (int c = 0; c < 3; ++c) {
        double n2 = 0.0;
        for (int r = 0; r < 3; ++r) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m.m[r][k] * es.eigenvectors(k, c).real();
            n2 += s * s;
        }
        raw[static_cast<std::size_t>(c)] = std::sqrt(n2);
    }

    // Descending order, then force V into SO(3) by flipping the column
    // paired with the smallest value.
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a2, int b2) {
        return raw[static_cast<std::size_t>(a2)] > raw[static_cast<std::size_t>(b2)];
    });
    std::array<double, 3> sv{};
    Mat3 v = Mat3::zero();
    for (int c = 0; c < 3; ++c) {
        const int src = order[static_cast<std::size_t>(c)];
        sv[static_cast<std::size_t>(c)] = raw[static_cast<std::size_t>(src)];
        for (int r = 0; r < 3; ++r) v.m[r][c] = es.eigenvectors(r, src).real();
    }
    if (v.det() < 0.0) {
        for (int r = 0; r < 3; ++r) v.m[r][2] = -v.m[r][2];
    }

    // U columns: image of V columns, with orthonormal completion for
    // rank-deficient directions.
    const double smax = std::max(sv[0], 1e-300);
    Mat3 u = Mat3::zero();
    std::array<bool, 3> formed{false, false, false};
    for (int c = 0; c < 3; ++c) {
        if (sv[static_cast<std::size_t>(c)] > 1e-12 * smax && sv[static_cast<std::size_t>(c)] > 0.0) {
            for (int r = 0; r < 3; ++r) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m.m[r][k] * v.m[k][c];
                u.m[r][c] = s / sv[static_cast<std::size_t>(c)];
            }
            formed[static_cast<std::size_t>(c)] = true;
        } else {
            sv[static_cast<std::size_t>(c)] = 0.0;
        }
    }

    // Gram-Schmidt cleanup of formed columns (they are near-orthonormal
    // already; this removes conditioning dust), then completion.
    std::vector<std::array<double, 3>> cols;
    for (int c = 0; c < 3; ++c) {
        if (!formed[static_cast<std::size_t>(c)]) continue;
        std::array<double, 3> x{u.m[0][c], u.m[1][c], u.m[2][c]};
        for (const auto& p : cols) {
            const double ov = x[0] * p[0] + x[1] * p[1] + x[2] * p[2];
            for (int r = 0; r < 3; ++r) x[static_cast<std::size_t>(r)] -= ov * p[static_cast<std::size_t>(r)];
        }
        const double nr = norm3(x);
        for (auto& e : x) e /= nr;
        for (int r = 0; r < 3; ++r) u.m[r][c] = x[static_cast<std::size_t>(r)];
        cols.push_back(x);
    }
    for (int c = 0; c < 3; ++c) {
        if (formed[static_cast<std::size_t>(c)]) continue;
        std::array<double, 3> x{};
        if (cols.size() == 2) {
            x = cross(cols[0], cols[1]);
        } else {
            // Pick the standard basis vector least aligned with what exists.
            for (int e = 0; e < 3; ++e) {
                std::array<double, 3> cand{};
                cand[static_cast<std::size_t>(e)] = 1.0;
                for (const auto& p : cols) {
                    const double ov = cand[0] * p[0] + cand[1] * p[1] + cand[2] * p[2];
                    for (int r = 0; r < 3; ++r) cand[static_cast<std::size_t>(r)] -= ov * p[static_cast<std::size_t>(r)];
                }
                if (norm3(cand) > 0.5) {
                    x = cand;
                    break;
                }
            }
        }
        const double nr = norm3(x);
        for (auto& e : x) e /= nr;
        for (int r = 0; r < 3; ++r) u.m[r][c] = x[static_cast<std::size_t>(r)];
        cols.push_back(x);
    }

    // Move any reflection into the smallest-|d| column of U.
    if (u.det() < 0.0) {
        int k = 2;  // sv is descending, so index 2 carries the smallest |d|
        for (int r = 0; r < 3; ++r) u.m[r][k] = -u.m[r][k];
        sv[static_cast<std::size_t>(k)] = -sv[static_cast<std::size_t>(k)];
    }

    return SVD3{u, v, sv};
}

// ---------------------------------------------------------------------------
// Kronecker product and linear propagation
// ---------------------------------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int rows = a.rows() * b.rows();
    const int cols = a.cols() * b.cols();
    if (rows > kMaxDim || cols > kMaxDim) throw LinalgError("kron: result exceeds 16x16");
    ComplexMatrix r(rows, cols);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0,        7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct Rk45Stepper {
    const ComplexMatrix& l;
    double tol;

    // One attempted step; returns the error estimate norm.
    double step(const std::vector<cplx>& y, double h, std::vector<cplx>& out,
                std::array<std::vector<cplx>, 7>& k) const {
        const std::size_t n = y.size();
        std::vector<cplx> tmp(n);
        k[0] = l.apply(y);
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                cplx acc = y[i];
                for (int j = 0; j < s; ++j) acc += h * kA[s][j] * k[static_cast<std::size_t>(j)][i];
                tmp[i] = acc;
            }
            k[static_cast<std::size_t>(s)] = l.apply(tmp);
        }
        out.resize(n);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx y5 = y[i];
            cplx y4 = y[i];
            for (int s = 0; s < 7; ++s) {
                y5 += h * kB5[s] * k[static_cast<std::size_t>(s)][i];
                y4 += h * kB4[s] * k[static_cast<std::size_t>(s)][i];
            }
            out[i] = y5;
            const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5)));
            const double component = std::abs(y5 - y4) / sc;
            if (!std::isfinite(component)) return std::numeric_limits<double>::infinity();
            err = std::max(err, component);
        }
        return err;
    }
};

void advance_to(const ComplexMatrix& l, std::vector<cplx>& y, double& t, double t_end, double tol,
                double& h) {
    Rk45Stepper stepper{l, tol};
    std::array<std::vector<cplx>, 7> k;
    std::vector<cplx> ynew;
    const double direction = (t_end >= t) ? 1.0 : -1.0;
    int rejects_in_a_row = 0;
    while (direction * (t_end - t) > 1e-15 * std::max(1.0, std::abs(t_end))) {
        const double remaining = t_end - t;
        if (std::abs(h) > std::abs(remaining)) h = remaining;
        const double err = stepper.step(y, h, ynew, k);
        if (err <= 1.0) {
            t += h;
            y = ynew;
            rejects_in_a_row = 0;
            const double grow = (err < 1e-12) ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
            h *= std::max(grow, 0.3);
            if (std::abs(h) > std::abs(t_end - t) && std::abs(t_end - t) > 0.0) h = t_end - t;
        } else {
            ++rejects_in_a_row;
            h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t_end)) || rejects_in_a_row > 60) {
                throw LinalgError("propagate_linear: step-size underflow, integration failed");
            }
        }
    }
}

double initial_step(const ComplexMatrix& l, double t, double tol) {
    const double lnorm = std::max(l.frobenius_norm(), 1e-12);
    double h = 0.1 / lnorm;
    h = std::min(h, std::abs(t));
    if (h <= 0.0) h = std::abs(t);
    (void)tol;
    return (t >= 0.0) ? h : -h;
}

} // namespace

std::vector<cplx> propagate_linear(const ComplexMatrix& l, const std::vector<cplx>& v0, double t,
                                   double tol) {
    if (l.rows() != l.cols()) throw LinalgError("propagate_linear: generator not square");
    if (static_cast<int>(v0.size()) != l.cols()) throw LinalgError("propagate_linear: shape mismatch");
    if (tol <= 0.0) throw LinalgError("propagate_linear: tol must be positive");
    if (t == 0.0) return v0;
    std::vector<cplx> y = v0;
    double tc = 0.0;
    double h = initial_step(l, t, tol);
    advance_to(l, y, tc, t, tol, h);
    return y;
}

std::vector<std::vector<cplx>> propagate_linear_grid(const ComplexMatrix& l,
                                                     const std::vector<cplx>& v0,
                                                     const std::vector<double>& times, double tol) {
    if (tol <= 0.0) throw LinalgError("propagate_linear_grid: tol must be positive");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw LinalgError("propagate_linear_grid: times must ascend");
    }
    std::vector<std::vector<cplx>> out;
    out.reserve(times.size());
    std::vector<cplx> y = v0;
    double tc = 0.0;
    double h = times.empty() ? 0.0 : initial_step(l, std::max(times.back(), 1e-12), tol);
    for (const double tg : times) {
        if (tg < 0.0) throw LinalgError("propagate_linear_grid: negative time");
        if (tg > tc) advance_to(l, y, tc, tg, tol, h);
        out.push_back(y);
    }
    return out;
}

} // namespace coe

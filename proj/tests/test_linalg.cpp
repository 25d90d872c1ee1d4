#include "doctest.h"

#include <cmath>

#include "helpers.hpp"

using namespace coe;
using coe::test::max_entry_diff;
using coe::test::random_hermitian;
using coe::test::random_mat3;

namespace {

Mat3 from_rows(std::initializer_list<double> vals) {
    Mat3 m;
    auto it = vals.begin();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = *it++;
    return m;
}

double svd_defect(const Mat3& m, const SVD3& s) {
    Mat3 rec = Mat3::zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += s.u(i, k) * s.d[static_cast<std::size_t>(k)] * s.v(j, k);
            rec(i, j) = acc;
        }
    return (rec - m).frobenius_norm();
}

double orthogonality_defect(const Mat3& r) {
    const Mat3 g = r.transposed() * r;
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return d;
}

} // namespace

TEST_CASE("hermitian_eig: identity") {
    const auto es = hermitian_eig(ComplexMatrix::identity(4));
    for (double l : es.eigenvalues) CHECK(l == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(max_entry_diff(es.eigenvectors * es.eigenvectors.adjoint(), ComplexMatrix::identity(4)) < 1e-12);
}

TEST_CASE("hermitian_eig: already diagonal") {
    ComplexMatrix a(4, 4);
    a(0, 0) = -3.0;
    a(1, 1) = -1.0;
    a(2, 2) = 1.0;
    a(3, 3) = 3.0;
    const auto es = hermitian_eig(a);
    CHECK(es.eigenvalues[0] == doctest::Approx(-3.0));
    CHECK(es.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues[2] == doctest::Approx(1.0));
    CHECK(es.eigenvalues[3] == doctest::Approx(3.0));
    CHECK(max_entry_diff(es.eigenvectors, ComplexMatrix::identity(4)) < 1e-12);
}

TEST_CASE("hermitian_eig: flip-flop spectrum is (-1, 0, 0, 1)") {
    // g eta_xy = 1: H = sp (x) sm + sm (x) sp
    const ComplexMatrix h = kron(sigma_plus(), sigma_minus()) + kron(sigma_minus(), sigma_plus());
    const auto es = hermitian_eig(h);
    CHECK(es.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(es.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.eigenvalues[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.eigenvalues[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_eig: rejects non-Hermitian input with a diagnostic") {
    ComplexMatrix a(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_WITH_AS(hermitian_eig(a), doctest::Contains("not Hermitian"), LinalgError);
}

TEST_CASE("hermitian_eig: reconstruction on 1000 random Hermitian 4x4") {
    SplitMix64 rng(42);
    for (int n = 0; n < 1000; ++n) {
        const ComplexMatrix a = random_hermitian(rng, 4);
        const auto es = hermitian_eig(a);
        const double scale = std::max(a.frobenius_norm(), 1e-12);

        ComplexMatrix rec(4, 4);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    rec(i, j) += es.eigenvalues[static_cast<std::size_t>(k)] * es.eigenvectors(i, k) *
                                 std::conj(es.eigenvectors(j, k));
        REQUIRE(max_entry_diff(rec, a) < 1e-10 * scale);

        // Orthonormality and the eigen-residual contract.
        REQUIRE(max_entry_diff(es.eigenvectors.adjoint() * es.eigenvectors,
                               ComplexMatrix::identity(4)) < 1e-10);
        for (int k = 0; k < 4; ++k) {
            std::vector<cplx> v(4);
            for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = es.eigenvectors(i, k);
            const auto av = a.apply(v);
            double res = 0.0;
            for (int i = 0; i < 4; ++i)
                res += std::norm(av[static_cast<std::size_t>(i)] -
                                 es.eigenvalues[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(i)]);
            REQUIRE(std::sqrt(res) < 1e-10 * scale);
        }

        // Phase convention: largest-magnitude entry real and non-negative.
        for (int k = 0; k < 4; ++k) {
            int imax = 0;
            double best = -1.0;
            for (int i = 0; i < 4; ++i) {
                if (std::abs(es.eigenvectors(i, k)) > best) {
                    best = std::abs(es.eigenvectors(i, k));
                    imax = i;
                }
            }
            REQUIRE(es.eigenvectors(imax, k).real() >= 0.0);
            REQUIRE(std::abs(es.eigenvectors(imax, k).imag()) < 1e-10);
        }
    }
}

TEST_CASE("hermitian_eig: eigenvalues ascend") {
    SplitMix64 rng(7);
    for (int n = 0; n < 50; ++n) {
        const auto es = hermitian_eig(random_hermitian(rng, 4));
        for (std::size_t k = 1; k < es.eigenvalues.size(); ++k)
            REQUIRE(es.eigenvalues[k] >= es.eigenvalues[k - 1]);
    }
}

TEST_CASE("svd3: identity and diagonal") {
    const SVD3 s1 = svd3(Mat3::identity());
    CHECK(svd_defect(Mat3::identity(), s1) < 1e-14);
    CHECK(s1.d[0] == doctest::Approx(1.0));
    CHECK(s1.d[1] == doctest::Approx(1.0));
    CHECK(s1.d[2] == doctest::Approx(1.0));

    Mat3 d = Mat3::zero();
    d(0, 0) = 3.0;
    d(1, 1) = 2.0;
    d(2, 2) = 1.0;
    const SVD3 s2 = svd3(d);
    CHECK(s2.d[0] == doctest::Approx(3.0));
    CHECK(s2.d[1] == doctest::Approx(2.0));
    CHECK(s2.d[2] == doctest::Approx(1.0));
    CHECK(max_entry_diff(ComplexMatrix(1, 1, {s2.u(0, 0)}), ComplexMatrix(1, 1, {1.0})) < 1e-12);
    CHECK(orthogonality_defect(s2.u) < 1e-12);
    CHECK(svd_defect(d, s2) < 1e-13);
}

TEST_CASE("svd3: permutation coefficient matrix with unit entries") {
    const Mat3 m = from_rows({0, 1, 0, 0, 0, 1, 1, 0, 0});
    const SVD3 s = svd3(m);
    CHECK(svd_defect(m, s) < 1e-12);
    CHECK(s.u.det() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.v.det() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) CHECK(s.d[static_cast<std::size_t>(k)] == doctest::Approx(1.0));
}

TEST_CASE("svd3: properties on 1000 random matrices including rank deficiency") {
    SplitMix64 rng(11);
    for (int n = 0; n < 1000; ++n) {
        Mat3 m = random_mat3(rng);
        if (n % 3 == 1) {
            // rank 1: outer product
            double a[3], b[3];
            for (int i = 0; i < 3; ++i) a[i] = rng.uniform(-1.0, 1.0);
            for (int i = 0; i < 3; ++i) b[i] = rng.uniform(-1.0, 1.0);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
        } else if (n % 3 == 2) {
            // rank 2: zero out one column after projection
            Mat3 r = random_mat3(rng);
            for (int i = 0; i < 3; ++i) r(i, 2) = r(i, 0) + r(i, 1);
            m = r;
        }
        const SVD3 s = svd3(m);
        const double scale = std::max(m.frobenius_norm(), 1e-12);
        REQUIRE(svd_defect(m, s) < 1e-12 * std::max(1.0, scale));
        REQUIRE(orthogonality_defect(s.u) < 1e-12);
        REQUIRE(orthogonality_defect(s.v) < 1e-12);
        REQUIRE(s.u.det() == doctest::Approx(1.0).epsilon(1e-10));
        REQUIRE(s.v.det() == doctest::Approx(1.0).epsilon(1e-10));
        REQUIRE(std::abs(s.d[0]) >= std::abs(s.d[1]));
        REQUIRE(std::abs(s.d[1]) >= std::abs(s.d[2]));
    }
}

TEST_CASE("kron: products") {
    CHECK(max_entry_diff(kron(pauli_id(), pauli_id()), ComplexMatrix::identity(4)) < 1e-15);

    ComplexMatrix zz(4, 4);
    zz(0, 0) = 1.0;
    zz(1, 1) = -1.0;
    zz(2, 2) = -1.0;
    zz(3, 3) = 1.0;
    CHECK(max_entry_diff(kron(pauli_z(), pauli_z()), zz) < 1e-15);

    // sigma_x (x) sigma_y: antidiagonal (-i, i, -i, i) from top-right.
    ComplexMatrix xy(4, 4);
    xy(0, 3) = cplx(0, -1);
    xy(1, 2) = cplx(0, 1);
    xy(2, 1) = cplx(0, -1);
    xy(3, 0) = cplx(0, 1);
    CHECK(max_entry_diff(kron(pauli_x(), pauli_y()), xy) < 1e-15);

    CHECK_THROWS_AS(kron(ComplexMatrix::identity(8), ComplexMatrix::identity(4)), LinalgError);
}

TEST_CASE("propagate_linear: trivial generators") {
    std::vector<cplx> v0 = {cplx(1, 2), cplx(-0.5, 0.25), cplx(0, 1)};
    const ComplexMatrix zero3(3, 3);
    const auto r0 = propagate_linear(zero3, v0, 7.0, 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r0[static_cast<std::size_t>(i)] - v0[static_cast<std::size_t>(i)]) < 1e-12);

    const double kappa = 0.8;
    ComplexMatrix decay = ComplexMatrix::identity(3);
    decay *= cplx(-kappa);
    const auto r1 = propagate_linear(decay, v0, 1.0 / kappa, 1e-10);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(r1[static_cast<std::size_t>(i)] - v0[static_cast<std::size_t>(i)] * std::exp(-1.0)) < 1e-9);
}

TEST_CASE("propagate_linear: trace preserved under random GKSL generators") {
    SplitMix64 rng(5);
    for (int n = 0; n < 20; ++n) {
        const ComplexMatrix h = random_hermitian(rng, 4);
        NoiseSpec noise;
        noise.kappa = std::abs(rng.uniform(0.0, 1.0));
        ComplexMatrix j1(4, 4), j2(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                j1(i, k) = cplx(rng.gaussian(), rng.gaussian()) * 0.5;
                j2(i, k) = cplx(rng.gaussian(), rng.gaussian()) * 0.5;
            }
        noise.jump_ops = {j1, j2};
        const ComplexMatrix l = liouvillian(h, noise);

        const DensityMatrix rho0 = random_density_matrix(1000 + static_cast<std::uint64_t>(n), 4);
        std::vector<cplx> v(16);
        for (int col = 0; col < 4; ++col)
            for (int row = 0; row < 4; ++row) v[static_cast<std::size_t>(row + 4 * col)] = rho0.rho(row, col);
        const double t = 1.5;
        const auto vt = propagate_linear(l, v, t, 1e-10);
        cplx tr = 0.0;
        for (int i = 0; i < 4; ++i) tr += vt[static_cast<std::size_t>(i + 4 * i)];
        REQUIRE(std::abs(tr - cplx(1.0)) < 1e-8 * t);
    }
}

TEST_CASE("propagate_linear: integration failure raises") {
    ComplexMatrix bad(2, 2);
    bad(0, 0) = cplx(std::nan(""), 0.0);
    std::vector<cplx> v0 = {1.0, 0.0};
    CHECK_THROWS_AS(propagate_linear(bad, v0, 1.0, 1e-9), LinalgError);
    CHECK_THROWS_AS(propagate_linear(ComplexMatrix::identity(2), v0, 1.0, -1.0), LinalgError);
}

#include "doctest.h"

#include <cmath>

#include "coe/metrology.hpp"
#include "helpers.hpp"

using namespace coe;
using coe::test::max_entry_diff;

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// Hand-differentiated elements of the analytic separable evolution.
ComplexMatrix drho_separable_exact(double g, double kappa, double t) {
    const double e = std::exp(-kappa * t);
    ComplexMatrix d(4, 4);
    d(1, 1) = -t * e * std::sin(2.0 * g * t);
    d(2, 2) = t * e * std::sin(2.0 * g * t);
    d(1, 2) = cplx(0.0, t * e * std::cos(2.0 * g * t));
    d(2, 1) = std::conj(d(1, 2));
    return d;
}

DensityMatrix rho_opt(double g, double kappa, double t) {
    return analytic_open_separable(g, kappa, t);
}

} // namespace

TEST_CASE("qfi_pure: flip-flop reference values") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    CHECK(qfi_pure(named_state(StateFamily::psi_opt), ch, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));

    // psi_alpha(0.3): F = 16 a^2 (1 - a^2) t^2 eta^2 = 1.3104 at t = 1.
    CHECK(qfi_pure(named_state(StateFamily::psi_alpha, 0.3), ch, 1.0, 1.0) ==
          doctest::Approx(1.3104).epsilon(1e-12));

    // A Bell eigenstate has zero variance.
    PureState bell;
    bell.basis = Basis::bell;
    bell.amps = {cplx(0.0), cplx(1.0), cplx(0.0), cplx(0.0)};
    CHECK(qfi_pure(bell, ch, 1.0, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("qfi_pure: is independent of g") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::diagonal(0.8, 0.3, 0.1);
    const PureState s = random_pure_state(3);
    CHECK(qfi_pure(s, ch, 0.5, 1.7) == doctest::Approx(qfi_pure(s, ch, 2.5, 1.7)).epsilon(1e-14));
}

TEST_CASE("qfi_mixed: zero derivative and the open-system values") {
    const DensityMatrix rho = rho_opt(1.0, 0.5, 1.0);
    CHECK(qfi_mixed(rho, ComplexMatrix(4, 4)) == doctest::Approx(0.0));

    // F(t) = 4 t^2 e^{-kappa t}: at g = 1, kappa = 0.5, t = 1.
    CHECK(qfi_mixed(rho, drho_separable_exact(1.0, 0.5, 1.0)) ==
          doctest::Approx(4.0 * std::exp(-0.5)).epsilon(1e-9));

    // Entangled family: F = 4 t^2 e^{-kappa t} (1 - 2 a^2)^2.
    const double alpha = 0.25, kappa = 0.5, g = 1.0;
    for (double t : {0.8, 1.6, 3.1}) {
        const DensityMatrix re = analytic_open_entangled(alpha, g, kappa, t);
        DerivativeConfig cfg;
        cfg.scheme = DerivativeConfig::Scheme::richardson;
        cfg.step = 1e-3;
        const ComplexMatrix dre = drho_dg(
            [&](double gg) { return analytic_open_entangled(alpha, gg, kappa, t); }, g, cfg);
        const double expect = 4.0 * t * t * std::exp(-kappa * t) * 0.765625;
        REQUIRE(qfi_mixed(re, dre) == doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("drho_dg: reference behaviours") {
    // g-independent source.
    const DensityMatrix flat = random_density_matrix(5, 3);
    const ComplexMatrix zero = drho_dg([&](double) { return flat; }, 1.0);
    CHECK(zero.max_abs() < 1e-10);

    // Closed pure case: finite differences agree with -i t [h, rho].
    const CanonicalHamiltonian ch = CanonicalHamiltonian::diagonal(0.9, 0.55, 0.2);
    const PureState s0 = random_pure_state(77);
    const double g = 1.1, t = 1.9;
    const ComplexMatrix exact = drho_closed_exact(s0, ch, g, t);
    DerivativeConfig cfg;
    cfg.scheme = DerivativeConfig::Scheme::richardson;
    cfg.step = 1e-3;
    const ComplexMatrix fd = drho_dg(
        [&](double gg) {
            return DensityMatrix::from_pure(to_computational(evolve_closed(s0, ch, gg, t)));
        },
        g, cfg);
    CHECK(max_entry_diff(fd, exact) < 1e-7);

    // Open separable case vs the hand-differentiated listing.
    const double kappa = 0.5;
    for (double tt : {0.5, 1.3, 2.9}) {
        const ComplexMatrix fd2 =
            drho_dg([&](double gg) { return rho_opt(gg, kappa, tt); }, 1.0, cfg);
        REQUIRE(max_entry_diff(fd2, drho_separable_exact(1.0, kappa, tt)) < 1e-7);
    }

    // All schemes stay Hermitian and traceless.
    for (auto scheme : {DerivativeConfig::Scheme::central3, DerivativeConfig::Scheme::central5,
                        DerivativeConfig::Scheme::richardson}) {
        DerivativeConfig c2;
        c2.scheme = scheme;
        const ComplexMatrix d = drho_dg([&](double gg) { return rho_opt(gg, kappa, 1.0); }, 1.0, c2);
        REQUIRE(d.hermiticity_defect() < 1e-14);
        REQUIRE(std::abs(d.trace()) < 1e-14);
    }
}

TEST_CASE("sld: pure flip-flop probe reproduces the closed-form matrix") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const PureState s0 = named_state(StateFamily::psi_opt);
    const double g = 0.9, t = 1.4, eta = 1.0;

    const PureState psi = to_computational(evolve_closed(s0, ch, g, t));
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    const SLDOperator l = sld(rho, drho_closed_exact(s0, ch, g, t));

    const double s2 = std::sin(2.0 * g * t * eta), c2 = std::cos(2.0 * g * t * eta);
    ComplexMatrix expect(4, 4);
    expect(1, 1) = -2.0 * t * eta * s2;
    expect(2, 2) = 2.0 * t * eta * s2;
    expect(1, 2) = cplx(0.0, 2.0 * t * eta * c2);
    expect(2, 1) = std::conj(expect(1, 2));
    CHECK(max_entry_diff(l.matrix, expect) < 1e-9);

    // Consistency contracts.
    CHECK((rho.rho * l.matrix).trace().real() == doctest::Approx(0.0).epsilon(1e-7));
    CHECK((rho.rho * l.matrix * l.matrix).trace().real() ==
          doctest::Approx(qfi_pure(s0, ch, g, t)).epsilon(1e-6));

    // SLD defining equation on the support.
    const ComplexMatrix recon = cplx(0.5) * (l.matrix * rho.rho + rho.rho * l.matrix);
    CHECK(max_entry_diff(recon, drho_closed_exact(s0, ch, g, t)) < 1e-7);
}

TEST_CASE("sld: diagonal at sin(2 g t eta) = 1") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const PureState s0 = named_state(StateFamily::psi_opt);
    const double g = 1.0, t = kPi / 4.0;
    const SLDOperator l = sld(DensityMatrix::from_pure(to_computational(evolve_closed(s0, ch, g, t))),
                              drho_closed_exact(s0, ch, g, t));
    double offdiag = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) offdiag = std::max(offdiag, std::abs(l.matrix(i, j)));
    CHECK(offdiag < 1e-10);
}

TEST_CASE("sld: psi_alpha family shares the operator direction") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const double g = 1.0, t = 0.8;
    const PureState opt = named_state(StateFamily::psi_opt);
    const SLDOperator l_opt = sld(
        DensityMatrix::from_pure(to_computational(evolve_closed(opt, ch, g, t))),
        drho_closed_exact(opt, ch, g, t));

    for (double alpha : {0.2, 0.3, 0.6}) {
        const PureState sa = named_state(StateFamily::psi_alpha, alpha);
        const SLDOperator l_a = sld(
            DensityMatrix::from_pure(to_computational(evolve_closed(sa, ch, g, t))),
            drho_closed_exact(sa, ch, g, t));
        const double scale = 2.0 * alpha * std::sqrt(1.0 - alpha * alpha);
        ComplexMatrix scaled = l_opt.matrix;
        scaled *= cplx(scale);
        REQUIRE(max_entry_diff(l_a.matrix, scaled) < 1e-8);
    }
}

TEST_CASE("sld_eigen_concurrences: open separable case gives |cos 2gt| pairs") {
    const double g = 1.0, kappa = 0.5;
    DerivativeConfig cfg;
    cfg.scheme = DerivativeConfig::Scheme::richardson;
    cfg.step = 5e-4;
    for (double t : {0.6, 1.2, 2.5}) {
        const DensityMatrix rho = rho_opt(g, kappa, t);
        const SLDOperator l = sld(rho, drho_separable_exact(g, kappa, t));
        const auto pairs = sld_eigen_concurrences(l);
        REQUIRE(pairs.size() == 4);
        int nonzero = 0;
        for (const auto& [ev, c] : pairs) {
            if (std::abs(ev) > 1e-9) {
                ++nonzero;
                REQUIRE(c == doctest::Approx(std::abs(std::cos(2.0 * g * t))).epsilon(1e-7));
            }
        }
        REQUIRE(nonzero == 2);
    }

    // At gt = pi/4 the SLD eigenvectors are product states.
    const double t = kPi / 4.0;
    const SLDOperator l = sld(rho_opt(g, kappa, t), drho_separable_exact(g, kappa, t));
    for (const auto& [ev, c] : sld_eigen_concurrences(l)) {
        if (std::abs(ev) > 1e-9) REQUIRE(c < 1e-9);
    }
}

TEST_CASE("sld_eigen_concurrences: phi_alpha has |00> plus three entangled eigenvectors") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const PureState s0 = named_state(StateFamily::phi_alpha, 0.3);
    const double g = 1.0, t = 0.7;
    const SLDOperator l = sld(DensityMatrix::from_pure(to_computational(evolve_closed(s0, ch, g, t))),
                              drho_closed_exact(s0, ch, g, t));
    const auto pairs = sld_eigen_concurrences(l);

    int product_00 = 0;
    std::vector<double> entangled;
    for (int k = 0; k < 4; ++k) {
        PureState v;
        for (int i = 0; i < 4; ++i) v.amps[static_cast<std::size_t>(i)] = l.eigen.eigenvectors(i, k);
        if (std::abs(v.amps[0]) > 1.0 - 1e-8) {
            ++product_00;
            CHECK(pairs[static_cast<std::size_t>(k)].second < 1e-8);
        } else {
            entangled.push_back(pairs[static_cast<std::size_t>(k)].second);
        }
    }
    REQUIRE(product_00 == 1);
    REQUIRE(entangled.size() == 3);
    std::sort(entangled.begin(), entangled.end());
    CHECK(entangled[0] > 0.01);
    CHECK(entangled[1] - entangled[0] > 0.01);
    CHECK(entangled[2] - entangled[1] > 0.01);
}

TEST_CASE("coe: constants, equality points, and kinks") {
    // Constant concurrence.
    const auto flat = coe::coe([](double) { return 0.5; }, 1.0);
    REQUIRE(flat.has_value());
    CHECK(*flat == doctest::Approx(0.0).epsilon(1e-10));

    // psi_opt at sin(2 g eta t) = 1: CoE = F = 4 t^2 eta^2.
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const PureState s0 = named_state(StateFamily::psi_opt);
    const double t = kPi / 4.0;
    DerivativeConfig cfg;
    cfg.step = tuned_fd_step(1.0, t, 1.0);
    const auto val = coe::coe(
        [&](double gg) { return concurrence_pure(evolve_closed(s0, ch, gg, t)); }, 1.0, cfg);
    REQUIRE(val.has_value());
    CHECK(*val == doctest::Approx(4.0 * t * t).epsilon(1e-8));

    // Open entangled family at cos(2gt) = 0: CoE = F.
    const double alpha = 0.25, kappa = 0.5;
    DerivativeConfig cfg2;
    cfg2.step = tuned_fd_step(1.0, t, 1.0);
    const auto val2 = coe::coe(
        [&](double gg) { return concurrence_mixed(analytic_open_entangled(alpha, gg, kappa, t)); },
        1.0, cfg2);
    REQUIRE(val2.has_value());
    const double f = 4.0 * t * t * std::exp(-kappa * t) * 0.765625;
    CHECK(*val2 == doctest::Approx(f).epsilon(1e-6));

    // Kink: psi_opt at sin(2gt) = 0 is flagged undefined.
    const double tk = kPi / 2.0;
    DerivativeConfig cfg3;
    cfg3.step = tuned_fd_step(1.0, tk, 1.0);
    const auto val3 = coe::coe(
        [&](double gg) { return concurrence_pure(evolve_closed(s0, ch, gg, tk)); }, 1.0, cfg3);
    CHECK(!val3.has_value());
}

TEST_CASE("closed_form_suite: psi_opt quadruple and limits") {
    OracleParams p;
    p.eta_xy = 1.0;
    const double g = 1.0, t = 1.3;
    const OracleValues v = closed_form_suite(OracleFamily::psi_opt, p, g, t);
    CHECK(v.qfi == doctest::Approx(4.0 * t * t));
    CHECK(v.concurrence == doctest::Approx(std::abs(std::sin(2.0 * t))));
    REQUIRE(v.coe.has_value());
    CHECK(*v.coe == doctest::Approx(4.0 * t * t * std::abs(std::sin(2.0 * t))));
    REQUIRE(v.c_sld.size() == 2);
    CHECK(v.c_sld[0] == doctest::Approx(std::abs(std::cos(2.0 * t))));

    // kappa = 0 open separable reduces to psi_opt.
    OracleParams po;
    po.kappa = 0.0;
    const OracleValues vo = closed_form_suite(OracleFamily::open_separable, po, g, t);
    CHECK(vo.qfi == doctest::Approx(v.qfi));
    CHECK(vo.concurrence == doctest::Approx(v.concurrence));
    CHECK(*vo.coe == doctest::Approx(*v.coe));

    // phi_alpha concurrence is capped by alpha^2.
    OracleParams pp;
    pp.alpha = 0.3;
    pp.eta = 1.0;
    for (double tt = 0.05; tt < 7.0; tt += 0.11) {
        const OracleValues vp = closed_form_suite(OracleFamily::phi_alpha, pp, g, tt);
        REQUIRE(vp.concurrence <= 0.09 + 1e-12);
    }
}

TEST_CASE("closed_form_suite: matches the production pipeline") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const double g = 1.0;

    // psi_alpha
    OracleParams pa;
    pa.alpha = 0.3;
    pa.eta_xy = 1.0;
    const PureState sa = named_state(StateFamily::psi_alpha, 0.3);
    for (double t : {0.4, 0.9, 2.2}) {
        const OracleValues v = closed_form_suite(OracleFamily::psi_alpha, pa, g, t);
        CHECK(v.qfi == doctest::Approx(qfi_pure(sa, ch, g, t)).epsilon(1e-12));
        CHECK(v.concurrence ==
              doctest::Approx(concurrence_pure(evolve_closed(sa, ch, g, t))).epsilon(1e-12));
        DerivativeConfig cfg;
        cfg.step = tuned_fd_step(g, t, 1.0);
        const auto cv = coe::coe(
            [&](double gg) { return concurrence_pure(evolve_closed(sa, ch, gg, t)); }, g, cfg);
        REQUIRE(cv.has_value());
        REQUIRE(v.coe.has_value());
        CHECK(*cv == doctest::Approx(*v.coe).epsilon(1e-6));
    }

    // open entangled: CoE = F G(gt) against the finite-difference pipeline.
    OracleParams pe;
    pe.alpha = 0.25;
    pe.kappa = 0.5;
    for (double t : {0.5, 1.1, 2.7}) {
        const OracleValues v = closed_form_suite(OracleFamily::open_entangled, pe, g, t);
        DerivativeConfig cfg;
        cfg.step = tuned_fd_step(g, t, 1.0);
        const auto cv = coe::coe(
            [&](double gg) {
                return concurrence_mixed(analytic_open_entangled(0.25, gg, 0.5, t));
            },
            g, cfg);
        REQUIRE(cv.has_value());
        REQUIRE(v.coe.has_value());
        REQUIRE(*cv == doctest::Approx(*v.coe).epsilon(1e-4));
    }
}

TEST_CASE("closed_form_suite: generic Bell pair in both parity classes") {
    const double g = 1.0;
    // Opposite parity: pair (beta_01, beta_11), gap frequency eta = eta_xy.
    OracleParams pb;
    pb.eta = 1.0;
    pb.opposite_parity = true;
    const OracleValues v1 = closed_form_suite(OracleFamily::bell_pair, pb, g, 0.9);
    const OracleValues vopt = closed_form_suite(OracleFamily::psi_opt, OracleParams{}, g, 0.9);
    CHECK(v1.qfi == doctest::Approx(vopt.qfi));
    CHECK(v1.concurrence == doctest::Approx(vopt.concurrence));

    // Same parity: (beta_00 + beta_11)/sqrt2 under diag(1, 0.3, 0.5):
    // gap = omega_00 - omega_11 = 2(eta_x + eta_z) -> eta_eff = 1.5.
    const CanonicalHamiltonian ch = CanonicalHamiltonian::diagonal(1.0, 0.3, 0.5);
    PureState pair;
    pair.basis = Basis::bell;
    pair.amps = {cplx(1.0 / std::sqrt(2.0)), cplx(0.0), cplx(0.0), cplx(1.0 / std::sqrt(2.0))};
    OracleParams ps;
    ps.eta = 1.5;
    ps.opposite_parity = false;
    for (double t : {0.3, 0.8, 1.9}) {
        const OracleValues v = closed_form_suite(OracleFamily::bell_pair, ps, g, t);
        CHECK(v.qfi == doctest::Approx(qfi_pure(pair, ch, g, t)).epsilon(1e-12));
        CHECK(v.concurrence ==
              doctest::Approx(concurrence_pure(evolve_closed(pair, ch, g, t))).epsilon(1e-12));
        // C_SLD co-function |sin(2 g eta_eff t)| from the production SLD.
        const PureState psi = to_computational(evolve_closed(pair, ch, g, t));
        const SLDOperator l = sld(DensityMatrix::from_pure(psi), drho_closed_exact(pair, ch, g, t));
        for (const auto& [ev, c] : sld_eigen_concurrences(l)) {
            if (std::abs(ev) > 1e-9)
                REQUIRE(c == doctest::Approx(v.c_sld[0]).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("qfi_mixed agrees with qfi_pure on closed trajectories") {
    SplitMix64 rng(2718);
    for (int n = 0; n < 50; ++n) {
        const CanonicalHamiltonian ch = CanonicalHamiltonian::diagonal(
            rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const PureState s0 = random_pure_state(5000 + static_cast<std::uint64_t>(n));
        const double g = rng.uniform(0.4, 1.6);
        const double t = rng.uniform(0.2, 3.0);
        const double f_pure = qfi_pure(s0, ch, g, t);
        const DensityMatrix rho =
            DensityMatrix::from_pure(to_computational(evolve_closed(s0, ch, g, t)));
        const double f_mixed = qfi_mixed(rho, drho_closed_exact(s0, ch, g, t));
        REQUIRE(f_mixed == doctest::Approx(f_pure).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("fidelity relation: residual order and the QFI estimate") {
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const PureState s0 = named_state(StateFamily::psi_opt);

    for (double t : {kPi / 4.0, 3.0 * kPi / 4.0, 5.0 * kPi / 4.0}) {
        const DensitySource rho_of_g = [&](double gg) {
            return DensityMatrix::from_pure(to_computational(evolve_closed(s0, ch, gg, t)));
        };

        // Residual shrinks at observed order >= 2.5 under dg halving.
        double prev = 0.0;
        bool first = true;
        for (const double dg : {0.04, 0.02, 0.01}) {
            const auto r = fidelity_relation_check(rho_of_g, 1.0, dg);
            const double res = std::abs(r.residual);
            if (!first) {
                const double order = std::log2(prev / res);
                REQUIRE(order >= 2.5);
            }
            prev = res;
            first = false;
        }

        // Eq.-style finite-dg QFI estimate converges to the pure QFI.
        const auto r = fidelity_relation_check(rho_of_g, 1.0, 1e-3);
        const double f = qfi_pure(s0, ch, 1.0, t);
        REQUIRE(std::abs(r.qfi_estimate - f) / f < 1e-3);
    }

    // A g-independent source gives zero residual and zero estimate.
    const DensityMatrix flat = random_density_matrix(8, 2);
    const auto r0 = fidelity_relation_check([&](double) { return flat; }, 1.0, 1e-2);
    CHECK(std::abs(r0.residual) < 1e-7);
    CHECK(std::abs(r0.qfi_estimate) < 1e-3);
}

TEST_CASE("sweeps: bound holds and coincidence grid points check out") {
    const double g = 1.0;
    std::vector<double> times;
    for (int n = 0; n <= 200; ++n) times.push_back(6.2831853071795864769 * n / 200.0);

    // Closed psi_alpha sweep.
    const auto closed = sweep_closed(named_state(StateFamily::psi_alpha, 0.3),
                                     CanonicalHamiltonian::flipflop(1.0), g, times);
    for (const auto& s : closed) {
        if (!s.coe) continue;
        REQUIRE(s.qfi - *s.coe >= -1e-6 * std::max(1.0, s.qfi));
    }

    // Open separable sweep.
    const auto open = sweep_open_analytic(OpenFamily::separable, 0.0, g, 0.5, times);
    for (const auto& s : open) {
        if (!s.coe) continue;
        REQUIRE(s.qfi - *s.coe >= -1e-6 * std::max(1.0, s.qfi));
    }

    // Coincidence structure at gt = (2n+1) pi/4 for the flip-flop families.
    const CanonicalHamiltonian ch = CanonicalHamiltonian::flipflop(1.0);
    const PureState s0 = named_state(StateFamily::psi_opt);
    for (int n = 0; n < 4; ++n) {
        const double t = (2.0 * n + 1.0) * kPi / 4.0;
        const double f = qfi_pure(s0, ch, g, t);
        DerivativeConfig cfg;
        cfg.step = tuned_fd_step(g, t, 1.0);
        const auto cv = coe::coe(
            [&](double gg) { return concurrence_pure(evolve_closed(s0, ch, gg, t)); }, g, cfg);
        REQUIRE(cv.has_value());
        REQUIRE(std::abs(*cv - f) < 1e-6 * f);
        // C at its maximum in g, C_SLD ~ 0.
        REQUIRE(concurrence_pure(evolve_closed(s0, ch, g, t)) == doctest::Approx(1.0).epsilon(1e-10));
        const SLDOperator l = sld(
            DensityMatrix::from_pure(to_computational(evolve_closed(s0, ch, g, t))),
            drho_closed_exact(s0, ch, g, t));
        for (const auto& [ev, c] : sld_eigen_concurrences(l))
            if (std::abs(ev) > 1e-9) REQUIRE(c < 1e-6);
    }
}

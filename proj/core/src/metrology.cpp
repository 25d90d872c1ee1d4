#include "coe/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace coe {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

struct StencilResult {
    std::optional<double> second;  // +d^2C/dg^2 (sign flipped by callers)
    double first = 0.0;            // dC/dg
};

// Five-point stencil with the kink detector: reject when any sampled
// concurrence sits under the floor or when the 3- and 5-point estimates
// disagree.
StencilResult stencil_derivatives(const ScalarSource& f, double g, const DerivativeConfig& cfg) {
    const double h = cfg.effective_step(g);
    const std::array<double, 5> xs = {g - 2.0 * h, g - h, g, g + h, g + 2.0 * h};
    std::array<double, 5> c{};
    bool under_floor = false;
    for (int i = 0; i < 5; ++i) {
        c[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
        if (c[static_cast<std::size_t>(i)] < cfg.kink_tolerance) under_floor = true;
    }

    StencilResult out;
    out.first = (c[3] - c[1]) / (2.0 * h);
    if (under_floor) return out;

    const double d3 = (c[3] - 2.0 * c[2] + c[1]) / (h * h);
    const double d5 = (-c[4] + 16.0 * c[3] - 30.0 * c[2] + 16.0 * c[1] - c[0]) / (12.0 * h * h);
    if (std::abs(d3 - d5) > cfg.kink_consistency_rel * std::max({1.0, std::abs(d3), std::abs(d5)}))
        return out;

    // Note the Richardson extrapolation of the 3-point stencil over h and
    // 2h reproduces the 5-point value exactly, so both refined schemes
    // return d5.
    out.second = (cfg.scheme == DerivativeConfig::Scheme::central3) ? d3 : d5;
    return out;
}

void warn(const char* what) { std::cerr << "[coe] warning: " << what << '\n'; }

} // namespace

double tuned_fd_step(double g, double t, double omega_scale) {
    const double rate = std::max(2.0 * std::abs(t) * std::max(omega_scale, 1e-12), 0.25);
    const double scale = std::max(1.0, std::abs(g));
    return std::clamp(2.5e-3 / rate, 1e-8 * scale, 1e-2 * scale);
}

double qfi_pure(const PureState& s0, const CanonicalHamiltonian& ch, [[maybe_unused]] double g,
                double t) {
    const PureState b = to_bell(s0.normalized());
    const BellEigensystem bes = bell_eigensystem(ch);
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double p = std::norm(b.amps[static_cast<std::size_t>(k)]);
        const double w = bes.omegas[static_cast<std::size_t>(k)];
        m1 += p * w;
        m2 += p * w * w;
    }
    return 4.0 * t * t * std::max(0.0, m2 - m1 * m1);
}

double qfi_mixed(const DensityMatrix& rho, const ComplexMatrix& drho) {
    const DensityMatrix r = to_computational(rho);
    if (drho.rows() != 4 || drho.cols() != 4) throw LinalgError("qfi_mixed: drho must be 4x4");
    if (drho.hermiticity_defect() > 1e-8)
        throw LinalgError("qfi_mixed: drho not Hermitian within 1e-8");
    if (std::abs(drho.trace()) > 1e-6) throw LinalgError("qfi_mixed: drho trace not ~ 0");

    HermitianEigenSystem es = hermitian_eig(r.rho);
    const double eps = tols::support_threshold_rel * std::abs(r.rho.trace());
    double f = 0.0;
    int pairs = 0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double lsum = es.eigenvalues[static_cast<std::size_t>(a)] +
                                es.eigenvalues[static_cast<std::size_t>(b)];
            if (lsum <= eps) continue;
            cplx mel = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    mel += std::conj(es.eigenvectors(i, a)) * drho(i, j) * es.eigenvectors(j, b);
            f += 2.0 * std::norm(mel) / lsum;
            ++pairs;
        }
    }
    if (pairs == 0) {
        warn("qfi_mixed: every eigenvalue pair below support threshold, returning 0");
        return 0.0;
    }
    return f;
}

ComplexMatrix drho_dg(const DensitySource& rho_of_g, double g, const DerivativeConfig& cfg) {
    const double h = cfg.effective_step(g);
    const auto eval = [&](double gg) { return to_computational(rho_of_g(gg)).rho; };

    ComplexMatrix d(4, 4);
    switch (cfg.scheme) {
        case DerivativeConfig::Scheme::central3: {
            d = eval(g + h) - eval(g - h);
            d *= cplx(1.0 / (2.0 * h));
            break;
        }
        case DerivativeConfig::Scheme::central5: {
            ComplexMatrix acc = eval(g - 2.0 * h);
            acc -= eval(g + 2.0 * h);
            ComplexMatrix inner = eval(g + h) - eval(g - h);
            inner *= cplx(8.0);
            acc += inner;
            acc *= cplx(1.0 / (12.0 * h));
            d = acc;
            break;
        }
        case DerivativeConfig::Scheme::richardson: {
            ComplexMatrix dh = eval(g + h) - eval(g - h);
            dh *= cplx(1.0 / (2.0 * h));
            ComplexMatrix dh2 = eval(g + 0.5 * h) - eval(g - 0.5 * h);
            dh2 *= cplx(1.0 / h);
            dh2 *= cplx(4.0);
            dh2 -= dh;
            dh2 *= cplx(1.0 / 3.0);
            d = dh2;
            break;
        }
    }

    // Hermitize and remove the trace dust so downstream contracts
    // (Tr drho = 0, Tr rho L = 0) hold exactly.
    ComplexMatrix out(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = 0.5 * (d(i, j) + std::conj(d(j, i)));
    const double tr = out.trace().real();
    if (std::abs(tr) > 1e-8)
        throw LinalgError("drho_dg: derivative trace exceeds 1e-8, source is not trace-preserving");
    for (int i = 0; i < 4; ++i) out(i, i) -= 0.25 * tr;
    return out;
}

ComplexMatrix drho_closed_exact(const PureState& s0, const CanonicalHamiltonian& ch, double g,
                                double t) {
    const PureState psi = to_computational(evolve_closed(s0, ch, g, t));
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    const ComplexMatrix h = ch.generator();
    ComplexMatrix comm = h * rho.rho - rho.rho * h;
    comm *= cplx(0.0, -t);
    return comm;
}

SLDOperator sld(const DensityMatrix& rho, const ComplexMatrix& drho) {
    const DensityMatrix r = to_computational(rho);
    HermitianEigenSystem es = hermitian_eig(r.rho);
    const double eps = tols::support_threshold_rel * std::abs(r.rho.trace());

    ComplexMatrix t(4, 4);
    int pairs = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double lsum = es.eigenvalues[static_cast<std::size_t>(a)] +
                                es.eigenvalues[static_cast<std::size_t>(b)];
            if (lsum <= eps) continue;
            cplx mel = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    mel += std::conj(es.eigenvectors(i, a)) * drho(i, j) * es.eigenvectors(j, b);
            t(a, b) = 2.0 * mel / lsum;
            ++pairs;
        }
    if (pairs == 0) warn("sld: every eigenvalue pair below support threshold, returning 0");

    SLDOperator out;
    out.matrix = es.eigenvectors * t * es.eigenvectors.adjoint();
    // Hermitize away rotation dust.
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const cplx v = 0.5 * (out.matrix(i, j) + std::conj(out.matrix(j, i)));
            out.matrix(i, j) = v;
            out.matrix(j, i) = std::conj(v);
        }
    out.support_dim = pairs;
    out.eigen = hermitian_eig(out.matrix);
    return out;
}

std::vector<std::pair<double, double>> sld_eigen_concurrences(const SLDOperator& l) {
    std::vector<std::pair<double, double>> out;
    out.reserve(4);
    for (int k = 0; k < 4; ++k) {
        PureState v;
        v.basis = Basis::computational;
        for (int i = 0; i < 4; ++i) v.amps[static_cast<std::size_t>(i)] = l.eigen.eigenvectors(i, k);
        out.emplace_back(l.eigen.eigenvalues[static_cast<std::size_t>(k)], concurrence_pure(v));
    }
    return out;
}

std::optional<double> coe(const ScalarSource& c_of_g, double g, const DerivativeConfig& cfg) {
    const StencilResult r = stencil_derivatives(c_of_g, g, cfg);
    if (!r.second) return std::nullopt;
    return -*r.second;
}

OracleValues closed_form_suite(OracleFamily family, const OracleParams& p, double g, double t) {
    OracleValues out;
    const auto defined_if = [](double magnitude, double value) -> std::optional<double> {
        if (magnitude < 1e-12) return std::nullopt;
        return value;
    };
    switch (family) {
        case OracleFamily::psi_opt: {
            const double eta = p.eta_xy;
            const double f = 4.0 * t * t * eta * eta;
            const double s = std::sin(2.0 * g * eta * t);
            out.qfi = f;
            out.concurrence = std::abs(s);
            out.coe = defined_if(std::abs(s), f * std::abs(s));
            const double cs = std::abs(std::cos(2.0 * g * eta * t));
            out.c_sld = {cs, cs};
            return out;
        }
        case OracleFamily::psi_alpha: {
            if (p.alpha < 0.0 || p.alpha > 1.0) throw LinalgError("closed_form_suite: alpha outside [0, 1]");
            const double eta = p.eta_xy;
            const double a2 = p.alpha * p.alpha;
            const double big_a = 4.0 * a2 * (1.0 - a2);
            const double f = 4.0 * t * t * eta * eta * big_a;
            const double xi = 2.0 * g * eta * t;
            const double cxi = std::cos(xi);
            const double conc2 = 1.0 - big_a * cxi * cxi;
            const double conc = std::sqrt(std::max(0.0, conc2));
            out.qfi = f;
            out.concurrence = conc;
            if (conc > 1e-12) {
                const double w = 2.0 * eta * t;
                const double c2xi = std::cos(2.0 * xi);
                const double s2xi = std::sin(2.0 * xi);
                const double dd = w * w * (big_a * c2xi / conc -
                                           0.25 * big_a * big_a * s2xi * s2xi / (conc * conc * conc));
                out.coe = -dd;
            }
            const double cs = std::abs(cxi);
            out.c_sld = {cs, cs};
            return out;
        }
        case OracleFamily::phi_alpha: {
            if (p.alpha < 0.0 || p.alpha > 1.0) throw LinalgError("closed_form_suite: alpha outside [0, 1]");
            const double eta = p.eta;
            const double a2 = p.alpha * p.alpha;
            const double f = 4.0 * a2 * t * t * eta * eta;
            const double s = std::sin(2.0 * g * eta * t);
            out.qfi = f;
            out.concurrence = a2 * std::abs(s);
            out.coe = defined_if(std::abs(s), f * std::abs(s));

            // C_SLD of the two nonzero-eigenvalue eigenvectors, from the
            // exact SLD block on span{|01>, |10>, |11>}.
            const double ph = g * eta * t;
            const double b = p.alpha;
            const double dd = std::sqrt(std::max(0.0, 1.0 - a2));
            const double sp = std::sin(ph), cp = std::cos(ph);
            const double s2 = std::sin(2.0 * ph), c2 = std::cos(2.0 * ph);
            ComplexMatrix l(4, 4);
            l(1, 1) = -b * s2;
            l(1, 2) = cplx(0.0, b * c2);
            l(1, 3) = -dd * sp;
            l(2, 1) = std::conj(l(1, 2));
            l(2, 2) = b * s2;
            l(2, 3) = cplx(0.0, -dd * cp);
            l(3, 1) = -dd * sp;
            l(3, 2) = std::conj(l(2, 3));
            HermitianEigenSystem es = hermitian_eig(l);
            std::vector<std::pair<double, double>> vals;
            for (int k = 0; k < 4; ++k) {
                if (std::abs(es.eigenvalues[static_cast<std::size_t>(k)]) < 1e-9) continue;
                PureState v;
                v.basis = Basis::computational;
                for (int i = 0; i < 4; ++i) v.amps[static_cast<std::size_t>(i)] = es.eigenvectors(i, k);
                vals.emplace_back(std::abs(es.eigenvalues[static_cast<std::size_t>(k)]),
                                  concurrence_pure(v));
            }
            std::sort(vals.begin(), vals.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first; });
            for (const auto& v : vals) out.c_sld.push_back(v.second);
            return out;
        }
        case OracleFamily::open_separable: {
            const double e = std::exp(-p.kappa * t);
            const double f = 4.0 * t * t * e;
            const double s = std::sin(2.0 * g * t);
            out.qfi = f;
            out.concurrence = e * std::abs(s);
            out.coe = defined_if(std::abs(s), f * std::abs(s));
            const double cs = std::abs(std::cos(2.0 * g * t));
            out.c_sld = {cs, cs};
            return out;
        }
        case OracleFamily::open_entangled: {
            if (p.alpha < 0.0 || p.alpha > 1.0) throw LinalgError("closed_form_suite: alpha outside [0, 1]");
            const double e = std::exp(-p.kappa * t);
            const double q = 1.0 - 2.0 * p.alpha * p.alpha;
            const double f = 4.0 * t * t * e * q * q;
            const double c2 = std::cos(2.0 * g * t);
            const double denom = 1.0 - q * q * c2 * c2;
            out.qfi = f;
            out.concurrence = e * std::sqrt(std::max(0.0, denom));
            if (denom > 1e-12) {
                const double gg = (1.0 - 2.0 * c2 * c2 + q * q * c2 * c2 * c2 * c2) /
                                  std::pow(denom, 1.5);
                out.coe = f * gg;
            }
            const double cs = std::abs(c2);
            out.c_sld = {cs, cs};
            return out;
        }
        case OracleFamily::bell_pair: {
            const double eta = p.eta;
            const double f = 4.0 * eta * eta * t * t;
            out.qfi = f;
            if (p.opposite_parity) {
                const double s = std::sin(2.0 * g * eta * t);
                out.concurrence = std::abs(s);
                out.coe = defined_if(std::abs(s), f * std::abs(s));
                const double cs = std::abs(std::cos(2.0 * g * eta * t));
                out.c_sld = {cs, cs};
            } else {
                const double c = std::cos(2.0 * g * eta * t);
                out.concurrence = std::abs(c);
                out.coe = defined_if(std::abs(c), f * std::abs(c));
                const double cs = std::abs(std::sin(2.0 * g * eta * t));
                out.c_sld = {cs, cs};
            }
            return out;
        }
    }
    throw LinalgError("closed_form_suite: unknown family");
}

FidelityRelationResult fidelity_relation_check(const DensitySource& rho_of_g, double g,
                                               double delta_g) {
    const DensityMatrix a = rho_of_g(g);
    const DensityMatrix b = rho_of_g(g + delta_g);
    const double fid = uhlmann_fidelity(b, a);
    const double drop = 1.0 - std::sqrt(fid);
    FidelityRelationResult out;
    out.residual = (concurrence_mixed(a) - concurrence_mixed(b)) - 4.0 * drop;
    out.qfi_estimate = 8.0 * drop / (delta_g * delta_g);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep drivers
// ---------------------------------------------------------------------------

namespace {

void fill_sld_columns(MetrologySample& sample, const SLDOperator& l, double floor) {
    std::vector<std::pair<double, double>> pairs = sld_eigen_concurrences(l);
    std::vector<std::pair<double, double>> kept;  // (|eigenvalue|, concurrence)
    for (const auto& [ev, c] : pairs) {
        if (std::abs(ev) > floor) kept.emplace_back(std::abs(ev), c);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    sample.sld_degenerate = false;
    for (std::size_t i = 1; i < kept.size(); ++i) {
        if (std::abs(kept[i - 1].first - kept[i].first) < tols::degenerate_gap)
            sample.sld_degenerate = true;
    }
    for (const auto& [ev, c] : kept) {
        sample.sld_eigenvalues.push_back(ev);
        sample.c_sld.push_back(c);
    }
}

} // namespace

std::vector<MetrologySample> sweep_closed(const PureState& s0, const CanonicalHamiltonian& ch,
                                          double g, const std::vector<double>& times,
                                          const SweepOptions& opt) {
    const PureState s0n = s0.normalized();
    const BellEigensystem bes = bell_eigensystem(ch);
    double wmax = 0.0;
    for (double w : bes.omegas) wmax = std::max(wmax, std::abs(w));

    std::vector<MetrologySample> out;
    out.reserve(times.size());
    for (const double t : times) {
        MetrologySample s;
        s.t = t;
        s.g = g;
        s.qfi = qfi_pure(s0n, ch, g, t);

        const PureState psi = to_computational(evolve_closed(s0n, ch, g, t));
        s.concurrence = concurrence_pure(psi);

        DerivativeConfig cfg = opt.derivative;
        if (cfg.step <= 0.0) cfg.step = tuned_fd_step(g, t, wmax);
        const ScalarSource c_of_g = [&](double gg) {
            return concurrence_pure(evolve_closed(s0n, ch, gg, t));
        };
        const StencilResult st = stencil_derivatives(c_of_g, g, cfg);
        if (st.second) s.coe = -*st.second;
        s.dC_dg = st.first;

        const ComplexMatrix drho = drho_closed_exact(s0n, ch, g, t);
        const SLDOperator l = sld(DensityMatrix::from_pure(psi), drho);
        fill_sld_columns(s, l, opt.csld_floor);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<MetrologySample> sweep_open_analytic(OpenFamily family, double alpha, double g,
                                                 double kappa, const std::vector<double>& times,
                                                 const SweepOptions& opt) {
    const auto source_at = [&](double gg, double t) {
        return family == OpenFamily::separable ? analytic_open_separable(gg, kappa, t)
                                               : analytic_open_entangled(alpha, gg, kappa, t);
    };

    std::vector<MetrologySample> out;
    out.reserve(times.size());
    for (const double t : times) {
        MetrologySample s;
        s.t = t;
        s.g = g;

        const DensitySource rho_of_g = [&](double gg) { return source_at(gg, t); };
        const DensityMatrix rho = rho_of_g(g);
        s.concurrence = concurrence_mixed(rho);

        DerivativeConfig cfg = opt.derivative;
        if (cfg.step <= 0.0) cfg.step = tuned_fd_step(g, t, 1.0);
        const ScalarSource c_of_g = [&](double gg) { return concurrence_mixed(rho_of_g(gg)); };
        const StencilResult st = stencil_derivatives(c_of_g, g, cfg);
        if (st.second) s.coe = -*st.second;
        s.dC_dg = st.first;

        DerivativeConfig dcfg;
        dcfg.scheme = DerivativeConfig::Scheme::richardson;
        dcfg.step = std::min(1e-3, cfg.step * 4.0);
        const ComplexMatrix drho = drho_dg(rho_of_g, g, dcfg);
        s.qfi = qfi_mixed(rho, drho);

        const SLDOperator l = sld(rho, drho);
        fill_sld_columns(s, l, opt.csld_floor);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace coe

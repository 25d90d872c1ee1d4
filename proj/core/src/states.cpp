#include "coe/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace coe {

namespace {

thread_local double g_last_psd_clamp = 0.0;

// Spectral floor: eigenvalues below spectral_floor_rel * max are treated as
// exact zeros so that rank dust does not leak sqrt(eps) noise into
// concurrence and fidelity values (they get finite-differenced downstream).
std::vector<double> floored_eigs(const std::vector<double>& ev) {
    double mx = 0.0;
    for (double l : ev) mx = std::max(mx, std::abs(l));
    const double floor = tols::spectral_floor_rel * std::max(mx, 1e-300);
    std::vector<double> out(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) out[i] = (ev[i] <= floor) ? 0.0 : ev[i];
    return out;
}

ComplexMatrix spectral_sqrt(const ComplexMatrix& a) {
    HermitianEigenSystem es = hermitian_eig(a);
    const std::vector<double> ev = floored_eigs(es.eigenvalues);
    const int n = a.rows();
    ComplexMatrix r(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = std::sqrt(ev[static_cast<std::size_t>(k)]);
        if (s == 0.0) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r(i, j) += s * es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
    }
    return r;
}

const ComplexMatrix& spin_flip_matrix() {
    static const ComplexMatrix yy = kron(pauli_y(), pauli_y());
    return yy;
}

} // namespace

double PureState::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

PureState PureState::normalized() const {
    PureState r = *this;
    const double n = norm();
    if (n < 1e-300) throw LinalgError("PureState: zero vector cannot be normalized");
    for (auto& a : r.amps) a /= n;
    return r;
}

PureState PureState::ket(int index) {
    if (index < 0 || index > 3) throw LinalgError("PureState::ket: index out of range");
    PureState s;
    s.amps[static_cast<std::size_t>(index)] = 1.0;
    s.basis = Basis::computational;
    return s;
}

DensityMatrix::DensityMatrix(ComplexMatrix r, Basis b) : rho(std::move(r)), basis(b) {
    if (rho.rows() != 4 || rho.cols() != 4) throw LinalgError("DensityMatrix: must be 4x4");
    if (rho.hermiticity_defect() > tols::density_hermitian)
        throw LinalgError("DensityMatrix: not Hermitian within tolerance");
    if (std::abs(rho.trace() - cplx(1.0)) > tols::density_trace)
        throw LinalgError("DensityMatrix: trace differs from 1 beyond tolerance");
}

DensityMatrix DensityMatrix::from_pure(const PureState& s) {
    const PureState n = s.normalized();
    ComplexMatrix r(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            r(i, j) = n.amps[static_cast<std::size_t>(i)] * std::conj(n.amps[static_cast<std::size_t>(j)]);
    return DensityMatrix(std::move(r), s.basis);
}

DensityMatrix DensityMatrix::maximally_mixed() {
    ComplexMatrix r = ComplexMatrix::identity(4);
    r *= cplx(0.25);
    return DensityMatrix(std::move(r), Basis::computational);
}

double last_psd_clamp() { return g_last_psd_clamp; }

DensityMatrix DensityMatrix::repaired(const ComplexMatrix& r, Basis b) {
    if (r.rows() != 4 || r.cols() != 4) throw LinalgError("DensityMatrix::repaired: must be 4x4");
    // Symmetrize first; integrator output carries anti-Hermitian dust.
    ComplexMatrix h(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h(i, j) = 0.5 * (r(i, j) + std::conj(r(j, i)));

    HermitianEigenSystem es = hermitian_eig(h);
    double clamp = 0.0;
    std::array<double, 4> ev{};
    for (int k = 0; k < 4; ++k) {
        double l = es.eigenvalues[static_cast<std::size_t>(k)];
        if (l < 0.0) {
            if (l < tols::density_min_eig * 10.0)
                throw LinalgError("DensityMatrix::repaired: eigenvalue too negative to clamp");
            clamp = std::max(clamp, -l);
            l = 0.0;
        }
        ev[static_cast<std::size_t>(k)] = l;
    }
    g_last_psd_clamp = clamp;
    double tr = ev[0] + ev[1] + ev[2] + ev[3];
    if (tr < 1e-12) throw LinalgError("DensityMatrix::repaired: vanishing trace");

    ComplexMatrix out(4, 4);
    for (int k = 0; k < 4; ++k) {
        const double w = ev[static_cast<std::size_t>(k)] / tr;
        if (w == 0.0) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out(i, j) += w * es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
    }
    return DensityMatrix(std::move(out), b);
}

double DensityMatrix::min_eigenvalue() const {
    return hermitian_eig(rho).eigenvalues.front();
}

PureState to_bell(const PureState& s) {
    if (s.basis == Basis::bell) return s;
    const ComplexMatrix bd = bell_matrix().adjoint();
    PureState r;
    r.basis = Basis::bell;
    for (int i = 0; i < 4; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += bd(i, j) * s.amps[static_cast<std::size_t>(j)];
        r.amps[static_cast<std::size_t>(i)] = acc;
    }
    return r;
}

PureState to_computational(const PureState& s) {
    if (s.basis == Basis::computational) return s;
    const ComplexMatrix& b = bell_matrix();
    PureState r;
    r.basis = Basis::computational;
    for (int i = 0; i < 4; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += b(i, j) * s.amps[static_cast<std::size_t>(j)];
        r.amps[static_cast<std::size_t>(i)] = acc;
    }
    return r;
}

DensityMatrix to_bell(const DensityMatrix& d) {
    if (d.basis == Basis::bell) return d;
    const ComplexMatrix& b = bell_matrix();
    return DensityMatrix(b.adjoint() * d.rho * b, Basis::bell);
}

DensityMatrix to_computational(const DensityMatrix& d) {
    if (d.basis == Basis::computational) return d;
    const ComplexMatrix& b = bell_matrix();
    return DensityMatrix(b * d.rho * b.adjoint(), Basis::computational);
}

double concurrence_pure(const PureState& s) {
    const PureState c = to_computational(s.normalized());
    const cplx det = c.amps[0] * c.amps[3] - c.amps[1] * c.amps[2];
    return std::min(1.0, 2.0 * std::abs(det));
}

double concurrence_mixed(const DensityMatrix& d) {
    const DensityMatrix c = to_computational(d);
    const ComplexMatrix& yy = spin_flip_matrix();
    const ComplexMatrix rho_tilde = yy * c.rho.conj() * yy;
    const ComplexMatrix sq = spectral_sqrt(c.rho);
    const ComplexMatrix m = sq * rho_tilde * sq;

    HermitianEigenSystem es = hermitian_eig(m);
    std::vector<double> ev = floored_eigs(es.eigenvalues);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = std::sqrt(ev[static_cast<std::size_t>(i)]);
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    const double cval = lam[0] - lam[1] - lam[2] - lam[3];
    return std::clamp(cval, 0.0, 1.0);
}

double uhlmann_fidelity(const DensityMatrix& sigma, const DensityMatrix& chi) {
    const DensityMatrix s = to_computational(sigma);
    const DensityMatrix x = to_computational(chi);
    const ComplexMatrix sq = spectral_sqrt(s.rho);
    const ComplexMatrix m = sq * x.rho * sq;
    HermitianEigenSystem es = hermitian_eig(m);
    const std::vector<double> ev = floored_eigs(es.eigenvalues);
    double tr = 0.0;
    for (double l : ev) tr += std::sqrt(l);
    return std::min(1.0, tr * tr);
}

double bures_distance(const DensityMatrix& sigma, const DensityMatrix& chi) {
    const double f = uhlmann_fidelity(sigma, chi);
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - std::sqrt(f))));
}

PureState named_state(StateFamily family, std::optional<double> alpha) {
    const auto need_alpha = [&]() -> double {
        if (!alpha) throw LinalgError("named_state: family requires alpha");
        if (*alpha < 0.0 || *alpha > 1.0) throw LinalgError("named_state: alpha outside [0, 1]");
        return *alpha;
    };
    PureState s;
    switch (family) {
        case StateFamily::psi_opt:
            return PureState::ket(1);
        case StateFamily::psi_alpha: {
            const double a = need_alpha();
            s.basis = Basis::bell;
            s.amps = {cplx(0.0), cplx(a), cplx(0.0), cplx(std::sqrt(1.0 - a * a))};
            return s;
        }
        case StateFamily::phi_alpha: {
            const double a = need_alpha();
            s.basis = Basis::computational;
            s.amps = {cplx(0.0), cplx(a), cplx(0.0), cplx(std::sqrt(1.0 - a * a))};
            return s;
        }
        case StateFamily::psi_e_alpha: {
            const double a = need_alpha();
            s.basis = Basis::computational;
            s.amps = {cplx(0.0), cplx(a), cplx(std::sqrt(1.0 - a * a)), cplx(0.0)};
            return s;
        }
    }
    throw LinalgError("named_state: unknown family");
}

PureState random_pure_state(std::uint64_t seed) {
    SplitMix64 rng(seed);
    PureState s;
    for (int i = 0; i < 4; ++i) {
        const double re = rng.gaussian();
        const double im = rng.gaussian();
        s.amps[static_cast<std::size_t>(i)] = cplx(re, im);
    }
    s.basis = Basis::computational;
    return s.normalized();
}

DensityMatrix random_density_matrix(std::uint64_t seed, int rank) {
    if (rank < 1 || rank > 4) throw LinalgError("random_density_matrix: rank must be 1..4");
    SplitMix64 rng(seed);
    // Random pure state on C^4 (x) C^rank, then trace out the environment.
    std::vector<cplx> psi(static_cast<std::size_t>(4 * rank));
    double n2 = 0.0;
    for (auto& a : psi) {
        a = cplx(rng.gaussian(), rng.gaussian());
        n2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : psi) a *= inv;

    ComplexMatrix r(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx acc = 0.0;
            for (int e = 0; e < rank; ++e)
                acc += psi[static_cast<std::size_t>(i * rank + e)] *
                       std::conj(psi[static_cast<std::size_t>(j * rank + e)]);
            r(i, j) = acc;
        }
    return DensityMatrix(std::move(r), Basis::computational);
}

ComplexMatrix random_su2(SplitMix64& rng) {
    // Haar on SU(2): uniform quaternion.
    double q[4];
    double n2 = 0.0;
    for (double& e : q) {
        e = rng.gaussian();
        n2 += e * e;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double& e : q) e *= inv;
    ComplexMatrix u(2, 2);
    u(0, 0) = cplx(q[0], q[3]);
    u(0, 1) = cplx(q[2], q[1]);
    u(1, 0) = cplx(-q[2], q[1]);
    u(1, 1) = cplx(q[0], -q[3]);
    return u;
}

namespace {
const char* basis_tag(Basis b) { return b == Basis::computational ? "computational" : "bell"; }

Basis parse_basis(const std::string& s) {
    if (s == "computational") return Basis::computational;
    if (s == "bell") return Basis::bell;
    throw LinalgError("state JSON: unknown basis tag '" + s + "'");
}
} // namespace

std::string to_line_json(const PureState& s) {
    nlohmann::json j;
    j["kind"] = "pure";
    j["basis"] = basis_tag(s.basis);
    std::vector<double> re_im;
    re_im.reserve(8);
    for (const auto& a : s.amps) {
        re_im.push_back(a.real());
        re_im.push_back(a.imag());
    }
    j["re_im"] = re_im;
    return j.dump();
}

std::string to_line_json(const DensityMatrix& d) {
    nlohmann::json j;
    j["kind"] = "mixed";
    j["basis"] = basis_tag(d.basis);
    std::vector<double> re_im;
    re_im.reserve(32);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            re_im.push_back(d.rho(i, k).real());
            re_im.push_back(d.rho(i, k).imag());
        }
    j["re_im"] = re_im;
    return j.dump();
}

PureState pure_from_line_json(const std::string& line) {
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.at("kind").get<std::string>() != "pure") throw LinalgError("state JSON: not a pure state");
    const auto re_im = j.at("re_im").get<std::vector<double>>();
    if (re_im.size() != 8) throw LinalgError("state JSON: pure state needs 8 reals");
    PureState s;
    s.basis = parse_basis(j.at("basis").get<std::string>());
    for (int i = 0; i < 4; ++i)
        s.amps[static_cast<std::size_t>(i)] = cplx(re_im[static_cast<std::size_t>(2 * i)],
                                                   re_im[static_cast<std::size_t>(2 * i + 1)]);
    return s;
}

DensityMatrix density_from_line_json(const std::string& line) {
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.at("kind").get<std::string>() != "mixed") throw LinalgError("state JSON: not a density matrix");
    const auto re_im = j.at("re_im").get<std::vector<double>>();
    if (re_im.size() != 32) throw LinalgError("state JSON: density matrix needs 32 reals");
    ComplexMatrix r(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            r(i, k) = cplx(re_im[static_cast<std::size_t>(2 * (4 * i + k))],
                           re_im[static_cast<std::size_t>(2 * (4 * i + k) + 1)]);
    return DensityMatrix(std::move(r), parse_basis(j.at("basis").get<std::string>()));
}

} // namespace coe

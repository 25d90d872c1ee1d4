#include "coe/dynamics.hpp"

#include <cmath>

namespace coe {

namespace {

std::vector<cplx> vectorize(const ComplexMatrix& rho) {
    // Column stacking: vec index i + 4 j for element (i, j).
    std::vector<cplx> v(16);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i + 4 * j)] = rho(i, j);
    return v;
}

ComplexMatrix unvectorize(const std::vector<cplx>& v) {
    ComplexMatrix rho(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) rho(i, j) = v[static_cast<std::size_t>(i + 4 * j)];
    return rho;
}

} // namespace

NoiseSpec NoiseSpec::amplitude_damping(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw LinalgError("NoiseSpec: kappa must be finite and non-negative");
    NoiseSpec n;
    n.kappa = kappa;
    n.jump_ops.push_back(kron(sigma_minus(), pauli_id()));
    n.jump_ops.push_back(kron(pauli_id(), sigma_minus()));
    return n;
}

PureState evolve_closed(const PureState& s0, const CanonicalHamiltonian& ch, double g, double t) {
    const PureState b0 = to_bell(s0.normalized());
    const BellEigensystem bes = bell_eigensystem(ch);
    PureState bt = b0;
    for (int k = 0; k < 4; ++k) {
        const double phase = -g * bes.omegas[static_cast<std::size_t>(k)] * t;
        bt.amps[static_cast<std::size_t>(k)] *= cplx(std::cos(phase), std::sin(phase));
    }
    return (s0.basis == Basis::bell) ? bt : to_computational(bt);
}

ComplexMatrix liouvillian(const ComplexMatrix& h, const NoiseSpec& noise) {
    const ComplexMatrix id = ComplexMatrix::identity(4);
    ComplexMatrix l = cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& j : noise.jump_ops) {
        const ComplexMatrix jdj = j.adjoint() * j;
        ComplexMatrix diss = kron(j.conj(), j);
        diss -= cplx(0.5) * (kron(id, jdj) + kron(jdj.transpose(), id));
        l += cplx(noise.kappa) * diss;
    }
    return l;
}

DensityMatrix evolve_open(const DensityMatrix& rho0, const CanonicalHamiltonian& ch,
                          const NoiseSpec& noise, double g, double t, double tol) {
    Trajectory tr = evolve_open_trajectory(rho0, ch, noise, g, {t}, tol);
    return tr.mixed_states.front();
}

Trajectory evolve_open_trajectory(const DensityMatrix& rho0, const CanonicalHamiltonian& ch,
                                  const NoiseSpec& noise, double g,
                                  const std::vector<double>& times, double tol) {
    CanonicalHamiltonian scaled = ch;
    scaled.g = g;
    const ComplexMatrix l = liouvillian(scaled.matrix(), noise);
    const DensityMatrix r0 = to_computational(rho0);
    const std::vector<std::vector<cplx>> states =
        propagate_linear_grid(l, vectorize(r0.rho), times, tol);

    Trajectory out;
    out.times = times;
    out.g = g;
    out.provenance = Provenance::open_integrated;
    out.mixed_states.reserve(states.size());
    for (const auto& v : states)
        out.mixed_states.push_back(DensityMatrix::repaired(unvectorize(v), Basis::computational));
    return out;
}

DensityMatrix analytic_open_separable(double g, double kappa, double t) {
    if (!(kappa >= 0.0)) throw LinalgError("analytic_open_separable: kappa must be non-negative");
    const double e = std::exp(-kappa * t);
    const double c = std::cos(g * t);
    const double s = std::sin(g * t);
    ComplexMatrix r(4, 4);
    r(0, 0) = 1.0 - e;
    r(1, 1) = e * c * c;
    r(2, 2) = e * s * s;
    r(1, 2) = cplx(0.0, 0.5 * e * std::sin(2.0 * g * t));
    r(2, 1) = std::conj(r(1, 2));
    return DensityMatrix(std::move(r), Basis::computational);
}

DensityMatrix analytic_open_entangled(double alpha, double g, double kappa, double t) {
    if (alpha < 0.0 || alpha > 1.0) throw LinalgError("analytic_open_entangled: alpha outside [0, 1]");
    if (!(kappa >= 0.0)) throw LinalgError("analytic_open_entangled: kappa must be non-negative");
    const double e = std::exp(-kappa * t);
    const double q = 1.0 - 2.0 * alpha * alpha;
    const double c2 = std::cos(2.0 * g * t);
    const double s2 = std::sin(2.0 * g * t);
    ComplexMatrix r(4, 4);
    r(0, 0) = 1.0 - e;
    r(1, 1) = 0.5 * e * (1.0 - q * c2);
    r(2, 2) = 0.5 * e * (1.0 + q * c2);
    r(1, 2) = 0.5 * e * cplx(2.0 * alpha * std::sqrt(1.0 - alpha * alpha), -q * s2);
    r(2, 1) = std::conj(r(1, 2));
    return DensityMatrix(std::move(r), Basis::computational);
}

std::vector<ComplexMatrix> rotate_jump_operators(const ComplexMatrix& u1, const ComplexMatrix& u2,
                                                 const std::vector<ComplexMatrix>& jumps) {
    const ComplexMatrix k = kron(u1, u2);
    const ComplexMatrix kd = k.adjoint();
    std::vector<ComplexMatrix> out;
    out.reserve(jumps.size());
    for (const auto& j : jumps) out.push_back(kd * j * k);
    return out;
}

ComplexMatrix rotate_single_qubit_jump(const ComplexMatrix& u) {
    return u.adjoint() * sigma_minus() * u;
}

} // namespace coe

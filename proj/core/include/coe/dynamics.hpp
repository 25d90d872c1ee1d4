#pragma once

#include <vector>

#include "coe/hamiltonian.hpp"
#include "coe/states.hpp"

namespace coe {

// Markovian amplitude damping: rate kappa applied through each jump
// operator. Defaults to sigma_minus on qubit 1 and on qubit 2 in the
// canonical basis.
struct NoiseSpec {
    double kappa = 0.0;
    std::vector<ComplexMatrix> jump_ops;  // 4x4 each

    static NoiseSpec amplitude_damping(double kappa);
};

enum class Provenance { closed_analytic, open_integrated, open_analytic };

struct Trajectory {
    std::vector<double> times;  // strictly increasing
    double g = 1.0;
    std::vector<PureState> pure_states;      // exactly one of the two
    std::vector<DensityMatrix> mixed_states; // vectors is populated
    Provenance provenance = Provenance::closed_analytic;
};

// Bell-basis phase evolution: amplitudes pick up e^{-i g omega_ab t}.
// The result is returned in the basis of the input.
PureState evolve_closed(const PureState& s0, const CanonicalHamiltonian& ch, double g, double t);

// Column-stacking Liouvillian
//   L = -i (I (x) H - H^T (x) I)
//     + kappa sum_j [ conj(L_j) (x) L_j - (I (x) L_j^dag L_j + (L_j^dag L_j)^T (x) I) / 2 ]
ComplexMatrix liouvillian(const ComplexMatrix& h, const NoiseSpec& noise);

// GKSL evolution of rho0 under the canonical Hamiltonian at coupling g.
DensityMatrix evolve_open(const DensityMatrix& rho0, const CanonicalHamiltonian& ch,
                          const NoiseSpec& noise, double g, double t,
                          double tol = tols::integrator_tol);

Trajectory evolve_open_trajectory(const DensityMatrix& rho0, const CanonicalHamiltonian& ch,
                                  const NoiseSpec& noise, double g,
                                  const std::vector<double>& times,
                                  double tol = tols::integrator_tol);

// Closed-form e^{Lt} |01><01| for the flip-flop model with eta_xy = 1 and
// symmetric amplitude damping. Nonzero elements (computational indices
// 1..4 = |00>,|01>,|10>,|11>):
//   rho_11 = 1 - e^{-kt}
//   rho_22 = e^{-kt} cos^2(gt)      rho_33 = e^{-kt} sin^2(gt)
//   rho_23 = (i/2) e^{-kt} sin(2gt)
DensityMatrix analytic_open_separable(double g, double kappa, double t);

// Closed-form evolution of a |Psi_e,alpha> = alpha |01> + sqrt(1-a^2) |10>
// initial state under the same model:
//   rho_22 = (e^{-kt}/2) [1 - (1-2a^2) cos(2gt)]
//   rho_33 = (e^{-kt}/2) [1 + (1-2a^2) cos(2gt)]
//   rho_23 = (e^{-kt}/2) [2 a sqrt(1-a^2) + i sin(2gt)(2a^2-1)]
//   rho_11 = 1 - e^{-kt}
DensityMatrix analytic_open_entangled(double alpha, double g, double kappa, double t);

// Jump operators seen from the original (pre-canonicalization) frame:
// L_j -> (u1 (x) u2)^dag L_j (u1 (x) u2).
std::vector<ComplexMatrix> rotate_jump_operators(const ComplexMatrix& u1, const ComplexMatrix& u2,
                                                 const std::vector<ComplexMatrix>& jumps);

// Single-qubit form u^dag sigma_minus u (2x2 helper used by the above).
ComplexMatrix rotate_single_qubit_jump(const ComplexMatrix& u);

} // namespace coe

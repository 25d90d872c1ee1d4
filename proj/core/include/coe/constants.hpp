#pragma once

// Central table of numeric tolerances. Every number here is a default;
// operations that need a different value take it as a parameter.

namespace coe::tols {

// Linear algebra
inline constexpr double hermiticity = 1e-12;        // max |A - A^dag| entrywise for Hermitian-tagged input
inline constexpr double hermitian_input_reject = 1e-10;  // eigensolver rejects beyond this
inline constexpr double jacobi_convergence = 1e-14; // off-diagonal Frobenius / ||A||
inline constexpr double eig_residual = 1e-10;       // ||A v - lambda v|| / ||A||
inline constexpr double orthonormality = 1e-10;
inline constexpr double degenerate_gap = 1e-9;      // eigenvalue cluster width
inline constexpr double svd_reconstruct = 1e-12;    // ||U D V^T - M|| / ||M||
inline constexpr double rotation_check = 1e-10;     // R^T R = I, det R = +1
inline constexpr double spectral_floor_rel = 1e-12; // relative eigenvalue floor for sqrt/rank decisions

// States
inline constexpr double state_norm = 1e-12;
inline constexpr double density_hermitian = 1e-10;
inline constexpr double density_trace = 1e-10;
inline constexpr double density_min_eig = -1e-9;    // PSD repair window

// Hamiltonian canonicalization
inline constexpr double unitarity = 1e-12;
inline constexpr double conjugation = 1e-10;

// Dynamics
inline constexpr double integrator_tol = 1e-9;      // relative local error target
inline constexpr double trace_preservation = 1e-8;  // per unit time

// Metrology
inline constexpr double sld_residual = 1e-7;        // ||(L rho + rho L)/2 - drho|| on support
inline constexpr double support_threshold_rel = 1e-12; // times Tr(rho), for lambda_a + lambda_b
inline constexpr double kink_concurrence_floor = 1e-6;
inline constexpr double kink_consistency_rel = 1e-3;   // 3pt vs 5pt disagreement
inline constexpr double csld_report_floor = 1e-9;      // |eigenvalue| cut for the C_SLD list
inline constexpr double coincidence_rel = 1e-3;        // |CoE/F - 1| for flag 3
inline constexpr double csld_zero = 1e-3;              // flag 4 cut

// Experiments
inline constexpr double scan_violation_rel = 1e-6;     // F - CoE >= -tol * max(1, F)
inline constexpr double root_residual = 1e-10;

} // namespace coe::tols

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "coe/dynamics.hpp"
#include "coe/hamiltonian.hpp"
#include "coe/states.hpp"

namespace coe {

struct SLDOperator {
    ComplexMatrix matrix;        // 4x4 Hermitian
    HermitianEigenSystem eigen;  // of the SLD itself
    int support_dim = 0;         // eigenvalue pairs of rho with lambda_a + lambda_b above threshold
};

// Finite-difference policy for parametric derivatives in g. A non-positive
// step requests the default 1e-4 * max(1, |g|).
struct DerivativeConfig {
    enum class Scheme { central3, central5, richardson };
    double step = -1.0;
    Scheme scheme = Scheme::central5;
    double kink_tolerance = tols::kink_concurrence_floor;
    double kink_consistency_rel = tols::kink_consistency_rel;

    double effective_step(double g) const {
        return step > 0.0 ? step : 1e-4 * std::max(1.0, std::abs(g));
    }
};

struct MetrologySample {
    double t = 0.0;
    double g = 1.0;
    double qfi = 0.0;
    std::optional<double> coe;        // empty at concurrence kinks
    double concurrence = 0.0;
    std::vector<double> c_sld;        // eigenvectors with |eigenvalue| > csld_report_floor
    std::vector<double> sld_eigenvalues;
    double dC_dg = 0.0;               // used by the coincidence finder
    bool sld_degenerate = false;
    std::array<bool, 4> flags{false, false, false, false};
};

using DensitySource = std::function<DensityMatrix(double g)>;
using ScalarSource = std::function<double(double g)>;

// F = 4 t^2 [ sum |b_ab|^2 w_ab^2 - ( sum |b_ab|^2 w_ab )^2 ]; g-independent
// for closed pure evolution.
double qfi_pure(const PureState& s0, const CanonicalHamiltonian& ch, double g, double t);

// F = 2 sum_{l_a + l_b > eps} |<l_a| drho |l_b>|^2 / (l_a + l_b), with
// eps = support_threshold_rel * Tr(rho). Returns 0 (with a stderr warning)
// when no pair clears the threshold.
double qfi_mixed(const DensityMatrix& rho, const ComplexMatrix& drho);

// Parametric derivative of a density-matrix source at g; Hermitian and
// traceless on return.
ComplexMatrix drho_dg(const DensitySource& rho_of_g, double g, const DerivativeConfig& cfg = {});

// Exact closed-evolution derivative -i t [h, rho] for pure probes.
ComplexMatrix drho_closed_exact(const PureState& s0, const CanonicalHamiltonian& ch, double g,
                                double t);

SLDOperator sld(const DensityMatrix& rho, const ComplexMatrix& drho);

// (eigenvalue, concurrence) for every SLD eigenvector, ascending eigenvalue.
std::vector<std::pair<double, double>> sld_eigen_concurrences(const SLDOperator& l);

// -d^2 C / dg^2 by the configured stencil; empty when a stencil point sits
// under the concurrence floor or when the 3- and 5-point estimates disagree
// (the kink detector near C = 0).
std::optional<double> coe(const ScalarSource& c_of_g, double g, const DerivativeConfig& cfg = {});

enum class OracleFamily { psi_opt, psi_alpha, phi_alpha, open_separable, open_entangled, bell_pair };

struct OracleParams {
    double alpha = 0.0;    // psi_alpha, phi_alpha, open_entangled
    double eta_xy = 1.0;   // psi_opt, psi_alpha (eta_x + eta_y)
    double eta = 1.0;      // phi_alpha, bell_pair
    double kappa = 0.0;    // open families
    bool opposite_parity = true;  // bell_pair: (-1)^(a+b) differs across the pair
};

struct OracleValues {
    double qfi = 0.0;
    double concurrence = 0.0;
    std::optional<double> coe;
    std::vector<double> c_sld;
};

// Closed-form reference values for each family of Section III/IV.
OracleValues closed_form_suite(OracleFamily family, const OracleParams& p, double g, double t);

struct FidelityRelationResult {
    double residual = 0.0;      // [C(g) - C(g+dg)] - 4 [1 - sqrt(F_U)]
    double qfi_estimate = 0.0;  // (8/dg^2) [1 - sqrt(F_U)]
};

// Checks the concurrence-loss / fidelity relation at a caller-asserted
// concurrence maximum in g.
FidelityRelationResult fidelity_relation_check(const DensitySource& rho_of_g, double g,
                                               double delta_g);

// ---------------------------------------------------------------------------
// Sweep drivers: samples over a time grid at fixed g. These pick the
// finite-difference step from the Hamiltonian's frequency scale so the
// stencil stays well conditioned at every t (DerivativeConfig defaults are
// for standalone use at a single point).
// ---------------------------------------------------------------------------

struct SweepOptions {
    DerivativeConfig derivative;
    double csld_floor = tols::csld_report_floor;
};

std::vector<MetrologySample> sweep_closed(const PureState& s0, const CanonicalHamiltonian& ch,
                                          double g, const std::vector<double>& times,
                                          const SweepOptions& opt = {});

enum class OpenFamily { separable, entangled };

std::vector<MetrologySample> sweep_open_analytic(OpenFamily family, double alpha, double g,
                                                 double kappa, const std::vector<double>& times,
                                                 const SweepOptions& opt = {});

// Step heuristic shared by the sweeps and the scanner: a phase step of
// about 5e-3 radians across the stencil.
double tuned_fd_step(double g, double t, double omega_scale);

} // namespace coe

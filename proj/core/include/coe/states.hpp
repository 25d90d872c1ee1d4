#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "coe/hamiltonian.hpp"
#include "coe/linalg.hpp"
#include "coe/rng.hpp"

namespace coe {

enum class Basis { computational, bell };

struct PureState {
    std::array<cplx, 4> amps{};
    Basis basis = Basis::computational;

    double norm() const;
    PureState normalized() const;

    static PureState ket(int index);  // |00>, |01>, |10>, |11> for 0..3
};

struct DensityMatrix {
    ComplexMatrix rho;  // 4x4
    Basis basis = Basis::computational;

    DensityMatrix() : rho(4, 4) {}
    DensityMatrix(ComplexMatrix r, Basis b);

    static DensityMatrix from_pure(const PureState& s);
    static DensityMatrix maximally_mixed();

    // Validates Hermiticity/trace and clamps eigenvalue dust in
    // [density_min_eig, 0); the clamp magnitude is reported via
    // last_psd_clamp(). Throws if the input is further from a state.
    static DensityMatrix repaired(const ComplexMatrix& r, Basis b);

    double min_eigenvalue() const;
};

// Largest PSD clamp applied by DensityMatrix::repaired in this thread.
double last_psd_clamp();

PureState to_bell(const PureState& s);
PureState to_computational(const PureState& s);
DensityMatrix to_bell(const DensityMatrix& d);
DensityMatrix to_computational(const DensityMatrix& d);

// C = 2 |a00 a11 - a01 a10| for normalized pure states.
double concurrence_pure(const PureState& s);

// Wootters concurrence, computed through the Hermitian form
// sqrt(rho) rho~ sqrt(rho) with spectral flooring of rank dust.
double concurrence_mixed(const DensityMatrix& d);

// [Tr sqrt(sqrt(sigma) chi sqrt(sigma))]^2
double uhlmann_fidelity(const DensityMatrix& sigma, const DensityMatrix& chi);

// d_B = sqrt(2 (1 - sqrt(F_U)))
double bures_distance(const DensityMatrix& sigma, const DensityMatrix& chi);

enum class StateFamily { psi_opt, psi_alpha, phi_alpha, psi_e_alpha };

// The named initial-state families:
//   psi_opt          |01>                                   (= (b01 + b11)/sqrt2)
//   psi_alpha(a)     a |b01> + sqrt(1-a^2) |b11>
//   phi_alpha(a)     (a |0> + sqrt(1-a^2) |1>) (x) |1>
//   psi_e_alpha(a)   a |01> + sqrt(1-a^2) |10>
PureState named_state(StateFamily family, std::optional<double> alpha = std::nullopt);

PureState random_pure_state(std::uint64_t seed);
DensityMatrix random_density_matrix(std::uint64_t seed, int rank);

// Haar-random local unitary pair applied to a state (test utility).
ComplexMatrix random_su2(SplitMix64& rng);

// Line-JSON serialization: basis tag + 8 interleaved re/im reals for pure
// states, 32 for density matrices.
std::string to_line_json(const PureState& s);
std::string to_line_json(const DensityMatrix& d);
PureState pure_from_line_json(const std::string& line);
DensityMatrix density_from_line_json(const std::string& line);

} // namespace coe

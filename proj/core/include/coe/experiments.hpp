#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coe/metrology.hpp"

namespace coe {

// Randomized stress test of the bound QFI >= CoE on the analytic pure-state
// formulas: random diagonal couplings (uniform on [-1, 1]), Haar-random
// Bell amplitudes, and a grid of gt values.
struct ScanConfig {
    std::uint64_t seed = 1;
    int n_hamiltonians = 100;
    int n_states = 100;
    struct Grid {
        double min = 0.3;
        double max = 6.28318530717958647692;
        int points = 10;
    } gt_grid;
    double tolerance = tols::scan_violation_rel;  // violation: F - CoE < -tol * max(1, F)
    int workers = 1;

    std::uint64_t instances() const {
        return static_cast<std::uint64_t>(n_hamiltonians) * static_cast<std::uint64_t>(n_states) *
               static_cast<std::uint64_t>(gt_grid.points);
    }
};

struct ScanInstance {
    std::uint64_t index = 0;  // flat instance index; fixes the RNG stream
    std::array<double, 3> eta{};
    double gt = 0.0;
    double qfi = 0.0;
    double coe = 0.0;
    double margin = 0.0;  // F - CoE
};

struct ScanReport {
    ScanConfig config;
    std::uint64_t instances_evaluated = 0;
    std::uint64_t undefined_coe = 0;
    ScanInstance worst;  // smallest margin among defined-CoE samples
    std::vector<ScanInstance> violations;
    double wall_seconds = 0.0;

    std::string to_line_json() const;
};

ScanReport inequality_scan(const ScanConfig& cfg);

// One scan sample on the analytic pure-state formulas: F from the Bell
// variance, CoE from the analytic concurrence via the 5-point stencil.
// Empty when the CoE is undefined at this point (concurrence kink).
std::optional<ScanInstance> evaluate_scan_instance(const std::array<cplx, 4>& beta_bell,
                                                   const std::array<double, 3>& eta, double gt);

// The four coincidence properties evaluated at a refined CoE = QFI contact:
//   1. concurrence at a maximum in g
//   2. CoE at a maximum in g
//   3. CoE = QFI
//   4. every reported C_SLD zero
struct CoincidenceEvent {
    double t = 0.0;                  // refined contact location
    double ratio = 0.0;              // CoE / F at the contact
    std::array<bool, 4> flags{};
    double c_max_gap = 0.0;          // |t_contact - nearest dC/dg zero|
    double csld_max = 0.0;           // largest C_SLD at the contact
};

struct CoincidenceOptions {
    double ratio_tolerance = tols::coincidence_rel;  // flag 3
    double csld_tolerance = tols::csld_zero;         // flag 4
};

// Detects contacts on a sampled series and annotates the four flags. The
// series rows must carry dC_dg (the sweep drivers fill it).
std::vector<CoincidenceEvent> find_coincidences(const std::vector<MetrologySample>& samples,
                                                const CoincidenceOptions& opt = {});

enum class RootKind { closed, open };

struct RootParams {
    double g_eta = 1.0;  // closed: product g * eta scaling the time axis
    double g = 1.0;      // open
    double kappa = 0.0;  // open
};

// Stationary points of the CoE time profile:
//   closed: tan(2x) = -x            (x = g eta t)
//   open:   tan(2gt) = 2gt/(kt - 2)
// Bisection inside per-branch brackets that avoid the tangent poles;
// residuals below root_residual. The trivial root at 0 is excluded.
std::vector<double> transcendental_roots(RootKind kind, const RootParams& params, int bracket_count);

// ---------------------------------------------------------------------------
// CSV / figure emission
// ---------------------------------------------------------------------------

// Columns: t, gt, g2F, g2CoE (empty when undefined), C, C_SLD_1..3,
// flag_c_max_g, flag_coe_max_g, flag_coe_eq_qfi, flag_csld_zero.
void write_metrology_csv(std::ostream& os, const std::vector<MetrologySample>& samples,
                         const std::string& header_comment);

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          const std::string& header_comment);

enum class Figure { fig1, fig2, fig3, fig4 };

struct FigureParams {
    double alpha = -1.0;   // < 0 means the figure's published default
    double kappa = -1.0;
    double g = 1.0;
    int points = 801;
    double gt_max = 6.28318530717958647692;
};

struct FigureData {
    std::vector<MetrologySample> samples;
    std::vector<CoincidenceEvent> events;
    std::string csv_name;
    std::string script_name;
};

// Computes the samples behind the published figure and annotates
// coincidence flags on the rows nearest each detected event.
FigureData figure_data(Figure which, const FigureParams& params = {});

// Writes <name>.csv plus a companion matplotlib script referencing only
// the CSV. Returns the paths written.
std::vector<std::string> emit_figure(Figure which, const FigureParams& params,
                                     const std::string& out_dir,
                                     const std::string& header_comment);

} // namespace coe

#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coe/experiments.hpp"
#include "coe/version.hpp"

namespace coe::cli {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> parse_reals(const std::string& text) {
    std::string cleaned = text;
    for (auto& c : cleaned)
        if (c == ',' || c == ';') c = ' ';
    std::istringstream is(cleaned);
    std::vector<double> out;
    double v = 0.0;
    while (is >> v) out.push_back(v);
    return out;
}

// "name:a,b,c" -> (name, {a, b, c})
std::pair<std::string, std::vector<double>> parse_tagged(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {text, {}};
    return {text.substr(0, colon), parse_reals(text.substr(colon + 1))};
}

CouplingMatrix parse_hamiltonian(const std::string& named, const std::string& eta_text, double g) {
    if (!named.empty() && !eta_text.empty())
        throw CLI::ValidationError("hamiltonian", "give either --named or --eta, not both");
    if (!named.empty()) {
        const auto [name, args] = parse_tagged(named);
        if (name == "flipflop") {
            if (args.size() != 1) throw CLI::ValidationError("named", "flipflop needs eta_xy, e.g. flipflop:1.0");
            return CouplingMatrix::flipflop(args[0], g);
        }
        if (name == "heisenberg") {
            if (args.size() != 3) throw CLI::ValidationError("named", "heisenberg needs eta_x,eta_y,eta_z");
            return CouplingMatrix::heisenberg(args[0], args[1], args[2], g);
        }
        if (name == "permutation") {
            if (args.size() != 3) throw CLI::ValidationError("named", "permutation needs eta_xy,eta_yz,eta_zx");
            return CouplingMatrix::permutation(args[0], args[1], args[2], g);
        }
        throw CLI::ValidationError("named", "unknown Hamiltonian '" + name + "'");
    }
    const std::vector<double> vals = parse_reals(eta_text);
    if (vals.size() != 9)
        throw CLI::ValidationError("eta", "expected 9 whitespace/comma-separated reals (row-major)");
    CouplingMatrix cm;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cm.eta(i, j) = vals[static_cast<std::size_t>(3 * i + j)];
    cm.g = g;
    return cm;
}

PureState parse_state(const std::string& text, const std::string& basis) {
    const auto [name, args] = parse_tagged(text);
    const auto one_arg = [&](const char* what) {
        if (args.size() != 1)
            throw CLI::ValidationError("state", std::string(what) + " needs alpha, e.g. " + what + ":0.3");
        return args[0];
    };
    if (name == "psi_opt") return named_state(StateFamily::psi_opt);
    if (name == "psi_alpha") return named_state(StateFamily::psi_alpha, one_arg("psi_alpha"));
    if (name == "phi_alpha") return named_state(StateFamily::phi_alpha, one_arg("phi_alpha"));
    if (name == "psi_e_alpha") return named_state(StateFamily::psi_e_alpha, one_arg("psi_e_alpha"));
    if (name == "raw") {
        if (args.size() != 8)
            throw CLI::ValidationError("state", "raw needs 8 reals (interleaved re/im)");
        PureState s;
        s.basis = (basis == "bell") ? Basis::bell : Basis::computational;
        for (int i = 0; i < 4; ++i)
            s.amps[static_cast<std::size_t>(i)] =
                cplx(args[static_cast<std::size_t>(2 * i)], args[static_cast<std::size_t>(2 * i + 1)]);
        return s.normalized();
    }
    throw CLI::ValidationError("state", "unknown state family '" + name + "'");
}

std::string resolved_output_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("COE_OUTPUT_DIR"); env && *env) return env;
    return flag_value.empty() ? "." : flag_value;
}

std::string header_comment(const std::string& subcommand, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ostringstream os;
    os << "# coe " << version_string() << " :: " << subcommand << '\n';
    for (const auto& [k, v] : kv) os << "# " << k << " = " << v << '\n';
    return os.str();
}

std::string d2s(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void print_matrix(std::ostream& os, const ComplexMatrix& m, const std::string& label) {
    os << label << ":\n";
    for (int i = 0; i < m.rows(); ++i) {
        os << "  ";
        for (int j = 0; j < m.cols(); ++j) {
            const cplx z = m(i, j);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "(% .9f,% .9f) ", z.real(), z.imag());
            os << buf;
        }
        os << '\n';
    }
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) throw CLI::ValidationError("points", "must be positive");
    if (points == 1) return {lo};
    if (!(hi > lo)) throw CLI::ValidationError("t-max", "grid must ascend");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1.0);
    return g;
}

std::ostream& open_sink(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

// ---------------------------------------------------------------------------

int cmd_canonicalize(const std::string& named, const std::string& eta_text, double g, bool json_out) {
    const CouplingMatrix cm = parse_hamiltonian(named, eta_text, g);
    const CanonicalHamiltonian ch = canonicalize(cm);
    if (json_out) {
        std::ostringstream os;
        os.precision(15);
        os << "{\"eta\":[" << ch.eta_x << ',' << ch.eta_y << ',' << ch.eta_z << "],\"g\":" << ch.g
           << ",\"u1\":" << '[';
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                os << ch.u1(i, j).real() << ',' << ch.u1(i, j).imag() << (i == 1 && j == 1 ? "" : ",");
        os << "],\"u2\":[";
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                os << ch.u2(i, j).real() << ',' << ch.u2(i, j).imag() << (i == 1 && j == 1 ? "" : ",");
        os << "]}";
        std::cout << os.str() << '\n';
        return 0;
    }
    std::cout << "canonical couplings (eta_x, eta_y, eta_z) = (" << d2s(ch.eta_x) << ", "
              << d2s(ch.eta_y) << ", " << d2s(ch.eta_z) << "), g = " << d2s(ch.g) << '\n';
    print_matrix(std::cout, ch.u1, "u1");
    print_matrix(std::cout, ch.u2, "u2");
    return 0;
}

int cmd_evolve(const std::string& named, const std::string& eta_text, const std::string& state,
               const std::string& basis, double g, double kappa, double t_max, int points,
               double tol, const std::string& out) {
    const CouplingMatrix cm = parse_hamiltonian(named, eta_text, g);
    const CanonicalHamiltonian ch = canonicalize(cm);
    const PureState s0 = parse_state(state, basis);
    const std::vector<double> times = linear_grid(0.0, t_max, points);

    Trajectory tr;
    if (kappa == 0.0) {
        tr.times = times;
        tr.g = g;
        tr.provenance = Provenance::closed_analytic;
        for (const double t : times)
            tr.pure_states.push_back(to_computational(evolve_closed(s0, ch, g, t)));
    } else {
        tr = evolve_open_trajectory(DensityMatrix::from_pure(s0), ch,
                                    NoiseSpec::amplitude_damping(kappa), g, times, tol);
    }

    std::ofstream file;
    std::ostream& os = open_sink(file, out);
    write_trajectory_csv(os, tr,
                         header_comment("evolve", {{"hamiltonian", named.empty() ? eta_text : named},
                                                   {"state", state},
                                                   {"g", d2s(g)},
                                                   {"kappa", d2s(kappa)},
                                                   {"t_max", d2s(t_max)},
                                                   {"points", std::to_string(points)}}));
    return 0;
}

int cmd_sweep(const std::string& kind, const std::string& named, const std::string& eta_text,
              const std::string& state, const std::string& basis, double alpha, double g,
              double kappa, double gt_max, int points, const std::string& out) {
    const std::vector<double> times = linear_grid(0.0, gt_max / g, points);
    std::vector<MetrologySample> samples;
    if (kind == "closed") {
        const CouplingMatrix cm = parse_hamiltonian(named, eta_text, g);
        const CanonicalHamiltonian ch = canonicalize(cm);
        samples = sweep_closed(parse_state(state, basis), ch, g, times);
    } else if (kind == "open-separable") {
        samples = sweep_open_analytic(OpenFamily::separable, 0.0, g, kappa, times);
    } else if (kind == "open-entangled") {
        if (alpha < 0.0 || alpha > 1.0)
            throw CLI::ValidationError("alpha", "open-entangled needs --alpha in [0, 1]");
        samples = sweep_open_analytic(OpenFamily::entangled, alpha, g, kappa, times);
    } else {
        throw CLI::ValidationError("kind", "expected closed | open-separable | open-entangled");
    }
    const auto events = find_coincidences(samples);
    for (const auto& ev : events) {
        std::size_t best = 0;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double d = std::abs(samples[i].t - ev.t);
            if (d < gap) gap = d, best = i;
        }
        samples[best].flags = ev.flags;
    }

    std::ofstream file;
    std::ostream& os = open_sink(file, out);
    write_metrology_csv(os, samples,
                        header_comment("sweep", {{"kind", kind},
                                                 {"state", state},
                                                 {"alpha", d2s(alpha)},
                                                 {"g", d2s(g)},
                                                 {"kappa", d2s(kappa)},
                                                 {"gt_max", d2s(gt_max)},
                                                 {"points", std::to_string(points)}}));
    return 0;
}

int cmd_scan(std::uint64_t seed, long long n_total, int n_h, int n_s, double gt_min, double gt_max,
             int gt_points, double tolerance, int workers, const std::string& out) {
    ScanConfig cfg;
    cfg.seed = seed;
    cfg.gt_grid.min = gt_min;
    cfg.gt_grid.max = gt_max;
    cfg.gt_grid.points = gt_points;
    cfg.tolerance = tolerance;
    cfg.workers = workers;
    if (n_total > 0) {
        const double per_cell = static_cast<double>(n_total) / gt_points;
        cfg.n_hamiltonians = std::max(1, static_cast<int>(std::llround(std::sqrt(per_cell))));
        cfg.n_states = std::max(1, static_cast<int>(std::llround(per_cell / cfg.n_hamiltonians)));
    } else {
        cfg.n_hamiltonians = n_h;
        cfg.n_states = n_s;
    }
    const ScanReport report = inequality_scan(cfg);
    std::ofstream file;
    std::ostream& os = open_sink(file, out);
    os << report.to_line_json() << '\n';
    if (!report.violations.empty()) {
        std::cerr << "scan: " << report.violations.size() << " violation(s) found\n";
        return 2;
    }
    return 0;
}

int cmd_roots(const std::string& kind, double g_eta, double g, double kappa, int count) {
    RootParams params;
    params.g_eta = g_eta;
    params.g = g;
    params.kappa = kappa;
    const RootKind rk = (kind == "closed") ? RootKind::closed : RootKind::open;
    if (kind != "closed" && kind != "open")
        throw CLI::ValidationError("kind", "expected closed | open");
    const std::vector<double> roots = transcendental_roots(rk, params, count);
    std::cout << "# n, t_n, gt-scale residual\n";
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double t = roots[i];
        double residual = 0.0;
        if (rk == RootKind::closed) {
            const double x = t * std::abs(g_eta);
            residual = std::tan(2.0 * x) + x;
        } else {
            residual = std::tan(2.0 * g * t) - 2.0 * g * t / (kappa * t - 2.0);
        }
        std::cout << i << ", " << d2s(t) << ", " << d2s(residual) << '\n';
    }
    return 0;
}

int cmd_figures(const std::string& which, double alpha, double kappa, double g, int points,
                const std::string& out_dir_flag) {
    const std::string out_dir = resolved_output_dir(out_dir_flag);
    FigureParams params;
    params.alpha = alpha;
    params.kappa = kappa;
    params.g = g;
    params.points = points;

    std::vector<Figure> figures;
    if (which == "all") {
        figures = {Figure::fig1, Figure::fig2, Figure::fig3, Figure::fig4};
    } else if (which == "fig1") {
        figures = {Figure::fig1};
    } else if (which == "fig2") {
        figures = {Figure::fig2};
    } else if (which == "fig3") {
        figures = {Figure::fig3};
    } else if (which == "fig4") {
        figures = {Figure::fig4};
    } else {
        throw CLI::ValidationError("which", "expected fig1 | fig2 | fig3 | fig4 | all");
    }
    for (const Figure f : figures) {
        const auto paths = emit_figure(
            f, params, out_dir,
            header_comment("figures", {{"which", which},
                                       {"alpha", d2s(alpha)},
                                       {"kappa", d2s(kappa)},
                                       {"g", d2s(g)},
                                       {"points", std::to_string(points)}}));
        for (const auto& p : paths) std::cout << "wrote " << p << '\n';
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"two-qubit coupling metrology: QFI, concurrence and its curvature"};
    app.require_subcommand(1);

    // Shared option storage.
    std::string named, eta_text, state = "psi_opt", basis = "computational", out, out_dir, kind,
                which = "all";
    double g = 1.0, kappa = 0.0, t_max = kTwoPi, gt_max = kTwoPi, alpha = -1.0, tol = 1e-9;
    double g_eta = 1.0, gt_min = 0.3, scan_tol = tols::scan_violation_rel;
    int points = 801, count = 8, workers = 1, gt_points = 10, n_h = 100, n_s = 100;
    long long n_total = 0;
    std::uint64_t seed = 1;

    const auto add_config = [](CLI::App* sub) {
        sub->set_config("--config", "", "flat key=value config file; flags win");
        sub->allow_config_extras(false);
    };
    const auto add_ham = [&](CLI::App* sub) {
        sub->add_option("--named", named, "flipflop:exy | heisenberg:ex,ey,ez | permutation:exy,eyz,ezx");
        sub->add_option("--eta", eta_text, "9 reals, row-major coefficient matrix");
        sub->add_option("--g", g, "coupling strength");
    };

    auto* c_canon = app.add_subcommand("canonicalize", "diagonalize a coupling matrix");
    add_config(c_canon);
    add_ham(c_canon);
    bool canon_json = false;
    c_canon->add_flag("--json", canon_json, "machine-readable output");

    auto* c_evolve = app.add_subcommand("evolve", "closed or amplitude-damped trajectory CSV");
    add_config(c_evolve);
    add_ham(c_evolve);
    c_evolve->add_option("--state", state, "psi_opt | psi_alpha:a | phi_alpha:a | psi_e_alpha:a | raw:8 reals");
    c_evolve->add_option("--state-basis", basis, "computational | bell (raw states only)");
    c_evolve->add_option("--kappa", kappa, "decay rate (0 = closed)");
    c_evolve->add_option("--t-max", t_max, "final time");
    c_evolve->add_option("--points", points, "grid size");
    c_evolve->add_option("--tol", tol, "integrator tolerance");
    c_evolve->add_option("--out", out, "output CSV (default stdout)");

    auto* c_sweep = app.add_subcommand("sweep", "metrology samples over a time grid");
    add_config(c_sweep);
    add_ham(c_sweep);
    c_sweep->add_option("--kind", kind, "closed | open-separable | open-entangled")->required();
    c_sweep->add_option("--state", state, "initial state (closed kind)");
    c_sweep->add_option("--state-basis", basis, "computational | bell");
    c_sweep->add_option("--alpha", alpha, "alpha for open-entangled");
    c_sweep->add_option("--kappa", kappa, "decay rate (open kinds)");
    c_sweep->add_option("--gt-max", gt_max, "sweep end in gt units");
    c_sweep->add_option("--points", points, "grid size");
    c_sweep->add_option("--out", out, "output CSV (default stdout)");

    auto* c_scan = app.add_subcommand("scan", "randomized QFI >= CoE stress test");
    add_config(c_scan);
    c_scan->add_option("--seed", seed, "RNG seed");
    c_scan->add_option("--n", n_total, "approximate total instances (overrides counts)");
    c_scan->add_option("--n-hamiltonians", n_h, "random coupling triples");
    c_scan->add_option("--n-states", n_s, "random initial states");
    c_scan->add_option("--gt-min", gt_min, "grid start");
    c_scan->add_option("--gt-max", gt_max, "grid end");
    c_scan->add_option("--gt-points", gt_points, "grid size");
    c_scan->add_option("--tolerance", scan_tol, "violation threshold (relative)");
    c_scan->add_option("--workers", workers, "worker threads");
    c_scan->add_option("--out", out, "report path (default stdout)");

    auto* c_roots = app.add_subcommand("roots", "stationary points of the CoE time profile");
    add_config(c_roots);
    c_roots->add_option("--kind", kind, "closed | open")->required();
    c_roots->add_option("--g-eta", g_eta, "g*eta scale (closed)");
    c_roots->add_option("--g", g, "coupling (open)");
    c_roots->add_option("--kappa", kappa, "decay rate (open)");
    c_roots->add_option("--count", count, "number of roots");

    auto* c_fig = app.add_subcommand("figures", "emit figure CSVs and plotting scripts");
    add_config(c_fig);
    c_fig->add_option("--which", which, "fig1 | fig2 | fig3 | fig4 | all");
    c_fig->add_option("--alpha", alpha, "override the published alpha");
    c_fig->add_option("--kappa", kappa, "override the published kappa (absolute)");
    c_fig->add_option("--g", g, "coupling");
    c_fig->add_option("--points", points, "samples per curve");
    c_fig->add_option("--out-dir", out_dir, "output directory (COE_OUTPUT_DIR overrides)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return (app.exit(e) == 0) ? 0 : 1;
    }

    try {
        if (c_canon->parsed()) return cmd_canonicalize(named, eta_text, g, canon_json);
        if (c_evolve->parsed())
            return cmd_evolve(named, eta_text, state, basis, g, kappa, t_max, points, tol, out);
        if (c_sweep->parsed())
            return cmd_sweep(kind, named, eta_text, state, basis, alpha, g, kappa, gt_max, points, out);
        if (c_scan->parsed())
            return cmd_scan(seed, n_total, n_h, n_s, gt_min, gt_max, gt_points, scan_tol, workers, out);
        if (c_roots->parsed()) return cmd_roots(kind, g_eta, g, kappa, count);
        if (c_fig->parsed()) {
            const double fig_kappa = (c_fig->count("--kappa") > 0) ? kappa : -1.0;
            return cmd_figures(which, alpha, fig_kappa, g, points, out_dir);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace coe::cli

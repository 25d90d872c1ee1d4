#include "coe/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace coe {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

struct PureScanState {
    std::array<cplx, 4> beta{};  // Bell amplitudes
};

std::array<double, 4> omegas_from_eta(const std::array<double, 3>& eta) {
    std::array<double, 4> w{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double sa = (a == 0) ? 1.0 : -1.0;
            const double sab = ((a + b) % 2 == 0) ? 1.0 : -1.0;
            const double sb = (b == 0) ? 1.0 : -1.0;
            w[static_cast<std::size_t>(2 * a + b)] = sa * eta[0] - sab * eta[1] + sb * eta[2];
        }
    return w;
}

// Analytic pure-state concurrence of the evolved state:
//   C(g, t) = | sum_ab (-1)^(a+b) beta_ab^2 e^{-2 i g w_ab t} |
double scan_concurrence(const PureScanState& s, const std::array<double, 4>& w, double g, double t) {
    cplx acc = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double sign = (k == 0 || k == 3) ? 1.0 : -1.0;  // (-1)^(a+b), k = 2a+b
        const double phase = -2.0 * g * w[static_cast<std::size_t>(k)] * t;
        acc += sign * s.beta[static_cast<std::size_t>(k)] * s.beta[static_cast<std::size_t>(k)] *
               cplx(std::cos(phase), std::sin(phase));
    }
    return std::abs(acc);
}

double scan_qfi(const PureScanState& s, const std::array<double, 4>& w, double t) {
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double p = std::norm(s.beta[static_cast<std::size_t>(k)]);
        m1 += p * w[static_cast<std::size_t>(k)];
        m2 += p * w[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(k)];
    }
    return 4.0 * t * t * std::max(0.0, m2 - m1 * m1);
}

} // namespace

std::optional<ScanInstance> evaluate_scan_instance(const std::array<cplx, 4>& beta_bell,
                                                   const std::array<double, 3>& eta, double gt) {
    PureScanState st;
    st.beta = beta_bell;
    const std::array<double, 4> w = omegas_from_eta(eta);
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, std::abs(x));

    DerivativeConfig dcfg;
    dcfg.step = tuned_fd_step(1.0, gt, std::max(wmax, 1e-6));
    const double f = scan_qfi(st, w, gt);
    const auto c_of_g = [&](double gg) { return scan_concurrence(st, w, gg, gt); };
    const std::optional<double> coe_val = coe(c_of_g, 1.0, dcfg);
    if (!coe_val) return std::nullopt;

    ScanInstance inst;
    inst.eta = eta;
    inst.gt = gt;
    inst.qfi = f;
    inst.coe = *coe_val;
    inst.margin = f - *coe_val;
    return inst;
}

ScanReport inequality_scan(const ScanConfig& cfg) {
    if (cfg.n_hamiltonians <= 0 || cfg.n_states <= 0 || cfg.gt_grid.points <= 0)
        throw LinalgError("inequality_scan: counts must be positive");
    if (!(cfg.gt_grid.max > cfg.gt_grid.min))
        throw LinalgError("inequality_scan: invalid gt grid");
    const int workers = std::max(1, cfg.workers);

    const auto t0 = std::chrono::steady_clock::now();

    // Draw every Hamiltonian and state up front from per-index streams so
    // the report is independent of the worker count.
    SplitMix64 base(cfg.seed);
    std::vector<std::array<double, 3>> etas(static_cast<std::size_t>(cfg.n_hamiltonians));
    for (int h = 0; h < cfg.n_hamiltonians; ++h) {
        SplitMix64 r = base.split(0x100000000ULL + static_cast<std::uint64_t>(h));
        for (int k = 0; k < 3; ++k) etas[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)] = r.uniform(-1.0, 1.0);
    }
    std::vector<PureScanState> states(static_cast<std::size_t>(cfg.n_states));
    for (int s = 0; s < cfg.n_states; ++s) {
        SplitMix64 r = base.split(0x200000000ULL + static_cast<std::uint64_t>(s));
        double n2 = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double re = r.gaussian();
            const double im = r.gaussian();
            states[static_cast<std::size_t>(s)].beta[static_cast<std::size_t>(k)] = cplx(re, im);
            n2 += re * re + im * im;
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& b : states[static_cast<std::size_t>(s)].beta) b *= inv;
    }
    std::vector<double> grid(static_cast<std::size_t>(cfg.gt_grid.points));
    for (int p = 0; p < cfg.gt_grid.points; ++p) {
        grid[static_cast<std::size_t>(p)] =
            cfg.gt_grid.points == 1
                ? cfg.gt_grid.min
                : cfg.gt_grid.min + (cfg.gt_grid.max - cfg.gt_grid.min) * p / (cfg.gt_grid.points - 1.0);
    }

    struct Partial {
        std::uint64_t undefined = 0;
        bool has_worst = false;
        ScanInstance worst;
        std::vector<ScanInstance> violations;
    };
    std::vector<Partial> partials(static_cast<std::size_t>(workers));

    const std::uint64_t total = cfg.instances();
    const auto run_range = [&](std::uint64_t lo, std::uint64_t hi, Partial& part) {
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            const std::uint64_t p = idx % static_cast<std::uint64_t>(cfg.gt_grid.points);
            const std::uint64_t rest = idx / static_cast<std::uint64_t>(cfg.gt_grid.points);
            const std::uint64_t s = rest % static_cast<std::uint64_t>(cfg.n_states);
            const std::uint64_t h = rest / static_cast<std::uint64_t>(cfg.n_states);

            std::optional<ScanInstance> inst_opt =
                evaluate_scan_instance(states[static_cast<std::size_t>(s)].beta,
                                       etas[static_cast<std::size_t>(h)],
                                       grid[static_cast<std::size_t>(p)]);
            if (!inst_opt) {
                ++part.undefined;
                continue;
            }
            ScanInstance inst = *inst_opt;
            inst.index = idx;
            if (!part.has_worst || inst.margin < part.worst.margin ||
                (inst.margin == part.worst.margin && inst.index < part.worst.index)) {
                part.worst = inst;
                part.has_worst = true;
            }
            if (inst.margin < -cfg.tolerance * std::max(1.0, inst.qfi)) part.violations.push_back(inst);
        }
    };

    if (workers == 1) {
        run_range(0, total, partials[0]);
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t chunk = (total + static_cast<std::uint64_t>(workers) - 1) /
                                    static_cast<std::uint64_t>(workers);
        for (int wk = 0; wk < workers; ++wk) {
            const std::uint64_t lo = std::min(total, chunk * static_cast<std::uint64_t>(wk));
            const std::uint64_t hi = std::min(total, lo + chunk);
            threads.emplace_back(run_range, lo, hi, std::ref(partials[static_cast<std::size_t>(wk)]));
        }
        for (auto& th : threads) th.join();
    }

    ScanReport report;
    report.config = cfg;
    report.instances_evaluated = total;
    for (const auto& part : partials) report.undefined_coe += part.undefined;
    bool seeded = false;
    for (const auto& part : partials) {
        if (!part.has_worst) continue;
        if (!seeded || part.worst.margin < report.worst.margin ||
            (part.worst.margin == report.worst.margin && part.worst.index < report.worst.index)) {
            report.worst = part.worst;
            seeded = true;
        }
    }
    for (const auto& part : partials)
        report.violations.insert(report.violations.end(), part.violations.begin(),
                                 part.violations.end());
    std::sort(report.violations.begin(), report.violations.end(),
              [](const ScanInstance& a, const ScanInstance& b) { return a.index < b.index; });

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

nlohmann::json instance_json(const ScanInstance& inst) {
    return nlohmann::json{{"index", inst.index}, {"eta", inst.eta},   {"gt", inst.gt},
                          {"qfi", inst.qfi},     {"coe", inst.coe},   {"margin", inst.margin}};
}

} // namespace

std::string ScanReport::to_line_json() const {
    nlohmann::json j;
    j["config"] = {{"seed", config.seed},
                   {"n_hamiltonians", config.n_hamiltonians},
                   {"n_states", config.n_states},
                   {"gt_grid", {{"min", config.gt_grid.min}, {"max", config.gt_grid.max}, {"points", config.gt_grid.points}}},
                   {"tolerance", config.tolerance},
                   {"workers", config.workers},
                   {"eta_distribution", "uniform[-1,1] per diagonal entry"},
                   {"state_distribution", "Haar (4 complex standard normals, normalized)"}};
    j["instances_evaluated"] = instances_evaluated;
    j["undefined_coe"] = undefined_coe;
    j["worst"] = instance_json(worst);
    j["violations"] = nlohmann::json::array();
    for (const auto& v : violations) j["violations"].push_back(instance_json(v));
    j["wall_seconds"] = wall_seconds;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Coincidence finder
// ---------------------------------------------------------------------------

std::vector<CoincidenceEvent> find_coincidences(const std::vector<MetrologySample>& samples,
                                                const CoincidenceOptions& opt) {
    std::vector<CoincidenceEvent> events;
    const std::size_t n = samples.size();
    if (n < 3) return events;

    const auto ratio_at = [&](std::size_t i) -> double {
        if (!samples[i].coe || samples[i].qfi < 1e-12) return std::nan("");
        return *samples[i].coe / samples[i].qfi;
    };

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rm = ratio_at(i - 1);
        const double r0 = ratio_at(i);
        const double rp = ratio_at(i + 1);
        if (!std::isfinite(rm) || !std::isfinite(r0) || !std::isfinite(rp)) continue;
        if (!(r0 >= rm && r0 >= rp)) continue;

        // Parabolic refinement of the contact (uniform grids only; otherwise
        // the raw sample stands).
        const double t1 = samples[i - 1].t, t2 = samples[i].t, t3 = samples[i + 1].t;
        const double h1 = t2 - t1, h2 = t3 - t2;
        const double denom = rm - 2.0 * r0 + rp;
        double t_star = t2;
        double r_star = r0;
        if (denom < 0.0 && std::abs(h1 - h2) < 1e-9 * std::max(h1, h2)) {
            const double delta = 0.5 * (rm - rp) / denom;
            t_star = t2 + delta * h1;
            r_star = r0 - 0.25 * (rm - rp) * delta;
        }
        if (std::abs(r_star - 1.0) > opt.ratio_tolerance) continue;

        CoincidenceEvent ev;
        ev.t = t_star;
        ev.ratio = r_star;
        ev.flags[2] = true;
        ev.flags[1] = denom < 0.0;

        // Property 1: a sign change of dC/dg adjacent to the contact.
        ev.flags[0] = false;
        ev.c_max_gap = std::numeric_limits<double>::infinity();
        const std::size_t lo = (i >= 2) ? i - 2 : 0;
        const std::size_t hi = std::min(n - 2, i + 1);
        for (std::size_t k = lo; k <= hi; ++k) {
            const double a = samples[k].dC_dg;
            const double b = samples[k + 1].dC_dg;
            if (a == 0.0 && b == 0.0) continue;
            if ((a > 0.0 && b < 0.0) || a == 0.0 || b == 0.0) {
                const double frac = (a == b) ? 0.5 : a / (a - b);
                const double t_c = samples[k].t + frac * (samples[k + 1].t - samples[k].t);
                ev.c_max_gap = std::min(ev.c_max_gap, std::abs(t_c - t_star));
            }
        }
        const double grid_step = std::max(t2 - t1, t3 - t2);
        ev.flags[0] = ev.c_max_gap <= 1.5 * grid_step;

        // Property 4: every reported SLD-eigenvector concurrence vanishes
        // at the contact (linear interpolation between the two rows that
        // bracket it).
        std::size_t ia = i, ib = i;
        if (t_star >= t2 && i + 1 < n) ib = i + 1;
        if (t_star < t2 && i >= 1) ia = i - 1, ib = i;
        const double span = samples[ib].t - samples[ia].t;
        const double w = (span > 0.0) ? (t_star - samples[ia].t) / span : 0.0;
        const std::size_t ncols = std::min(samples[ia].c_sld.size(), samples[ib].c_sld.size());
        double cmax = 0.0;
        for (std::size_t c = 0; c < ncols; ++c)
            cmax = std::max(cmax, (1.0 - w) * samples[ia].c_sld[c] + w * samples[ib].c_sld[c]);
        ev.csld_max = cmax;
        ev.flags[3] = (ncols > 0) && (cmax < opt.csld_tolerance);

        events.push_back(ev);
    }
    return events;
}

// ---------------------------------------------------------------------------
// Transcendental roots
// ---------------------------------------------------------------------------

namespace {

double bisect_polish(const std::function<double(double)>& f,
                     const std::function<double(double)>& fprime, double lo, double hi) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0)) throw LinalgError("transcendental_roots: empty bracket");
    for (int it = 0; it < 200 && (hi - lo) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double fx = f(x);
        const double dfx = fprime(x);
        if (dfx == 0.0) break;
        const double step = fx / dfx;
        const double xn = x - step;
        if (xn <= lo || xn >= hi) break;
        x = xn;
    }
    return x;
}

} // namespace

std::vector<double> transcendental_roots(RootKind kind, const RootParams& params,
                                         int bracket_count) {
    if (bracket_count <= 0) throw LinalgError("transcendental_roots: bracket_count must be positive");
    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(bracket_count));

    if (kind == RootKind::closed) {
        if (params.g_eta == 0.0) throw LinalgError("transcendental_roots: g_eta must be nonzero");
        const auto f = [](double x) { return std::tan(2.0 * x) + x; };
        const auto fp = [](double x) {
            const double t = std::tan(2.0 * x);
            return 2.0 * (1.0 + t * t) + 1.0;
        };
        // One root per interval between tangent poles ((2k+1) pi/4, (2k+3) pi/4).
        for (int k = 0; k < bracket_count; ++k) {
            const double pole_lo = (2.0 * k + 1.0) * kPi / 4.0;
            const double pole_hi = (2.0 * k + 3.0) * kPi / 4.0;
            const double pad = 1e-9 * (1.0 + pole_hi);
            roots.push_back(bisect_polish(f, fp, pole_lo + pad, pole_hi - pad) / std::abs(params.g_eta));
        }
        return roots;
    }

    // Open kind: tan(2gt) = 2gt / (kappa t - 2).
    const double g = params.g;
    const double kappa = params.kappa;
    if (g <= 0.0) throw LinalgError("transcendental_roots: g must be positive");
    if (kappa < 0.0) throw LinalgError("transcendental_roots: kappa must be non-negative");
    const auto f = [&](double t) { return std::tan(2.0 * g * t) - 2.0 * g * t / (kappa * t - 2.0); };
    const auto fp = [&](double t) {
        const double tn = std::tan(2.0 * g * t);
        const double d = kappa * t - 2.0;
        return 2.0 * g * (1.0 + tn * tn) + 4.0 * g / (d * d);
    };
    const double rhs_pole = (kappa > 0.0) ? 2.0 / kappa : std::numeric_limits<double>::infinity();
    int k = 1;
    while (static_cast<int>(roots.size()) < bracket_count && k < bracket_count * 4 + 16) {
        const double pole_lo = (2.0 * k - 1.0) * kPi / (4.0 * g);
        const double pole_hi = (2.0 * k + 1.0) * kPi / (4.0 * g);
        const double pad = 1e-9 * (1.0 + pole_hi);
        std::vector<std::pair<double, double>> segments;
        if (rhs_pole > pole_lo + pad && rhs_pole < pole_hi - pad) {
            segments.emplace_back(pole_lo + pad, rhs_pole - pad);
            segments.emplace_back(rhs_pole + pad, pole_hi - pad);
        } else {
            segments.emplace_back(pole_lo + pad, pole_hi - pad);
        }
        for (const auto& [lo, hi] : segments) {
            if (!(hi > lo)) continue;
            if (f(lo) < 0.0 && f(hi) > 0.0) roots.push_back(bisect_polish(f, fp, lo, hi));
            if (static_cast<int>(roots.size()) >= bracket_count) break;
        }
        ++k;
    }
    return roots;
}

// ---------------------------------------------------------------------------
// CSV and figures
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void write_metrology_csv(std::ostream& os, const std::vector<MetrologySample>& samples,
                         const std::string& header_comment) {
    if (!header_comment.empty()) os << header_comment;
    os << "t,gt,g2F,g2CoE,C,C_SLD_1,C_SLD_2,C_SLD_3,"
          "flag_c_max_g,flag_coe_max_g,flag_coe_eq_qfi,flag_csld_zero\n";
    for (const auto& s : samples) {
        const double g2 = s.g * s.g;
        os << fmt(s.t) << ',' << fmt(s.g * s.t) << ',' << fmt(g2 * s.qfi) << ',';
        if (s.coe) os << fmt(g2 * *s.coe);
        os << ',' << fmt(s.concurrence);
        for (std::size_t k = 0; k < 3; ++k) {
            os << ',';
            if (k < s.c_sld.size()) os << fmt(s.c_sld[k]);
        }
        for (int k = 0; k < 4; ++k) os << ',' << (s.flags[static_cast<std::size_t>(k)] ? 1 : 0);
        os << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          const std::string& header_comment) {
    if (!header_comment.empty()) os << header_comment;
    const bool pure = !trajectory.pure_states.empty();
    os << "t,g";
    if (pure) {
        const char* kets[4] = {"00", "01", "10", "11"};
        for (const auto* k : kets) os << ",re_" << k << ",im_" << k;
    } else {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) os << ",re_" << i << j << ",im_" << i << j;
    }
    os << '\n';
    for (std::size_t n = 0; n < trajectory.times.size(); ++n) {
        os << fmt(trajectory.times[n]) << ',' << fmt(trajectory.g);
        if (pure) {
            const auto& s = trajectory.pure_states[n];
            for (int i = 0; i < 4; ++i)
                os << ',' << fmt(s.amps[static_cast<std::size_t>(i)].real()) << ','
                   << fmt(s.amps[static_cast<std::size_t>(i)].imag());
        } else {
            const auto& r = trajectory.mixed_states[n].rho;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    os << ',' << fmt(r(i, j).real()) << ',' << fmt(r(i, j).imag());
        }
        os << '\n';
    }
}

namespace {

struct FigureSpec {
    const char* name;
    const char* title;
    double default_alpha;
    double default_kappa;
};

FigureSpec figure_spec(Figure which) {
    switch (which) {
        case Figure::fig1: return {"fig1", "unequal Bell superposition, alpha = 0.3", 0.3, 0.0};
        case Figure::fig2: return {"fig2", "product-family initial state, alpha = 0.3", 0.3, 0.0};
        case Figure::fig3: return {"fig3", "separable initial state with damping, kappa/g = 0.5", 0.0, 0.5};
        case Figure::fig4: return {"fig4", "entangled initial state with damping, alpha = 0.25", 0.25, 0.5};
    }
    throw LinalgError("figure_spec: unknown figure");
}

void annotate_flags(std::vector<MetrologySample>& samples,
                    const std::vector<CoincidenceEvent>& events) {
    for (const auto& ev : events) {
        std::size_t best = 0;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double d = std::abs(samples[i].t - ev.t);
            if (d < gap) {
                gap = d;
                best = i;
            }
        }
        samples[best].flags = ev.flags;
    }
}

} // namespace

FigureData figure_data(Figure which, const FigureParams& params) {
    const FigureSpec spec = figure_spec(which);
    const double alpha = params.alpha >= 0.0 ? params.alpha : spec.default_alpha;
    const double kappa = params.kappa >= 0.0 ? params.kappa : spec.default_kappa * params.g;
    const double g = params.g;
    if (params.points < 2) throw LinalgError("figure_data: need at least 2 points");

    std::vector<double> times(static_cast<std::size_t>(params.points));
    for (int i = 0; i < params.points; ++i)
        times[static_cast<std::size_t>(i)] = params.gt_max * i / ((params.points - 1.0) * g);

    FigureData out;
    out.csv_name = std::string(spec.name) + ".csv";
    out.script_name = std::string(spec.name) + "_plot.py";

    switch (which) {
        case Figure::fig1: {
            const PureState s0 = named_state(StateFamily::psi_alpha, alpha);
            out.samples = sweep_closed(s0, CanonicalHamiltonian::flipflop(1.0, g), g, times);
            break;
        }
        case Figure::fig2: {
            const PureState s0 = named_state(StateFamily::phi_alpha, alpha);
            out.samples = sweep_closed(s0, CanonicalHamiltonian::flipflop(1.0, g), g, times);
            break;
        }
        case Figure::fig3:
            out.samples = sweep_open_analytic(OpenFamily::separable, 0.0, g, kappa, times);
            break;
        case Figure::fig4:
            out.samples = sweep_open_analytic(OpenFamily::entangled, alpha, g, kappa, times);
            break;
    }
    out.events = find_coincidences(out.samples);
    annotate_flags(out.samples, out.events);
    return out;
}

namespace {

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot %NAME%.csv (%TITLE%)."""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "%NAME%.csv"
rows = []
with open(path) as fh:
    for line in fh:
        if line.startswith("#"):
            continue
        rows.append(line)
reader = csv.DictReader(rows)
gt, qfi, coe_t, coe_v, conc = [], [], [], [], []
csld = [[], [], []]
csld_t = [[], [], []]
for rec in reader:
    x = float(rec["gt"])
    gt.append(x)
    qfi.append(float(rec["g2F"]))
    conc.append(float(rec["C"]))
    if rec["g2CoE"]:
        coe_t.append(x)
        coe_v.append(float(rec["g2CoE"]))
    for k in range(3):
        val = rec[f"C_SLD_{k + 1}"]
        if val:
            csld_t[k].append(x)
            csld[k].append(float(val))

fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
ax1.plot(gt, qfi, "b--", label="$g^2 F$")
ax1.plot(coe_t, coe_v, "r-", label="$g^2$CoE")
ax1.set_ylabel("QFI / CoE")
ax1.legend(loc="upper left")
ax2.plot(gt, conc, "g--", label="$C$")
styles = ["m-", "c-", "y-"]
for k in range(3):
    if csld[k]:
        ax2.plot(csld_t[k], csld[k], styles[k], label=f"$C_{{SLD}}^{{({k + 1})}}$")
ax2.set_xlabel("$gt$")
ax2.set_ylabel("concurrence")
ax2.legend(loc="upper right")
fig.suptitle("%TITLE%")
fig.tight_layout()
fig.savefig("%NAME%.png", dpi=160)
print("wrote %NAME%.png")
)PY";

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

} // namespace

std::vector<std::string> emit_figure(Figure which, const FigureParams& params,
                                     const std::string& out_dir,
                                     const std::string& header_comment) {
    const FigureSpec spec = figure_spec(which);
    FigureData data = figure_data(which, params);

    const std::string csv_path = out_dir + "/" + data.csv_name;
    std::ofstream csv(csv_path);
    if (!csv) throw LinalgError("emit_figure: cannot open " + csv_path);
    write_metrology_csv(csv, data.samples, header_comment);
    csv.close();

    const std::string script_path = out_dir + "/" + data.script_name;
    std::ofstream script(script_path);
    if (!script) throw LinalgError("emit_figure: cannot open " + script_path);
    std::string body = kPlotScript;
    body = replace_all(body, "%NAME%", spec.name);
    body = replace_all(body, "%TITLE%", spec.title);
    script << body;
    script.close();

    return {csv_path, script_path};
}

} // namespace coe

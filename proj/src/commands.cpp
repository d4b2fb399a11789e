#include "coneflow/commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "coneflow/analytic.hpp"
#include "coneflow/diagnostics.hpp"
#include "coneflow/errors.hpp"
#include "coneflow/field_io.hpp"
#include "coneflow/operators.hpp"
#include "coneflow/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace coneflow {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kMinOrder = 1.8;

InequalityReport verdict(std::string name, double alpha, int n, double lhs, double rhs, double tol = 0.0)
{
    return make_report(std::move(name), alpha, n, lhs, rhs, 0.0, tol);
}

// Passes when the error is at rounding level or the order is high enough.
InequalityReport order_verdict(const std::string& name, double alpha, int n, double e1, double e2, double h1,
                               double h2, double exact_level)
{
    if (e1 <= exact_level && e2 <= exact_level) {
        InequalityReport r = verdict(name, alpha, n, e2, exact_level);
        r.constant = 2.0;
        return r;
    }
    InequalityReport r = verdict(name, alpha, n, kMinOrder, observed_order(e1, e2, h1, h2));
    r.constant = 2.0;
    return r;
}

double interior_max(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    double m = 0.0;
    for (int j = 1; j + 1 < g.nphi(); ++j)
        for (int i = 1; i + 1 < g.nr(); ++i) m = std::max(m, std::abs(f(i, j)));
    return m;
}

struct SwirlErrors {
    double h, div, curl, slip, mom_rho, mom_phi, mom_theta;
};

SwirlErrors swirl_errors(const AnalyticConfig& c, int n)
{
    const GridPtr g = MeridianGrid::create(make_domain(c.alpha, c.m), n, n % 2 ? n : n + 1);
    const SwirlSolution s = stationary_swirl(g);
    const double scale = gradient_scale(s.v);
    const VectorField zero(g);
    const PressureGradient pg = pressure_gradient(s.v, zero);
    const ScalarGradient gp = grad_scalar(s.p);
    const VectorField lap = laplacian_divfree(s.v);
    const VectorField conv = convect_vector(s.v);
    const double ms = std::max(interior_max(gp.rho), interior_max(gp.phi));
    SwirlErrors e;
    e.h = g->h();
    e.div = linf(divergence(s.v)) / scale;
    e.curl = linf(curl(s.v)) / scale;
    e.slip = slip_residuals(s.v).max() / scale;
    e.mom_rho = interior_max(pg.b_rho - gp.rho) / ms;
    e.mom_phi = interior_max(pg.b_phi - gp.phi) / ms;
    e.mom_theta = interior_max(conv.theta - lap.theta) / ms;
    return e;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_residuals_csv(std::ostream& os, const std::vector<ResidualRecord>& rs)
{
    os << "t,momentum_rho,momentum_phi,momentum_theta,divergence,pressure_loop_defect,pressure_defect_limit,"
          "omega_theta\n";
    for (const ResidualRecord& r : rs)
        os << fmt(r.t) << ',' << fmt(r.momentum_rho) << ',' << fmt(r.momentum_phi) << ',' << fmt(r.momentum_theta)
           << ',' << fmt(r.divergence) << ',' << fmt(r.pressure_loop_defect) << ',' << fmt(r.pressure_defect_limit)
           << ',' << fmt(r.omega_theta) << '\n';
}

std::vector<ResidualRecord> read_residuals_csv(std::istream& is)
{
    std::vector<ResidualRecord> out;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
        if (v.size() != 8) throw ConfigError("residual table row has " + std::to_string(v.size()) + " columns");
        out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    return out;
}

json window_json(const WindowRecord& w)
{
    json x;
    x["t0"] = w.t0;
    x["t1"] = w.t1;
    x["steps"] = w.steps;
    x["iterations"] = w.iterations;
    x["halvings"] = w.halvings;
    x["diffs"] = w.diffs;
    x["ratios"] = w.ratios;
    return x;
}

std::string versions_compiler()
{
#ifdef __VERSION__
    return __VERSION__;
#else
    return "unknown";
#endif
}

void check_alphas(const std::vector<double>& a, const char* key)
{
    if (a.empty()) throw ConfigError(std::string(key) + " is empty");
}

}  // namespace

double observed_order(double e1, double e2, double h1, double h2)
{
    if (!(e1 > 0.0) || !(e2 > 0.0)) return 0.0;
    return std::log(e1 / e2) / std::log(h1 / h2);
}

std::string report_json(const InequalityReport& r)
{
    json j;
    j["name"] = r.name;
    j["alpha"] = r.alpha;
    j["N"] = r.n;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["constant"] = r.constant;
    j["slack"] = r.slack;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j.dump();
}

std::vector<InequalityReport> inequality_suite(const InequalityConfig& c)
{
    check_alphas(c.alphas, "inequalities.alphas");
    check_alphas(c.curl_grad_alphas, "inequalities.curl_grad_alphas");
    if (c.eigen_nodes < 65) throw PreconditionError("eigen_nodes must be at least 65 for the refinement study");
    std::vector<InequalityReport> out;
    std::mt19937_64 rng(c.seed);
    const int n = c.eigen_nodes;
    const double n2 = 10.0 / (static_cast<double>(n) * n);

    for (double alpha : c.alphas) {
        // Sharp constants against the closed forms, plus refinement (n/4, n/2, n).
        const int n_half = (n - 1) / 2 + 1, n_quarter = (n - 1) / 4 + 1;
        for (PoincareSubspace s : {PoincareSubspace::MeanZero, PoincareSubspace::Dirichlet}) {
            const bool dir = s == PoincareSubspace::Dirichlet;
            if (dir && alpha > kPi / 4.0 + 1e-15) continue;
            const double closed = dir ? poincare_const_B(alpha) : poincare_const_A(alpha);
            const double c1 = sharp_weighted_constant(alpha, s, n_quarter);
            const double c2 = sharp_weighted_constant(alpha, s, n_half);
            const double c3 = sharp_weighted_constant(alpha, s, n);
            InequalityReport r =
                make_report(dir ? "poincare_sharp_dirichlet" : "poincare_sharp_mean_zero", alpha, n, c3, closed, closed, n2);
            out.push_back(r);
            const double order = std::log2(std::abs(c1 - c2) / std::abs(c2 - c3));
            out.push_back(make_report(dir ? "poincare_sharp_dirichlet_order" : "poincare_sharp_mean_zero_order", alpha,
                                      n, kMinOrder, order, 2.0, 0.0));
        }

        const GridPtr g = MeridianGrid::create(make_domain(alpha, c.m), c.nr, c.nphi);
        // Hardy inequality on a random corpus and on the constant field.
        for (int k = 0; k < c.hardy_fields; ++k) out.push_back(hardy_check(random_smooth_scalar(g, rng), c.hardy_eps));
        InequalityReport one = hardy_check(ScalarField(g, 1.0), c.hardy_eps);
        one.name = "hardy_constant_field";
        out.push_back(one);

        // Slice-wise Poincare bounds for the near-extremal modes.
        const ScalarField odd = ScalarField::sample(g, [&](double rho, double phi) {
            return (1.0 + rho * rho) * std::sin(kPi * (phi - kHalfPi) / (2.0 * alpha));
        });
        out.push_back(poincare_field_check(odd, PoincareSubspace::MeanZero));
        if (alpha <= kPi / 4.0 + 1e-15) {
            const ScalarField even = ScalarField::sample(g, [&](double rho, double phi) {
                return (1.0 + rho) * std::cos(kPi * (phi - kHalfPi) / (2.0 * alpha));
            });
            out.push_back(poincare_field_check(even, PoincareSubspace::Dirichlet));
        }
        {
            // The first odd mode nearly attains the sharp mean-zero constant.
            const MeridianGrid& gr = *g;
            double num = 0.0, den = 0.0;
            const ScalarField dp = d_phi(odd);
            for (int j = 0; j < gr.nphi(); ++j) {
                const double w = gr.phi_trap()[j] * gr.sin_phi(j);
                num += w * odd(0, j) * odd(0, j);
                den += w * dp(0, j) * dp(0, j);
            }
            const double sharp = sharp_weighted_constant(alpha, PoincareSubspace::MeanZero, n);
            out.push_back(make_report("poincare_near_extremal", alpha, gr.nphi(), std::abs(num / den - sharp) / sharp,
                                      0.05, sharp, 0.0));
        }

        // Componentwise H1 norms against the full one.
        const double cst = h1_equivalence_constant(g->domain());
        double worst = 1.0;
        for (int k = 0; k < 20; ++k) {
            const VectorField v(random_smooth_scalar(g, rng), random_smooth_scalar(g, rng),
                                random_smooth_scalar(g, rng));
            const double r = h1_equivalence_ratio(v);
            worst = std::max({worst, r, 1.0 / r});
        }
        out.push_back(make_report("h1_equivalence", alpha, c.nr, worst, cst, cst, 0.0));
    }

    for (double alpha : c.curl_grad_alphas) {
        const GridPtr g = MeridianGrid::create(make_domain(alpha, c.m), c.curl_grad_nr, c.curl_grad_nphi);
        if (alpha > kPi / 6.0 + 1e-15) throw PreconditionError("curl-gradient bound needs alpha <= pi/6");
        for (int k = 0; k < c.curl_grad_fields; ++k) {
            const VectorField u = eoo_stream_field(g, random_eoo_params(rng));
            try {
                out.push_back(curl_grad_check(u));
            } catch (const HypothesisViolation& e) {
                InequalityReport r = make_report("curl_grad", alpha, c.curl_grad_nr, e.lhs, e.rhs, std::sqrt(3.0), 0.0);
                r.name = "curl_grad (" + e.hypothesis + " failed)";
                r.pass = false;
                out.push_back(r);
            }
        }
        // The swirl breaks the symmetry hypothesis and must be refused.
        const VectorField sw = stationary_swirl(g).v;
        InequalityReport r;
        try {
            curl_grad_check(sw);
            r = make_report("curl_grad_swirl_refused", alpha, c.curl_grad_nr, 0.0, 0.0, std::sqrt(3.0), 0.0);
            r.pass = false;
        } catch (const HypothesisViolation& e) {
            r = make_report("curl_grad_swirl_refused", alpha, c.curl_grad_nr, e.lhs, e.rhs, std::sqrt(3.0), 0.0);
            r.pass = e.hypothesis == "even-odd-odd symmetry" && e.lhs > e.rhs;
        }
        out.push_back(r);
    }
    return out;
}

std::vector<InequalityReport> analytic_suite(const AnalyticConfig& c)
{
    std::vector<InequalityReport> out;
    if (c.swirl_grids.size() < 2) throw ConfigError("analytic.swirl_grids needs at least two sizes");
    if (c.slab_nodes.size() < 2) throw ConfigError("analytic.slab_nodes needs at least two sizes");
    const CuspDomain cd = make_cusp_domain(c.beta, c.depth);
    if (c.energy && !(c.beta > 2.0)) throw PreconditionError("cusp energy check needs beta > 2");

    // Stationary swirl: every residual must shrink at second order.
    std::vector<SwirlErrors> se;
    for (int n : c.swirl_grids) se.push_back(swirl_errors(c, n));
    const SwirlErrors& a = se[se.size() - 2];
    const SwirlErrors& b = se.back();
    const int nf = c.swirl_grids.back();
    const double exact = 1e-12;
    out.push_back(order_verdict("swirl_divergence_order", c.alpha, nf, a.div, b.div, a.h, b.h, exact));
    out.push_back(order_verdict("swirl_curl_order", c.alpha, nf, a.curl, b.curl, a.h, b.h, exact));
    out.push_back(order_verdict("swirl_slip_order", c.alpha, nf, a.slip, b.slip, a.h, b.h, exact));
    out.push_back(order_verdict("swirl_momentum_rho_order", c.alpha, nf, a.mom_rho, b.mom_rho, a.h, b.h, exact));
    out.push_back(order_verdict("swirl_momentum_phi_order", c.alpha, nf, a.mom_phi, b.mom_phi, a.h, b.h, exact));
    out.push_back(order_verdict("swirl_momentum_theta_order", c.alpha, nf, a.mom_theta, b.mom_theta, a.h, b.h, exact));

    // Cusp solution: residual order per slab and time, exact values elsewhere.
    const EtaProfile eta;
    const int n1 = c.slab_nodes[c.slab_nodes.size() - 2], n2 = c.slab_nodes.back();
    for (double t : c.times)
        for (int j = 1; j <= cd.depth; ++j) {
            const SlabResidual r1 = cusp_slab_residual(cd, j, t, n1, eta);
            const SlabResidual r2 = cusp_slab_residual(cd, j, t, n2, eta);
            InequalityReport sw = order_verdict("cusp_swirl_residual_order", t, j, r1.swirl, r2.swirl, r1.h, r2.h, exact);
            InequalityReport ra =
                order_verdict("cusp_radial_residual_order", t, j, r1.radial, r2.radial, r1.h, r2.h, exact);
            out.push_back(sw);
            out.push_back(ra);
        }
    for (int j = 1; j <= cd.depth; ++j) {
        const SlabResidual r = cusp_slab_residual(cd, j, 2.5, n1, eta);
        InequalityReport rep = make_report("cusp_sup_on_slab", 2.5, j, r.v_max, std::ldexp(1.0, j), 0.0, 0.0);
        rep.pass = r.v_max == std::ldexp(1.0, j);
        out.push_back(rep);
    }
    {
        const CuspFields f = cusp_blowup(0.5, 0.75, eta);
        InequalityReport rep = make_report("cusp_quiet_before_ramp", 0.75, 0, std::abs(f.v_theta) + std::abs(f.forcing),
                                           0.0, 0.0, 0.0);
        out.push_back(rep);
    }

    if (c.energy) {
        const CuspEnergy e = cusp_energy(cd, 3.0, c.energy_nodes, eta);
        double worst_closed = 0.0;
        bool monotone = true;
        for (std::size_t k = 0; k < e.slab_energy.size(); ++k) {
            worst_closed = std::max(worst_closed, std::abs(e.slab_energy[k] - e.energy_closed[k]) / e.energy_closed[k]);
            worst_closed = std::max(worst_closed, std::abs(e.slab_dissipation[k] - e.dissipation_closed[k]) /
                                                      e.dissipation_closed[k]);
            if (k > 0 && !(e.energy_partial[k] > e.energy_partial[k - 1])) monotone = false;
        }
        out.push_back(make_report("cusp_energy_bounded", c.beta, cd.depth, e.energy_partial.back(), e.energy_bound,
                                  e.energy_bound, 0.0));
        InequalityReport mono = make_report("cusp_energy_monotone", c.beta, cd.depth, 0.0, 0.0, 0.0, 0.0);
        mono.pass = monotone;
        out.push_back(mono);
        out.push_back(make_report("cusp_energy_closed_form", c.beta, c.energy_nodes, worst_closed,
                                  10.0 / (static_cast<double>(c.energy_nodes) * c.energy_nodes), 0.0, 0.0));
        const double limit = std::pow(2.0, -(c.beta - 2.0));
        double we = 0.0, wd = 0.0;
        for (double r : e.energy_ratio) we = std::max(we, r);
        for (double r : e.dissipation_ratio) wd = std::max(wd, r);
        out.push_back(make_report("cusp_energy_cauchy_ratio", c.beta, cd.depth, we, limit, limit, 1e-9 * limit));
        out.push_back(make_report("cusp_dissipation_cauchy_ratio", c.beta, cd.depth, wd, limit, limit, 1e-9 * limit));
    }
    return out;
}

namespace {

int emit(const std::vector<InequalityReport>& reports, const fs::path& file, std::ostream& log, const char* what)
{
    fs::create_directories(file.parent_path());
    std::ostringstream os;
    int failed = 0;
    for (const InequalityReport& r : reports) {
        os << report_json(r) << '\n';
        if (!r.pass) {
            ++failed;
            log << "FAIL " << r.name << " alpha=" << r.alpha << " N=" << r.n << " lhs=" << r.lhs << " rhs=" << r.rhs
                << '\n';
        }
    }
    write_text(file, os.str());
    log << what << ": " << reports.size() - failed << "/" << reports.size() << " checks pass; report " << file.string()
        << '\n';
    return failed ? kExitCheckFailed : kExitOk;
}

template <class Fn>
int guarded(std::ostream& log, Fn fn)
{
    try {
        return fn();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        log << "precondition error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        log << "convergence failure: " << e.what() << "\nratio history:";
        for (double r : e.ratio_history) log << ' ' << r;
        log << '\n';
        return kExitCheckFailed;
    } catch (const SolverError& e) {
        log << "solver failure: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::invalid_argument& e) {
        log << "precondition error: " << e.what() << '\n';
        return kExitUsage;
    }
}

Trajectory load_trajectory(const AppConfig& cfg, const fs::path& dir)
{
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw ConfigError("no manifest in '" + dir.string() + "'; run solve first");
    const nlohmann::json m = nlohmann::json::parse(mf, nullptr, false);
    if (m.is_discarded()) throw ConfigError("manifest is not valid JSON");
    Trajectory tr;
    const auto& meta = m.at("trajectory");
    tr.h = meta.at("h").get<double>();
    tr.dt = meta.at("dt").get<double>();
    tr.theta = meta.at("theta").get<double>();
    tr.gamma0_max = meta.at("gamma0_max").get<double>();
    tr.initial_eoo = meta.at("initial_eoo").get<bool>();
    for (const auto& w : m.at("windows")) {
        WindowRecord r;
        r.t0 = w.at("t0").get<double>();
        r.t1 = w.at("t1").get<double>();
        r.steps = w.at("steps").get<int>();
        r.iterations = w.at("iterations").get<int>();
        r.halvings = w.at("halvings").get<int>();
        r.diffs = w.at("diffs").get<std::vector<double>>();
        r.ratios = w.at("ratios").get<std::vector<double>>();
        tr.windows.push_back(r);
    }
    {
        std::ifstream in(dir / "steps.csv");
        if (!in) throw ConfigError("missing steps.csv");
        tr.steps = read_steps_csv(in);
    }
    {
        std::ifstream in(dir / "residuals.csv");
        if (in) tr.residuals = read_residuals_csv(in);
    }
    const GridPtr g = make_grid(cfg.sim);
    for (const auto& s : m.at("snapshots")) {
        Snapshot snap;
        snap.step = s.at("step").get<int>();
        const VectorField v = read_vector_csv((dir / s.at("velocity").get<std::string>()).string(), g);
        snap.state.t = s.at("t").get<double>();
        snap.state.b = v.meridional();
        snap.state.gamma = ScalarField(g);
        for (int j = 0; j < g->nphi(); ++j)
            for (int i = 0; i < g->nr(); ++i) snap.state.gamma(i, j) = g->rho(i) * g->sin_phi(j) * v.theta(i, j);
        snap.state.omega_t = read_scalar_csv((dir / s.at("omega").get<std::string>()).string(), g);
        tr.snapshots.push_back(std::move(snap));
    }
    return tr;
}

}  // namespace

int cmd_verify_inequalities(const std::string& config_path, std::ostream& log)
{
    return guarded(log, [&] {
        const AppConfig cfg = load_config(config_path);
        const auto reports = inequality_suite(cfg.ineq);
        return emit(reports, fs::path(cfg.output_dir) / "inequalities.jsonl", log, "verify-inequalities");
    });
}

int cmd_analytic(const std::string& config_path, std::ostream& log)
{
    return guarded(log, [&] {
        const AppConfig cfg = load_config(config_path);
        const auto reports = analytic_suite(cfg.analytic);
        return emit(reports, fs::path(cfg.output_dir) / "analytic.jsonl", log, "analytic-tests");
    });
}

int cmd_solve(const std::string& config_path, std::ostream& log)
{
    return guarded(log, [&] {
        const auto start = std::chrono::steady_clock::now();
        const AppConfig cfg = load_config(config_path);
        cfg.sim.validate();
        const GridPtr g = make_grid(cfg.sim);
        const VectorField v0 = initial_velocity(cfg.sim, g);
        const AdmissibilityReport adm = admissibility_check(v0);
        log << "initial data: div " << adm.div_rel << ", slip " << adm.slip.max() << ", eoo " << adm.eoo_rel
            << ", sup|Gamma_0| " << adm.gamma_max << (adm.below_95 ? "" : " (above 1/95)") << '\n';

        const Trajectory tr = march(cfg.sim, v0);
        const auto solved = std::chrono::steady_clock::now();
        const DiagnosticsReport rep = run_diagnostics(tr, cfg.diag);

        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir / "snapshots");
        json files = json::array();
        auto add_file = [&](const std::string& rel, const char* kind) {
            json f;
            f["path"] = rel;
            f["kind"] = kind;
            files.push_back(f);
        };
        json snaps = json::array();
        for (const Snapshot& s : tr.snapshots) {
            char vname[64], oname[64];
            std::snprintf(vname, sizeof vname, "snapshots/v_%06d.csv", s.step);
            std::snprintf(oname, sizeof oname, "snapshots/omega_%06d.csv", s.step);
            write_csv((dir / vname).string(), s.state.velocity());
            write_csv((dir / oname).string(), s.state.omega_t);
            json x;
            x["step"] = s.step;
            x["t"] = s.state.t;
            x["velocity"] = vname;
            x["omega"] = oname;
            snaps.push_back(x);
            add_file(vname, "snapshot_velocity");
            add_file(oname, "snapshot_omega");
        }
        {
            std::ostringstream os;
            write_steps_csv(os, tr);
            write_text(dir / "steps.csv", os.str());
            add_file("steps.csv", "time_series");
        }
        {
            std::ostringstream os;
            write_report_jsonl(os, tr);
            write_text(dir / "report.jsonl", os.str());
            add_file("report.jsonl", "report");
        }
        {
            std::ostringstream os;
            write_residuals_csv(os, tr.residuals);
            write_text(dir / "residuals.csv", os.str());
            add_file("residuals.csv", "residuals");
        }
        write_text(dir / "summary.json", summary_json(rep, tr) + "\n");
        add_file("summary.json", "summary");

        json man;
        json echo;
        for (const auto& [k, v] : config_echo(cfg)) echo[k] = v;
        man["config"] = echo;
        man["output_dir"] = cfg.output_dir;
        json versions;
        versions["coneflow"] = kVersion;
        versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);
        versions["compiler"] = versions_compiler();
        man["versions"] = versions;
        json meta;
        meta["h"] = tr.h;
        meta["dt"] = tr.dt;
        meta["theta"] = tr.theta;
        meta["gamma0_max"] = tr.gamma0_max;
        meta["initial_eoo"] = tr.initial_eoo;
        man["trajectory"] = meta;
        json wins = json::array();
        for (const WindowRecord& w : tr.windows) wins.push_back(window_json(w));
        man["windows"] = wins;
        man["snapshots"] = snaps;
        add_file("manifest.json", "manifest");
        add_file("timing.json", "timing");
        man["files"] = files;
        write_text(dir / "manifest.json", man.dump(2) + "\n");

        // Wall times live apart from the manifest so every other output is reproducible.
        const auto done = std::chrono::steady_clock::now();
        json timing;
        timing["solve_seconds"] = std::chrono::duration<double>(solved - start).count();
        timing["total_seconds"] = std::chrono::duration<double>(done - start).count();
        write_text(dir / "timing.json", timing.dump(2) + "\n");

        for (const AuditResult& a : rep.audits)
            log << "  " << a.name << ": " << status_name(a.status) << (a.gating ? "" : " (informational)") << '\n';
        for (const std::string& w : rep.warnings) log << "warning: " << w << '\n';
        log << "solve: " << tr.steps.size() - 1 << " steps in " << tr.windows.size() << " windows; "
            << (rep.passed() ? "all audits pass" : "audit failure") << '\n';
        return rep.passed() ? kExitOk : kExitCheckFailed;
    });
}

int cmd_diagnose(const std::string& config_path, std::ostream& log)
{
    return guarded(log, [&] {
        const AppConfig cfg = load_config(config_path);
        const fs::path dir(cfg.output_dir);
        const Trajectory tr = load_trajectory(cfg, dir);
        const DiagnosticsReport rep = run_diagnostics(tr, cfg.diag);
        write_text(dir / "diagnose_summary.json", summary_json(rep, tr) + "\n");
        for (const AuditResult& a : rep.audits)
            log << "  " << a.name << ": " << status_name(a.status) << (a.gating ? "" : " (informational)") << '\n';
        log << "diagnose: " << (rep.passed() ? "all audits pass" : "audit failure") << '\n';
        return rep.passed() ? kExitOk : kExitCheckFailed;
    });
}

}  // namespace coneflow

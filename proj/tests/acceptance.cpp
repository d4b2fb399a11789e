// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "coneflow/analytic.hpp"
#include "coneflow/commands.hpp"
#include "coneflow/diagnostics.hpp"
#include "coneflow/elliptic.hpp"
#include "coneflow/inequalities.hpp"
#include "coneflow/operators.hpp"
#include "coneflow/solver.hpp"

using namespace coneflow;
namespace fs = std::filesystem;

namespace {

constexpr double kMinOrder = 1.9;           // operator refinement studies
constexpr double kMinOrderSolve = 1.8;      // elliptic recovery
constexpr double kPoincareTol = 10.0;       // x N^-2
constexpr double kCurlGradC = 1.0;          // slack >= -c h ||grad u||

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f s of %.0f s", s, budget_s);
    o.require(s <= budget_s, "over time budget");
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name, buf, o.detail.empty() ? "" : " - ",
                o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

GridPtr grid(int n, double alpha = kPi / 6.0) { return MeridianGrid::create(make_domain(alpha, 2), n, n); }

double max_err(const ScalarField& f, const std::function<double(double, double)>& exact, int ring = 0)
{
    const MeridianGrid& g = f.grid();
    double e = 0.0;
    for (int j = ring; j + ring < g.nphi(); ++j)
        for (int i = ring; i + ring < g.nr(); ++i) e = std::max(e, std::abs(f(i, j) - exact(g.rho(i), g.phi(j))));
    return e;
}

double max_err(const VectorField& v, const std::function<Vec3(double, double)>& exact)
{
    double e = 0.0;
    for (int c = 0; c < 3; ++c)
        e = std::max(e, max_err(v[c], [&](double r, double p) { return exact(r, p)[c]; }));
    return e;
}

// Cartesian (xz, yz, -z^2) + (-yz, xz, 0): divergence-free with swirl.
Vec3 divfree_v(double r, double p)
{
    const double s = std::sin(p), c = std::cos(p);
    return {r * r * c * (s * s - c * c), 2.0 * r * r * s * c * c, r * r * s * c};
}

// Cartesian (xz, yz, x^2 + y^2) + swirl: divergence 2z, Laplacian 4 e_z.
Vec3 general_v(double r, double p)
{
    const double s = std::sin(p), c = std::cos(p);
    return {2.0 * r * r * s * s * c, r * r * s * (c * c - s * s), r * r * s * c};
}

// ---- criterion 1
Outcome poincare()
{
    Outcome o;
    struct Case {
        double alpha;
        PoincareSubspace s;
        double bound;
        const char* label;
    };
    const Case cases[] = {{kPi / 6.0, PoincareSubspace::Dirichlet, 3.0 / 25.0, "dirichlet pi/6"},
                          {kPi / 6.0, PoincareSubspace::MeanZero, 2.0 / 19.0, "mean-zero pi/6"},
                          {kPi / 4.0, PoincareSubspace::Dirichlet, 1.0 / 3.0, "dirichlet pi/4"},
                          {kPi / 4.0, PoincareSubspace::MeanZero, 2.0 / 9.0, "mean-zero pi/4"}};
    const int n = 257;
    for (const Case& c : cases) {
        const double c1 = sharp_weighted_constant(c.alpha, c.s, 65);
        const double c2 = sharp_weighted_constant(c.alpha, c.s, 129);
        const double c3 = sharp_weighted_constant(c.alpha, c.s, n);
        const double order = std::log2(std::abs(c1 - c2) / std::abs(c2 - c3));
        o.require(c3 <= c.bound + kPoincareTol / (n * n), std::string(c.label) + fmt(" constant %.6g above bound %.6g", c3, c.bound));
        o.require(order >= kMinOrder, std::string(c.label) + fmt(" order %.3f", order));
        o.detail += (o.detail.empty() ? "" : ", ") + std::string(c.label) + fmt(" %.5f order %.2f", c3, order);
    }
    return o;
}

// ---- criterion 2
Outcome hardy()
{
    Outcome o;
    const GridPtr g = grid(33);
    std::mt19937_64 rng(20240601ULL);
    int bad = 0;
    double worst = 1e300;
    for (int k = 0; k < 1000; ++k) {
        const InequalityReport r = hardy_check(random_smooth_scalar(g, rng), 1.0);
        if (!r.pass) ++bad;
        worst = std::min(worst, r.slack / r.rhs);
    }
    o.require(bad == 0, std::to_string(bad) + " random fields fail");
    const InequalityReport one = hardy_check(ScalarField(g, 1.0), 1.0);
    const double lhs_exact = kPi, rhs_exact = 56.0 * (2.0 * kPi / 3.0) * (7.0 / 8.0);
    o.require(one.pass, "constant field fails");
    o.require(std::abs(one.lhs - lhs_exact) < 1e-2 * lhs_exact, fmt("constant-field lhs %.6g vs pi", one.lhs));
    o.require(std::abs(one.rhs - rhs_exact) < 1e-2 * rhs_exact, fmt("constant-field rhs %.6g vs %.6g", one.rhs, rhs_exact));
    o.detail = fmt("1000 fields, min relative slack %.3g; f = 1: lhs/pi %.5f", worst, one.lhs / kPi) +
               fmt(", rhs/pi %.4f", one.rhs / kPi) + o.detail;
    return o;
}

// ---- criterion 3
Outcome curl_grad()
{
    Outcome o;
    const GridPtr g = grid(257);
    std::mt19937_64 rng(20240601ULL);
    const CurlGradOptions opt{kCurlGradC, 1.0};
    int bad = 0, refused = 0;
    double worst = 1e300;
    for (int k = 0; k < 100; ++k) {
        try {
            const InequalityReport r = curl_grad_check(eoo_stream_field(g, random_eoo_params(rng)), opt);
            if (!r.pass) ++bad;
            worst = std::min(worst, r.slack / r.lhs);
        } catch (const HypothesisViolation&) {
            ++refused;
        }
    }
    o.require(bad == 0, std::to_string(bad) + " fields violate the bound");
    o.require(refused == 0, std::to_string(refused) + " fields refused");
    bool swirl_refused = false;
    try {
        curl_grad_check(stationary_swirl(grid(65)).v, opt);
    } catch (const HypothesisViolation& e) {
        swirl_refused = e.hypothesis == "even-odd-odd symmetry";
    }
    o.require(swirl_refused, "stationary swirl not refused for symmetry");
    o.detail = fmt("100 fields at n = 257, min relative slack %.3g", worst) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---- criterion 4
Outcome operator_suite()
{
    Outcome o;
    using Err = std::function<double(const GridPtr&)>;
    const std::vector<std::pair<const char*, Err>> ops = {
        {"grad",
         [](const GridPtr& g) {
             const ScalarGradient gr =
                 grad_scalar(ScalarField::sample(g, [](double r, double p) { return r * r * r * std::sin(3.0 * p); }));
             return std::max(max_err(gr.rho, [](double r, double p) { return 3.0 * r * r * std::sin(3.0 * p); }),
                             max_err(gr.phi, [](double r, double p) { return 3.0 * r * r * std::cos(3.0 * p); }));
         }},
        {"divergence",
         [](const GridPtr& g) {
             return max_err(divergence(VectorField::sample(g, general_v)),
                            [](double r, double p) { return 2.0 * r * std::cos(p); });
         }},
        {"curl",
         [](const GridPtr& g) {
             return max_err(curl(VectorField::sample(g, divfree_v)), [](double r, double p) {
                 const double s = std::sin(p), c = std::cos(p);
                 return Vec3{r * (2.0 * c * c - s * s), -3.0 * r * s * c, r * s};
             });
         }},
        {"scalar laplacian",
         [](const GridPtr& g) {
             const ScalarField f = ScalarField::sample(g, [](double r, double p) {
                 const double c = std::cos(p);
                 return r * r * r * c * c * c;
             });
             return max_err(laplacian_scalar(f), [](double r, double p) { return 6.0 * r * std::cos(p); });
         }},
        {"vector laplacian",
         [](const GridPtr& g) {
             return max_err(laplacian_vector(VectorField::sample(g, general_v)), [](double, double p) {
                 return Vec3{4.0 * std::cos(p), -4.0 * std::sin(p), 0.0};
             });
         }},
        {"divergence-free laplacian",
         [](const GridPtr& g) {
             return max_err(laplacian_divfree(VectorField::sample(g, divfree_v)), [](double, double p) {
                 return Vec3{-2.0 * std::cos(p), 2.0 * std::sin(p), 0.0};
             });
         }},
        {"scalar convection",
         [](const GridPtr& g) {
             const VectorField b = VectorField::sample(g, divfree_v).meridional();
             const ScalarField f = ScalarField::sample(g, [](double r, double p) {
                 const double c = std::cos(p);
                 return r * r * r * c * c * c;
             });
             return max_err(convect(b, f), [](double r, double p) {
                 const double c = std::cos(p);
                 return -3.0 * r * r * r * r * c * c * c * c;
             });
         }},
        {"vector convection",
         [](const GridPtr& g) {
             return max_err(convect_vector(VectorField::sample(g, divfree_v)), [](double r, double p) {
                 const double s = std::sin(p), c = std::cos(p), r3 = r * r * r;
                 return Vec3{r3 * (2.0 * c * c * c * c - s * s * c * c), -3.0 * r3 * s * c * c * c, r3 * s * c * c};
             });
         }},
    };
    const int ns[] = {33, 65, 129};
    for (const auto& [name, err] : ops) {
        double e[3];
        for (int k = 0; k < 3; ++k) e[k] = err(grid(ns[k]));
        const double o1 = std::log2(e[0] / e[1]), o2 = std::log2(e[1] / e[2]);
        o.require(std::min(o1, o2) >= kMinOrder, std::string(name) + fmt(" orders %.3f, %.3f", o1, o2));
        o.detail += (o.detail.empty() ? "" : ", ") + std::string(name) + fmt(" %.2f", std::min(o1, o2));
    }
    return o;
}

// ---- criterion 5
// Stokes stream function Psi = f(rho) sin^3(k x), x = phi - pi/2, k = pi/alpha,
// f = rho^4 (rho - 1/2)^3 (rho - 1)^3. The flow is b = (Psi_phi / (rho^2 s), -Psi_rho / (rho s))
// and the rescaled vorticity is -E^2 Psi / (rho s)^2.
struct Poly {
    std::vector<double> c;  // ascending powers
    Poly operator*(const Poly& o) const
    {
        Poly r{std::vector<double>(c.size() + o.c.size() - 1, 0.0)};
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
        return r;
    }
    Poly d() const
    {
        Poly r{std::vector<double>(std::max<std::size_t>(c.size(), 2) - 1, 0.0)};
        for (std::size_t i = 1; i < c.size(); ++i) r.c[i - 1] = i * c[i];
        return r;
    }
    double operator()(double x) const
    {
        double s = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
        return s;
    }
};

Outcome biot_savart()
{
    Outcome o;
    const double alpha = kPi / 6.0, k = kPi / alpha;
    const Poly u{{-0.5, 1.0}}, q{{-1.0, 1.0}}, r4{{0.0, 0.0, 0.0, 0.0, 1.0}};
    const Poly f = r4 * u * u * u * q * q * q, f1 = f.d(), f2 = f1.d();
    auto G = [&](double p) { return std::pow(std::sin(k * (p - kHalfPi)), 3); };
    auto G1 = [&](double p) {
        const double a = std::sin(k * (p - kHalfPi)), b = std::cos(k * (p - kHalfPi));
        return 3.0 * k * a * a * b;
    };
    auto G2 = [&](double p) {
        const double a = std::sin(k * (p - kHalfPi)), b = std::cos(k * (p - kHalfPi));
        return 3.0 * k * k * a * (2.0 * b * b - a * a);
    };
    auto exact_b = [&](double r, double p) {
        const double s = std::sin(p);
        return Vec3{f(r) * G1(p) / (r * r * s), -f1(r) * G(p) / (r * s), 0.0};
    };
    double err[3], hm[3], mean[3];
    const int ns[] = {33, 65, 129};
    for (int m = 0; m < 3; ++m) {
        const GridPtr g = grid(ns[m], alpha);
        ScalarField om = ScalarField::sample(g, [&](double r, double p) {
            const double s = std::sin(p), cot = std::cos(p) / s;
            const double e2 = f2(r) * G(p) + f(r) / (r * r) * (G2(p) - cot * G1(p));
            return -e2 / (r * r * s * s);
        });
        for (int i = 0; i < g->nr(); ++i) om(i, 0) = om(i, g->nphi() - 1) = 0.0;
        for (int j = 0; j < g->nphi(); ++j) om(0, j) = om(g->nr() - 1, j) = 0.0;
        const AssembledVelocity av = assemble_b(om);
        err[m] = max_err(av.b, exact_b);
        hm[m] = av.audit.h_max;
        mean[m] = av.audit.mean_max;
    }
    const double oe = std::log2(err[1] / err[2]), oh = std::log2(hm[1] / hm[2]);
    o.require(oe >= kMinOrderSolve, fmt("velocity error order %.3f", oe));
    o.require(oh >= kMinOrderSolve, fmt("rho^2 div b order %.3f", oh));
    const double worst_mean = *std::max_element(std::begin(mean), std::end(mean));
    o.require(worst_mean <= 1e-10, fmt("per-radius mean %.3g", worst_mean));
    o.detail = fmt("velocity order %.2f, rho^2 div b order %.2f", oe, oh) + fmt(", max per-radius mean %.2g", worst_mean) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---- criterion 6
Outcome exact_solutions()
{
    Outcome o;
    AnalyticConfig c;
    c.beta = 3.0;
    const std::vector<InequalityReport> reps = analytic_suite(c);
    int bad = 0;
    for (const InequalityReport& r : reps)
        if (!r.pass) {
            ++bad;
            o.require(false, r.name + fmt(" slack %.3g", r.slack));
        }
    const CuspEnergy e = cusp_energy(make_cusp_domain(3.0, c.depth), 3.0, 257);
    o.require(e.energy_partial.back() <= 16.0 * kPi / 3.0, "energy partial sum above 16 pi / 3");
    for (double r : e.energy_ratio) o.require(r <= 0.5, fmt("energy Cauchy ratio %.4g", r));
    for (int j = 1; j <= c.depth; ++j) {
        const double v = cusp_slab_residual(make_cusp_domain(3.0, c.depth), j, 2.5, 17).v_max;
        o.require(v == std::ldexp(1.0, j), fmt("sup|v| on slab %.0f is %.17g", j, v));
    }
    o.detail = std::to_string(reps.size() - bad) + "/" + std::to_string(reps.size()) + " exact-solution checks" +
               fmt(", energy sum %.4f of bound %.4f", e.energy_partial.back(), 16.0 * kPi / 3.0) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---- criterion 7
Outcome regression()
{
    Outcome o;
    SimulationConfig c;
    c.nr = c.nphi = 129;
    c.t_final = 0.5;
    c.dt = 1e-3;
    c.gamma_target = 1.0 / 200.0;
    c.snapshot_every = 50;
    const Trajectory tr = march(c);
    o.require(std::abs(tr.gamma0_max - 1.0 / 200.0) < 1e-12, fmt("sup|Gamma_0| = %.6g", tr.gamma0_max));
    const DiagnosticsReport r = run_diagnostics(tr);
    for (const char* name :
         {"picard_contraction", "energy_identity", "energy_inequality", "gamma_max", "kfo_energy", "eoo_symmetry"}) {
        const auto it = std::find_if(r.audits.begin(), r.audits.end(), [&](const AuditResult& a) { return a.name == name; });
        if (it == r.audits.end()) {
            o.require(false, std::string(name) + " missing");
            continue;
        }
        o.require(it->status == AuditStatus::Pass, std::string(name) + " " + status_name(it->status) +
                                                       fmt(" worst slack %.3g", it->worst_slack()));
        o.detail += (o.detail.empty() ? "" : ", ") + std::string(name) + fmt(" %.2g", it->worst_slack());
    }
    double worst_ratio = 0.0;
    for (const WindowRecord& w : tr.windows)
        for (double x : w.ratios) worst_ratio = std::max(worst_ratio, x);
    o.require(r.passed(), "a gating audit fails");
    o.detail += fmt("; %.0f windows, worst contraction %.3g", static_cast<double>(tr.windows.size()), worst_ratio);
    return o;
}

// ---- criterion 8
std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& work)
{
    Outcome o;
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path out = work / "run", first = work / "first";
    const fs::path cfg = work / "det.ini";
    std::ofstream(cfg) << "[output]\ndir = " << out.string()
                       << "\n[grid]\nnr = 33\nnphi = 33\n[time]\nt_final = 0.05\nwindow = 0.025\n[run]\nsnapshot_every = 10\n";
    const std::string cmd = std::string(CONEFLOW_CLI) + " solve " + cfg.string() + " > /dev/null 2>&1";
    auto run = [&]() {
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    o.require(run() == 0, "first solve failed");
    fs::rename(out, first);
    o.require(run() == 0, "second solve failed");
    int files = 0, diff = 0;
    for (const auto& e : fs::recursive_directory_iterator(first)) {
        if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
        const fs::path rel = fs::relative(e.path(), first);
        ++files;
        if (!fs::exists(out / rel) || slurp(e.path()) != slurp(out / rel)) {
            ++diff;
            o.require(false, rel.string() + " differs");
        }
    }
    int second = 0;
    for (const auto& e : fs::recursive_directory_iterator(out))
        if (e.is_regular_file() && e.path().filename() != "timing.json") ++second;
    o.require(second == files, "file sets differ");
    o.require(files > 0, "no output files");
    o.detail = std::to_string(files - diff) + "/" + std::to_string(files) + " files identical" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "coneflow_acceptance";
    criterion(1, "weighted Poincare constants", 10.0, poincare);
    criterion(2, "Hardy inequality", 30.0, hardy);
    criterion(3, "curl versus gradient", 60.0, curl_grad);
    criterion(4, "spherical operator suite", 60.0, operator_suite);
    criterion(5, "Biot-Savart recovery", 60.0, biot_savart);
    criterion(6, "exact solutions", 30.0, exact_solutions);
    criterion(7, "simulation regression", 900.0, regression);
    criterion(8, "determinism", 300.0, [&] { return determinism(work); });
    std::printf("%d of 8 criteria pass\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}

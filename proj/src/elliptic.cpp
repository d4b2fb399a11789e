#include "coneflow/elliptic.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

#include "coneflow/errors.hpp"
#include "coneflow/operators.hpp"

namespace coneflow {

namespace {

double eval(const Coef& f, double dflt, double r, double p) { return f ? f(r, p) : dflt; }

struct Closure {
    bool boundary;       // node on this direction's edge
    bool robin;          // derivative = value * u
    double value;        // Neumann data or Robin coefficient
    double sign;         // outward normal = sign * coordinate direction
};

Closure closure_for(const EdgeBc& bc, int k, double sign)
{
    return {true, bc.kind == BcKind::Robin, bc.at(k), sign};
}

}  // namespace

DiscreteOperator assemble(const EllipticProblem& p)
{
    const MeridianGrid& g = *p.grid;
    const int nr = g.nr(), np = g.nphi();
    const std::size_t n = g.size();
    const double hr = g.hr(), hp = g.hphi();

    DiscreteOperator op;
    op.s = Eigen::VectorXd::Zero(n);
    op.fixed.assign(n, 0);
    op.fixed_value = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);

    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < nr; ++i) {
            const std::size_t k = g.idx(i, j);
            const double r = g.rho(i), ph = g.phi(j);
            const EdgeBc* rho_bc = i == 0 ? &p.a1 : (i == nr - 1 ? &p.a2 : nullptr);
            const EdgeBc* phi_bc = j == 0 ? &p.r1 : (j == np - 1 ? &p.r2 : nullptr);
            if (rho_bc && rho_bc->kind == BcKind::Dirichlet) {
                op.fixed[k] = 1;
                op.fixed_value[k] = rho_bc->at(j);
                trip.emplace_back(k, k, 0.0);
                continue;
            }
            if (phi_bc && phi_bc->kind == BcKind::Dirichlet) {
                op.fixed[k] = 1;
                op.fixed_value[k] = phi_bc->at(i);
                trip.emplace_back(k, k, 0.0);
                continue;
            }
            double diag = eval(p.c, 0.0, r, ph);

            // One direction of the stencil. lo/hi are neighbour indices, x the
            // node coordinate, h the spacing, pf the flux coefficient.
            auto direction = [&](double a, double b, double h, std::size_t lo, std::size_t hi, auto pf, double x,
                                 const Closure& cl, bool at_lo) {
                if (!cl.boundary) {
                    const double pp = pf(x + 0.5 * h), pm = pf(x - 0.5 * h);
                    trip.emplace_back(k, hi, a * pp / (h * h) + b / (2.0 * h));
                    trip.emplace_back(k, lo, a * pm / (h * h) - b / (2.0 * h));
                    diag -= a * (pp + pm) / (h * h);
                    return;
                }
                // Known normal derivative du/dx = sign * (g or c u) at the edge.
                const double px = pf(x);
                const double dcoef = cl.sign * cl.value;  // du/dx = dcoef (Neumann) or dcoef * u (Robin)
                if (at_lo) {
                    const double pin = pf(x + 0.5 * h);
                    trip.emplace_back(k, hi, a * pin / (h * h) * 2.0);
                    diag -= a * pin / (h * h) * 2.0;
                    // -p_x du/dx / (h/2) + b du/dx
                    const double t = -a * px * 2.0 / h + b;
                    if (cl.robin) diag += t * dcoef; else op.s[k] += t * dcoef;
                } else {
                    const double pin = pf(x - 0.5 * h);
                    trip.emplace_back(k, lo, a * pin / (h * h) * 2.0);
                    diag -= a * pin / (h * h) * 2.0;
                    const double t = a * px * 2.0 / h + b;
                    if (cl.robin) diag += t * dcoef; else op.s[k] += t * dcoef;
                }
            };

            const double ar = eval(p.a_r, 1.0, r, ph), br = eval(p.b_r, 0.0, r, ph);
            auto pr = [&](double x) { return eval(p.p_r, 1.0, x, ph); };
            const Closure crho = rho_bc ? closure_for(*rho_bc, j, i == 0 ? -1.0 : 1.0) : Closure{false, false, 0.0, 0.0};
            direction(ar, br, hr, i > 0 ? g.idx(i - 1, j) : k, i < nr - 1 ? g.idx(i + 1, j) : k, pr, r, crho, i == 0);

            const double ap = eval(p.a_p, 1.0, r, ph), bp = eval(p.b_p, 0.0, r, ph);
            auto pp = [&](double x) { return eval(p.p_p, 1.0, r, x); };
            const Closure cphi = phi_bc ? closure_for(*phi_bc, i, j == 0 ? -1.0 : 1.0) : Closure{false, false, 0.0, 0.0};
            direction(ap, bp, hp, j > 0 ? g.idx(i, j - 1) : k, j < np - 1 ? g.idx(i, j + 1) : k, pp, ph, cphi, j == 0);

            trip.emplace_back(k, k, diag);
        }
    }
    op.a.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    op.a.setFromTriplets(trip.begin(), trip.end());
    op.a.makeCompressed();
    return op;
}

EllipticSolver::EllipticSolver(const EllipticProblem& p, double tol) : grid_(p.grid), op_(assemble(p)), tol_(tol)
{
    const std::size_t n = grid_->size();
    bool anchored = false;
    for (std::size_t k = 0; k < n && !anchored; ++k) anchored = op_.fixed[k] != 0;
    if (!anchored) {
        for (const EdgeBc* e : {&p.r1, &p.r2, &p.a1, &p.a2})
            if (e->kind == BcKind::Robin && (e->value != 0.0 || !e->data.empty())) anchored = true;
        if (p.c)
            for (int j = 0; j < grid_->nphi() && !anchored; ++j)
                for (int i = 0; i < grid_->nr() && !anchored; ++i)
                    anchored = p.c(grid_->rho(i), grid_->phi(j)) != 0.0;
    }
    if (!anchored) throw SolverError("singular system: no Dirichlet, Robin or zeroth-order term anchors the solution");

    m_ = op_.a;
    for (std::size_t k = 0; k < n; ++k)
        if (op_.fixed[k]) m_.coeffRef(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    m_.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
    lu_->compute(m_);
    if (lu_->info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu_->lastErrorMessage());
}

ScalarField EllipticSolver::solve(const ScalarField& rhs, SolveStats* stats) const
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = grid_->size();
    Eigen::VectorXd b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = op_.fixed[k] ? op_.fixed_value[k] : rhs[k] - op_.s[k];
    Eigen::VectorXd x = lu_->solve(b);
    if (lu_->info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    const double bn = b.norm();
    const double res = bn > 0.0 ? (m_ * x - b).norm() / bn : (m_ * x - b).norm();
    if (!(res <= tol_)) throw SolverError("elliptic residual " + std::to_string(res) + " above tolerance");
    if (stats) {
        stats->iterations = 1;
        stats->residual = res;
        stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return ScalarField(grid_, std::vector<double>(x.data(), x.data() + n));
}

ScalarField apply_operator(const DiscreteOperator& op, const ScalarField& u)
{
    const std::size_t n = u.size();
    const Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd y = op.a * x + op.s;
    ScalarField out(u.grid_ptr());
    for (std::size_t k = 0; k < n; ++k) out[k] = op.fixed[k] ? u[k] - op.fixed_value[k] : y[k];
    return out;
}

ScalarField fv_d_phi(const ScalarField& q)
{
    const MeridianGrid& g = q.grid();
    const int np = g.nphi();
    const double h = g.hphi();
    ScalarField out(q.grid_ptr());
    for (int i = 0; i < g.nr(); ++i) {
        out(i, 0) = (q(i, 1) - q(i, 0)) / h;
        out(i, np - 1) = (q(i, np - 1) - q(i, np - 2)) / h;
        for (int j = 1; j < np - 1; ++j) out(i, j) = (q(i, j + 1) - q(i, j - 1)) / (2.0 * h);
    }
    return out;
}

EllipticProblem vrho_problem(GridPtr g)
{
    // Laplacian of rho*v_rho: Neumann on the walls, zero on the spheres.
    EllipticProblem p;
    p.grid = std::move(g);
    p.a_r = [](double r, double) { return 1.0 / (r * r); };
    p.p_r = [](double r, double) { return r * r; };
    p.a_p = [](double r, double ph) { return 1.0 / (r * r * std::sin(ph)); };
    p.p_p = [](double, double ph) { return std::sin(ph); };
    p.r1 = p.r2 = EdgeBc::neumann(0.0);
    p.a1 = p.a2 = EdgeBc::dirichlet(0.0);
    return p;
}

EllipticProblem vphi_problem(GridPtr g)
{
    // (Laplacian - 1/(rho sin)^2) of rho*v_phi: zero on the walls, Neumann on the spheres.
    EllipticProblem p;
    p.grid = std::move(g);
    p.a_r = [](double r, double) { return 1.0 / (r * r); };
    p.p_r = [](double r, double) { return r * r; };
    p.a_p = [](double r, double ph) { return 1.0 / (r * r * std::sin(ph)); };
    p.p_p = [](double, double ph) { return std::sin(ph); };
    p.c = [](double r, double ph) {
        const double s = std::sin(ph);
        return -1.0 / (r * r * s * s);
    };
    p.r1 = p.r2 = EdgeBc::dirichlet(0.0);
    p.a1 = p.a2 = EdgeBc::neumann(0.0);
    return p;
}

namespace {

void require_zero_on(const ScalarField& f, bool walls, const char* what)
{
    const MeridianGrid& g = f.grid();
    const double tol = 1e-12 * std::max(1.0, f.max_abs());
    if (walls) {
        for (int i = 0; i < g.nr(); ++i)
            if (std::abs(f(i, 0)) > tol || std::abs(f(i, g.nphi() - 1)) > tol)
                throw PreconditionError(std::string(what) + ": rescaled vorticity must vanish on the walls");
    } else {
        for (int j = 0; j < g.nphi(); ++j)
            if (std::abs(f(0, j)) > tol || std::abs(f(g.nr() - 1, j)) > tol)
                throw PreconditionError(std::string(what) + ": rescaled vorticity must vanish on the spheres");
    }
}

ScalarField divide_by_rho(ScalarField f)
{
    const MeridianGrid& g = f.grid();
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) f(i, j) /= g.rho(i);
    return f;
}

}  // namespace

ScalarField vrho_rhs(const ScalarField& omega_t)
{
    require_zero_on(omega_t, true, "radial solve");
    const MeridianGrid& g = omega_t.grid();
    ScalarField q(omega_t.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) q(i, j) = g.sin_phi(j) * g.sin_phi(j) * omega_t(i, j);
    ScalarField d = fv_d_phi(q);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) d(i, j) *= -g.rho(i) / g.sin_phi(j);
    return d;
}

ScalarField vphi_rhs(const ScalarField& omega_t)
{
    require_zero_on(omega_t, false, "polar solve");
    const MeridianGrid& g = omega_t.grid();
    ScalarField q(omega_t.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            const double r = g.rho(i);
            q(i, j) = r * r * r * r * g.sin_phi(j) * omega_t(i, j);
        }
    ScalarField d = d_rho(q);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) d(i, j) /= g.rho(i) * g.rho(i);
    return d;
}

BiotSavart::BiotSavart(GridPtr g) : grid_(g), f_(vrho_problem(g)), g_(vphi_problem(g)) {}

ScalarField BiotSavart::solve_vrho(const ScalarField& omega_t, SolveStats* stats) const
{
    return divide_by_rho(f_.solve(vrho_rhs(omega_t), stats));
}

ScalarField BiotSavart::solve_vphi(const ScalarField& omega_t, SolveStats* stats) const
{
    return divide_by_rho(g_.solve(vphi_rhs(omega_t), stats));
}

ScalarField solve_vrho(const ScalarField& omega_t)
{
    return divide_by_rho(EllipticSolver(vrho_problem(omega_t.grid_ptr())).solve(vrho_rhs(omega_t)));
}

ScalarField solve_vphi(const ScalarField& omega_t)
{
    return divide_by_rho(EllipticSolver(vphi_problem(omega_t.grid_ptr())).solve(vphi_rhs(omega_t)));
}

BiotSavartAudit audit_meridional(const VectorField& b)
{
    const MeridianGrid& g = b.grid();
    BiotSavartAudit a;
    const ScalarField div = divergence(b);
    a.div_l2 = l2(div);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) a.h_max = std::max(a.h_max, std::abs(g.rho(i) * g.rho(i) * div(i, j)));
    const std::vector<double> mean = per_radius_mean(b.rho);
    for (int i = 0; i < g.nr(); ++i) {
        a.mean_max = std::max(a.mean_max, std::abs(mean[i]));
        a.flux_max = std::max(a.flux_max, std::abs(g.rho(i) * mean[i]));
    }
    return a;
}

AssembledVelocity assemble_b(const BiotSavart& bs, const ScalarField& omega_t)
{
    VectorField b(ScalarField(bs.solve_vrho(omega_t)), ScalarField(bs.solve_vphi(omega_t)),
                  ScalarField(omega_t.grid_ptr()));
    BiotSavartAudit audit = audit_meridional(b);
    return {std::move(b), audit};
}

AssembledVelocity assemble_b(const ScalarField& omega_t)
{
    return assemble_b(BiotSavart(omega_t.grid_ptr()), omega_t);
}

PressureGradient pressure_gradient(const VectorField& v, const VectorField& dvdt)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const VectorField lap = laplacian_divfree(v);
    const VectorField b = v.meridional();
    const ScalarField cr = convect(b, v.rho), cp = convect(b, v.phi);
    PressureGradient out{ScalarField(gp), ScalarField(gp)};
    for (int j = 0; j < g.nphi(); ++j) {
        const double cot = g.cot_phi(j);
        for (int i = 0; i < g.nr(); ++i) {
            const double r = g.rho(i), ir = 1.0 / r;
            const double vr = v.rho(i, j), vp = v.phi(i, j), vt = v.theta(i, j);
            out.b_rho(i, j) = lap.rho(i, j) - cr(i, j) + (vp * vp + vt * vt) * ir - dvdt.rho(i, j);
            out.b_phi(i, j) = lap.phi(i, j) - cp(i, j) - vr * vp * ir + cot * vt * vt * ir - dvdt.phi(i, j);
        }
    }
    return out;
}

PressureResult recover_pressure(const VectorField& v, const VectorField& dvdt)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const int nr = g.nr(), np = g.nphi(), c = (np - 1) / 2;
    const double hr = g.hr(), hp = g.hphi();
    const PressureGradient bg = pressure_gradient(v, dvdt);
    ScalarField q(gp);  // rho * B_phi
    for (int j = 0; j < np; ++j)
        for (int i = 0; i < nr; ++i) q(i, j) = g.rho(i) * bg.b_phi(i, j);

    PressureResult out;
    out.p = ScalarField(gp);
    ScalarField& p = out.p;
    for (int i = 1; i < nr; ++i) p(i, c) = p(i - 1, c) + 0.5 * hr * (bg.b_rho(i - 1, c) + bg.b_rho(i, c));
    for (int i = 0; i < nr; ++i) {
        for (int j = c + 1; j < np; ++j) p(i, j) = p(i, j - 1) + 0.5 * hp * (q(i, j - 1) + q(i, j));
        for (int j = c - 1; j >= 0; --j) p(i, j) = p(i, j + 1) - 0.5 * hp * (q(i, j + 1) + q(i, j));
    }
    const double mean = integrate(p) / volume(g);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= mean;

    // The two halves of the discrete curl of (X_rho, rho X_phi) on one cell.
    auto cell_curl = [&](const ScalarField& xr, const ScalarField& xp, int i, int j) {
        const double t1 = (g.rho(i + 1) * (xp(i + 1, j) + xp(i + 1, j + 1)) - g.rho(i) * (xp(i, j) + xp(i, j + 1))) /
                          (2.0 * hr);
        const double t2 = (xr(i, j + 1) + xr(i + 1, j + 1) - xr(i, j) - xr(i + 1, j)) / (2.0 * hp);
        return std::array<double, 2>{t1, t2};
    };
    auto curl_of = [&](const ScalarField& xr, const ScalarField& xp, int i, int j) {
        const auto t = cell_curl(xr, xp, i, j);
        return std::abs(t[0] - t[1]);
    };
    // B is a small difference of viscous, inertial and rate terms; the defect
    // is measured against the curls of those terms, on cells clear of the
    // edge nodes where one-sided closures dominate.
    const VectorField lap = laplacian_divfree(v);
    const ScalarField in_r = bg.b_rho - lap.rho + dvdt.rho, in_p = bg.b_phi - lap.phi + dvdt.phi;
    double defect = 0.0, scale = 0.0;
    for (int j = 1; j + 2 < np; ++j)
        for (int i = 1; i + 2 < nr; ++i) {
            const auto tb = cell_curl(bg.b_rho, bg.b_phi, i, j);
            defect = std::max(defect, std::abs(tb[0] - tb[1]));
            scale = std::max({scale, std::abs(tb[0]), std::abs(tb[1]), curl_of(lap.rho, lap.phi, i, j),
                              curl_of(dvdt.rho, dvdt.phi, i, j), curl_of(in_r, in_p, i, j)});
        }
    out.loop_defect = scale > 0.0 ? defect / scale : 0.0;
    out.defect_limit = 10.0 * 10.0 * (hr * hr + hp * hp);
    out.warning = out.loop_defect > out.defect_limit;
    return out;
}

}  // namespace coneflow

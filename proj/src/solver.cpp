#include "coneflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coneflow/analytic.hpp"
#include "coneflow/diagnostics.hpp"
#include "coneflow/errors.hpp"
#include "coneflow/field_io.hpp"
#include "coneflow/operators.hpp"

namespace coneflow {

void SimulationConfig::validate() const
{
    make_domain(alpha, m, true);
    if (nr < 3 || nphi < 3) throw PreconditionError("grid needs at least 3 nodes per direction");
    if (nphi % 2 == 0) throw PreconditionError("nphi must be odd so the equator is a grid line");
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    if (!(t_final > 0.0)) throw PreconditionError("t_final must be positive");
    if (!(window > 0.0) || window > t_final + 1e-12) throw PreconditionError("window must lie in (0, t_final]");
    if (!(window_floor > 0.0) || window_floor > window) throw PreconditionError("window floor must lie in (0, window]");
    if (!(picard_tol > 0.0)) throw PreconditionError("Picard tolerance must be positive");
    if (picard_max_iter < 1) throw PreconditionError("Picard iteration cap must be at least 1");
    if (!(cfl_safety > 0.0)) throw PreconditionError("CFL safety factor must be positive");
    if (startup_steps < 0) throw PreconditionError("startup step count must be non-negative");
    if (snapshot_every < 1) throw PreconditionError("snapshot cadence must be at least 1");
    if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || !std::isfinite(gamma_target))
        throw PreconditionError("initial-data parameters must be finite");
    if (initial == InitialData::Snapshot && snapshot_path.empty())
        throw PreconditionError("snapshot initial data needs a file");
}

namespace {

double antiderivative_h(double rho, double m)
{
    // int_0^rho s^2 (s - a)(s - 1) ds with a = 1/m
    const double a = 1.0 / m;
    const double r3 = rho * rho * rho;
    return r3 * rho * rho / 5.0 - (a + 1.0) * r3 * rho / 4.0 + a * r3 / 3.0;
}

double swirl_angle(double phi, double alpha) { return std::sin(kPi * (phi - kHalfPi) / (2.0 * alpha)); }

// Odd part of f about the equator.
ScalarField odd_part(const ScalarField& f) { return (f - reflect(f)) * 0.5; }

}  // namespace

double example_lambda2(const MeridianGrid& g, double target)
{
    double mx = 0.0;
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i)
            mx = std::max(mx, std::abs(antiderivative_h(g.rho(i), g.domain().m) *
                                       swirl_angle(g.phi(j), g.domain().alpha)));
    if (!(mx > 0.0)) throw PreconditionError("swirl profile vanishes on this grid");
    return target / mx;
}

VectorField example_initial_data(GridPtr g, double lambda1, double lambda2)
{
    const MeridianDomain& d = g->domain();
    const double a = 1.0 / d.m, k = kPi / d.alpha;
    return VectorField::sample(g, [&](double rho, double phi) {
        const double s = std::sin(phi);
        const double x = k * (phi - kHalfPi);
        const double sx = std::sin(x), cx = std::cos(x);
        const double gv = sx * sx * sx;
        const double dg = 3.0 * k * sx * sx * cx;
        const double p = rho - a, q = rho - 1.0;
        const double r4 = rho * rho * rho * rho;
        const double f = r4 * p * p * p * q * q * q;
        const double df = 4.0 * rho * rho * rho * p * p * p * q * q * q + 3.0 * r4 * p * p * q * q * q +
                          3.0 * r4 * p * p * p * q * q;
        return Vec3{lambda1 * f * dg / (rho * rho * s), -lambda1 * df * gv / (rho * s),
                    lambda2 * antiderivative_h(rho, d.m) * swirl_angle(phi, d.alpha) / (rho * s)};
    });
}

AdmissibilityReport admissibility_check(const VectorField& v0, double c_tol)
{
    const MeridianGrid& g = v0.grid();
    AdmissibilityReport r;
    const double gscale = std::sqrt(grad_sq(grad_vector(v0)));
    const double vscale = gradient_scale(v0);
    const double vn = l2(v0);
    r.div_rel = gscale > 0.0 ? l2(divergence(v0)) / gscale : 0.0;
    r.slip = slip_residuals(v0);
    if (vscale > 0.0) {
        r.slip.r1 /= vscale;
        r.slip.r2 /= vscale;
        r.slip.a1 /= vscale;
        r.slip.a2 /= vscale;
    }
    r.eoo_rel = vn > 0.0 ? eoo_project(v0).residual / vn : 0.0;
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i)
            r.gamma_max = std::max(r.gamma_max, std::abs(g.rho(i) * g.sin_phi(j) * v0.theta(i, j)));
    r.tolerance = c_tol * g.h();
    r.div_ok = r.div_rel <= r.tolerance;
    r.slip_ok = r.slip.max() <= r.tolerance;
    r.eoo_ok = r.eoo_rel <= r.tolerance;
    r.below_100 = r.gamma_max <= 1.0 / 100.0;
    r.below_95 = r.gamma_max <= 1.0 / 95.0;
    return r;
}

SimulationState initial_state(const VectorField& v0, double t0)
{
    const GridPtr& gp = v0.grid_ptr();
    const MeridianGrid& g = *gp;
    SimulationState s;
    s.t = t0;
    s.gamma = ScalarField(gp);
    s.omega_t = ScalarField(gp);
    const VectorField w = curl(v0);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            const double rs = g.rho(i) * g.sin_phi(j);
            s.gamma(i, j) = rs * v0.theta(i, j);
            const bool edge = i == 0 || j == 0 || i == g.nr() - 1 || j == g.nphi() - 1;
            s.omega_t(i, j) = edge ? 0.0 : w.theta(i, j) / rs;
        }
    s.b = v0.meridional();
    return s;
}

Pipeline::Pipeline(GridPtr g, const StepperConfig& cfg)
    : grid_(g), cfg_(cfg), bs_(g), gamma_(g, cfg), omega_(g, cfg)
{
    if (cfg.scheme == TimeScheme::CrankNicolson && cfg.startup_steps > 0) {
        const StepperConfig half{0.5 * cfg.dt, TimeScheme::BackwardEuler, cfg.cfl_safety, 0};
        gamma_half_.emplace(g, half);
        omega_half_.emplace(g, half);
    }
}

std::vector<SimulationState> apply_L(const Pipeline& p, const std::vector<VectorField>& b,
                                     const SimulationState& state0, int steps, int first_step,
                                     std::vector<SimulationState>* halves)
{
    if (steps < 1 || static_cast<int>(b.size()) < steps) throw PreconditionError("drift history shorter than window");
    const double dt = p.config().dt;
    std::vector<SimulationState> out(static_cast<std::size_t>(steps) + 1);
    out[0] = state0;
    if (halves) halves->assign(static_cast<std::size_t>(steps), SimulationState{});
    ScalarField vt_prev = vtheta_from_gamma(state0.gamma);
    for (int n = 0; n < steps; ++n) {
        const SimulationState& cur = out[n];
        SimulationState& nx = out[n + 1];
        nx.t = state0.t + (n + 1) * dt;
        ScalarField vt;
        if (p.startup(first_step + n)) {
            const ScalarField g1 = p.gamma_half().step(cur.gamma, b[n]);
            const ScalarField vt1 = vtheta_from_gamma(g1);
            const ScalarField o1 = p.omega_half().step(cur.omega_t, b[n], vt_prev, vt1);
            nx.gamma = p.gamma_half().step(g1, b[n]);
            vt = vtheta_from_gamma(nx.gamma);
            nx.omega_t = p.omega_half().step(o1, b[n], vt1, vt);
            if (halves) {
                SimulationState& h = (*halves)[n];
                h.t = cur.t + 0.5 * dt;
                h.gamma = g1;
                h.omega_t = o1;
                h.b = assemble_b(p.biot_savart(), o1).b;
            }
        } else {
            nx.gamma = p.gamma().step(cur.gamma, b[n]);
            vt = vtheta_from_gamma(nx.gamma);
            nx.omega_t = p.omega().step(cur.omega_t, b[n], vt_prev, vt);
        }
        nx.b = assemble_b(p.biot_savart(), nx.omega_t).b;
        vt_prev = std::move(vt);
    }
    return out;
}

double window_e_norm(const std::vector<VectorField>& u, double dt)
{
    double sup = 0.0, integral = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        sup = std::max(sup, l2_sq(u[n]));
        const double w = (n == 0 || n + 1 == u.size()) ? 0.5 * dt : dt;
        integral += w * grad_sq(grad_vector(u[n]));
    }
    return std::sqrt(sup + integral);
}

PicardResult picard_solve(const Pipeline& p, const SimulationState& state0, int steps, double tol, int max_iter,
                          int first_step)
{
    const double dt = p.config().dt;
    PicardResult res;
    res.record.t0 = state0.t;
    res.record.t1 = state0.t + steps * dt;
    res.record.steps = steps;
    std::vector<VectorField> b(static_cast<std::size_t>(steps) + 1, state0.b);
    for (int it = 1; it <= max_iter; ++it) {
        res.states = apply_L(p, b, state0, steps, first_step, &res.halves);
        std::vector<VectorField> diff;
        diff.reserve(b.size());
        for (std::size_t n = 0; n < b.size(); ++n) {
            diff.push_back(res.states[n].b - b[n]);
            b[n] = res.states[n].b;
        }
        const double d = window_e_norm(diff, dt);
        if (!res.record.diffs.empty()) res.record.ratios.push_back(d / res.record.diffs.back());
        res.record.diffs.push_back(d);
        res.record.iterations = it;
        if (!std::isfinite(d)) break;
        if (d <= tol) return res;
        if (it >= 3 && d > 1e3 * res.record.diffs.front()) break;
    }
    throw ConvergenceError("Picard iteration did not converge on window [" + std::to_string(res.record.t0) + ", " +
                               std::to_string(res.record.t1) + "]; shorten the window",
                           res.record.ratios);
}

GridPtr make_grid(const SimulationConfig& cfg)
{
    return MeridianGrid::create(make_domain(cfg.alpha, cfg.m, true), cfg.nr, cfg.nphi);
}

VectorField initial_velocity(const SimulationConfig& cfg, GridPtr g)
{
    switch (cfg.initial) {
    case InitialData::Zero: return VectorField(g);
    case InitialData::Swirl: return stationary_swirl(g).v;
    case InitialData::Snapshot: return read_vector_csv(cfg.snapshot_path, g);
    case InitialData::Example: break;
    }
    const double l2 = cfg.gamma_target > 0.0 ? example_lambda2(*g, cfg.gamma_target) : cfg.lambda2;
    return example_initial_data(g, cfg.lambda1, l2);
}

Trajectory march(const SimulationConfig& cfg)
{
    cfg.validate();
    const GridPtr g = make_grid(cfg);
    return march(cfg, initial_velocity(cfg, g));
}

Trajectory march(const SimulationConfig& cfg, const VectorField& v0)
{
    cfg.validate();
    const GridPtr& g = v0.grid_ptr();
    const StepperConfig sc = cfg.stepper();
    const Pipeline pipe(g, sc);
    const double theta = cfg.scheme == TimeScheme::BackwardEuler ? 1.0 : 0.5;

    Trajectory tr;
    tr.h = g->h();
    tr.dt = cfg.dt;
    tr.theta = theta;
    tr.initial_eoo = admissibility_check(v0).eoo_ok;

    SimulationState state = initial_state(v0);
    tr.gamma0_max = linf(state.gamma);
    tr.steps.push_back(measure_state(state));
    tr.snapshots.push_back({0, state});

    const int total = std::max(1, static_cast<int>(std::lround(cfg.t_final / cfg.dt)));
    int window_steps = std::max(1, static_cast<int>(std::lround(cfg.window / cfg.dt)));
    const int floor_steps = std::max(1, static_cast<int>(std::lround(cfg.window_floor / cfg.dt)));
    int done = 0;
    int halvings = 0;
    while (done < total) {
        const int steps = std::min(window_steps, total - done);
        PicardResult pr;
        try {
            pr = picard_solve(pipe, state, steps, cfg.picard_tol, cfg.picard_max_iter, done);
        } catch (const ConvergenceError& e) {
            if (steps / 2 < floor_steps) throw;
            window_steps = steps / 2;
            ++halvings;
            continue;
        }
        pr.record.halvings = halvings;
        halvings = 0;
        std::vector<SimulationState>& st = pr.states;
        for (int k = 0; k <= steps; ++k) st[k].t = (done + k) * cfg.dt;
        pr.record.t0 = st.front().t;
        pr.record.t1 = st.back().t;
        for (int k = 1; k <= steps; ++k) {
            const int n = done + k;
            const bool split = pipe.startup(n - 1);
            const double th = split ? 1.0 : theta;
            StepRecord rec = measure_state(st[k]);
            if (split) {
                SimulationState& h = pr.halves[k - 1];
                h.t = 0.5 * (st[k - 1].t + st[k].t);
                measure_split_step(st[k - 1], h, st[k], rec);
            } else {
                measure_step(st[k - 1], st[k], th, rec);
            }
            tr.steps.push_back(rec);
            const bool snap = n % cfg.snapshot_every == 0 || n == total;
            if (snap) tr.snapshots.push_back({n, st[k]});
            if (snap && cfg.compute_residuals) tr.residuals.push_back(residual_audit(st[k - 1], st[k], th));
        }
        state = st.back();
        if (cfg.enforce_symmetry) {
            state.gamma = odd_part(state.gamma);
            state.omega_t = odd_part(state.omega_t);
            state.b = eoo_project(state.b).field.meridional();
        }
        tr.windows.push_back(pr.record);
        done += steps;
    }
    return tr;
}

}  // namespace coneflow

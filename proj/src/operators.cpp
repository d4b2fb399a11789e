#include "coneflow/operators.hpp"

#include <algorithm>
#include <cmath>

#include "coneflow/errors.hpp"
#include "coneflow/kernels.hpp"

namespace coneflow {

namespace {

template <class Fn>
ScalarField nodewise(const GridPtr& g, Fn fn)
{
    ScalarField out(g);
    for (int j = 0; j < g->nphi(); ++j)
        for (int i = 0; i < g->nr(); ++i) out(i, j) = fn(i, j);
    return out;
}

}  // namespace

ScalarField d_rho(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    const int n = g.nr();
    const double s = 0.5 / g.hr();
    ScalarField out(f.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j) {
        const double* r = f.data() + g.idx(0, j);
        double* o = out.data() + g.idx(0, j);
        kernels::sub_scale(r + 2, r, s, o + 1, n - 2);
        o[0] = (-3.0 * r[0] + 4.0 * r[1] - r[2]) * s;
        o[n - 1] = (3.0 * r[n - 1] - 4.0 * r[n - 2] + r[n - 3]) * s;
    }
    return out;
}

ScalarField d_phi(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    const int n = g.nr(), m = g.nphi();
    const double s = 0.5 / g.hphi();
    ScalarField out(f.grid_ptr());
    auto row = [&](int j) { return f.data() + g.idx(0, j); };
    for (int j = 1; j < m - 1; ++j) kernels::sub_scale(row(j + 1), row(j - 1), s, out.data() + g.idx(0, j), n);
    for (int i = 0; i < n; ++i) {
        out(i, 0) = (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) * s;
        out(i, m - 1) = (3.0 * f(i, m - 1) - 4.0 * f(i, m - 2) + f(i, m - 3)) * s;
    }
    return out;
}

ScalarField d2_rho(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    const int n = g.nr();
    const double s = 1.0 / (g.hr() * g.hr());
    ScalarField out(f.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j) {
        const double* r = f.data() + g.idx(0, j);
        double* o = out.data() + g.idx(0, j);
        kernels::second_diff(r + 2, r + 1, r, s, o + 1, n - 2);
        if (n >= 4) {
            o[0] = (2.0 * r[0] - 5.0 * r[1] + 4.0 * r[2] - r[3]) * s;
            o[n - 1] = (2.0 * r[n - 1] - 5.0 * r[n - 2] + 4.0 * r[n - 3] - r[n - 4]) * s;
        } else {
            o[0] = o[n - 1] = o[1];
        }
    }
    return out;
}

ScalarField d2_phi(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    const int n = g.nr(), m = g.nphi();
    const double s = 1.0 / (g.hphi() * g.hphi());
    ScalarField out(f.grid_ptr());
    auto row = [&](int j) { return f.data() + g.idx(0, j); };
    for (int j = 1; j < m - 1; ++j)
        kernels::second_diff(row(j + 1), row(j), row(j - 1), s, out.data() + g.idx(0, j), n);
    for (int i = 0; i < n; ++i) {
        if (m >= 4) {
            out(i, 0) = (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) * s;
            out(i, m - 1) = (2.0 * f(i, m - 1) - 5.0 * f(i, m - 2) + 4.0 * f(i, m - 3) - f(i, m - 4)) * s;
        } else {
            out(i, 0) = out(i, m - 1) = out(i, 1);
        }
    }
    return out;
}

ScalarGradient grad_scalar(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    ScalarField dp = d_phi(f);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) dp(i, j) /= g.rho(i);
    return {d_rho(f), std::move(dp)};
}

GradientField grad_vector(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    GradientField out;
    for (int c = 0; c < 3; ++c) {
        out(c, 0) = d_rho(v[c]);
        out(c, 1) = d_phi(v[c]);
        out(c, 2) = ScalarField(gp);
    }
    for (int j = 0; j < g.nphi(); ++j) {
        const double cot = g.cot_phi(j);
        for (int i = 0; i < g.nr(); ++i) {
            const double ir = 1.0 / g.rho(i);
            const double vr = v.rho(i, j), vp = v.phi(i, j), vt = v.theta(i, j);
            out(0, 1)(i, j) = (out(0, 1)(i, j) - vp) * ir;
            out(1, 1)(i, j) = (out(1, 1)(i, j) + vr) * ir;
            out(2, 1)(i, j) = out(2, 1)(i, j) * ir;
            out(0, 2)(i, j) = -vt * ir;
            out(1, 2)(i, j) = -cot * vt * ir;
            out(2, 2)(i, j) = (vr + cot * vp) * ir;
        }
    }
    return out;
}

ScalarField divergence(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const ScalarField a = d_rho(nodewise(gp, [&](int i, int j) { return g.rho(i) * g.rho(i) * v.rho(i, j); }));
    const ScalarField b = d_phi(nodewise(gp, [&](int i, int j) { return g.sin_phi(j) * v.phi(i, j); }));
    return nodewise(gp, [&](int i, int j) {
        const double r = g.rho(i);
        return a(i, j) / (r * r) + b(i, j) / (r * g.sin_phi(j));
    });
}

VectorField curl(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const ScalarField st = d_phi(nodewise(gp, [&](int i, int j) { return g.sin_phi(j) * v.theta(i, j); }));
    const ScalarField rt = d_rho(nodewise(gp, [&](int i, int j) { return g.rho(i) * v.theta(i, j); }));
    const ScalarField rp = d_rho(nodewise(gp, [&](int i, int j) { return g.rho(i) * v.phi(i, j); }));
    const ScalarField pr = d_phi(v.rho);
    VectorField w(gp);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            const double ir = 1.0 / g.rho(i);
            w.rho(i, j) = st(i, j) * ir / g.sin_phi(j);
            w.phi(i, j) = -rt(i, j) * ir;
            w.theta(i, j) = (rp(i, j) - pr(i, j)) * ir;
        }
    return w;
}

ScalarField laplacian_scalar(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    const ScalarField frr = d2_rho(f), fr = d_rho(f), fpp = d2_phi(f), fp = d_phi(f);
    return nodewise(f.grid_ptr(), [&](int i, int j) {
        const double r = g.rho(i), ir2 = 1.0 / (r * r);
        return frr(i, j) + 2.0 / r * fr(i, j) + ir2 * (fpp(i, j) + g.cot_phi(j) * fp(i, j));
    });
}

VectorField laplacian_divfree(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const ScalarField lr = laplacian_scalar(v.rho), lp = laplacian_scalar(v.phi), lt = laplacian_scalar(v.theta);
    const ScalarField rr = d_rho(v.rho), pr = d_phi(v.rho);
    VectorField out(gp);
    for (int j = 0; j < g.nphi(); ++j) {
        const double s = g.sin_phi(j);
        for (int i = 0; i < g.nr(); ++i) {
            const double r = g.rho(i), ir2 = 1.0 / (r * r), pot = ir2 / (s * s);
            out.rho(i, j) = lr(i, j) + 2.0 / r * rr(i, j) + 2.0 * ir2 * v.rho(i, j);
            out.phi(i, j) = lp(i, j) - pot * v.phi(i, j) + 2.0 * ir2 * pr(i, j);
            out.theta(i, j) = lt(i, j) - pot * v.theta(i, j);
        }
    }
    return out;
}

VectorField laplacian_vector(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const ScalarField lr = laplacian_scalar(v.rho), lp = laplacian_scalar(v.phi), lt = laplacian_scalar(v.theta);
    const ScalarField pr = d_phi(v.rho), pp = d_phi(v.phi);
    VectorField out(gp);
    for (int j = 0; j < g.nphi(); ++j) {
        const double s = g.sin_phi(j), cot = g.cot_phi(j);
        for (int i = 0; i < g.nr(); ++i) {
            const double r = g.rho(i), ir2 = 1.0 / (r * r), pot = ir2 / (s * s);
            out.rho(i, j) = lr(i, j) - 2.0 * ir2 * v.rho(i, j) - 2.0 * ir2 * (pp(i, j) + cot * v.phi(i, j));
            out.phi(i, j) = lp(i, j) - pot * v.phi(i, j) + 2.0 * ir2 * pr(i, j);
            out.theta(i, j) = lt(i, j) - pot * v.theta(i, j);
        }
    }
    return out;
}

ScalarField convect(const VectorField& b, const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    const ScalarField fr = d_rho(f);
    ScalarField fp = d_phi(f);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) fp(i, j) /= g.rho(i);
    ScalarField out(f.grid_ptr());
    kernels::mul_add_mul(b.rho.data(), fr.data(), b.phi.data(), fp.data(), out.data(), out.size());
    return out;
}

VectorField convect_vector(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const ScalarField ar = convect(v, v.rho), ap = convect(v, v.phi), at = convect(v, v.theta);
    VectorField out(gp);
    for (int j = 0; j < g.nphi(); ++j) {
        const double cot = g.cot_phi(j);
        for (int i = 0; i < g.nr(); ++i) {
            const double ir = 1.0 / g.rho(i);
            const double vr = v.rho(i, j), vp = v.phi(i, j), vt = v.theta(i, j);
            out.rho(i, j) = ar(i, j) - (vp * vp + vt * vt) * ir;
            out.phi(i, j) = ap(i, j) + vr * vp * ir - cot * vt * vt * ir;
            out.theta(i, j) = at(i, j) + (vr * vt + cot * vp * vt) * ir;
        }
    }
    return out;
}

DerivedQuantities derived_quantities(const VectorField& v, const VectorField& w)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    DerivedQuantities d{ScalarField(gp), ScalarField(gp), ScalarField(gp), ScalarField(gp)};
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            const double r = g.rho(i), s = g.sin_phi(j);
            d.gamma(i, j) = r * s * v.theta(i, j);
            d.k(i, j) = w.rho(i, j) / r;
            d.f(i, j) = w.phi(i, j) / r;
            d.omega(i, j) = w.theta(i, j) / (r * s);
        }
    return d;
}

ScalarField reflect(const ScalarField& f)
{
    const MeridianGrid& g = f.grid();
    ScalarField out(f.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j) {
        const double* src = f.data() + g.idx(0, g.mirror(j));
        std::copy(src, src + g.nr(), out.data() + g.idx(0, j));
    }
    return out;
}

double parity_defect(const ScalarField& f, int parity)
{
    const ScalarField r = reflect(f);
    ScalarField bad(f.grid_ptr());
    for (std::size_t k = 0; k < f.size(); ++k) bad[k] = 0.5 * (f[k] - parity * r[k]);
    return l2(bad);
}

EooProjection eoo_project(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    VectorField out(gp), bad(gp);
    const int parity[3] = {+1, -1, -1};
    for (int c = 0; c < 3; ++c) {
        const ScalarField r = reflect(v[c]);
        for (std::size_t k = 0; k < r.size(); ++k) {
            out[c][k] = 0.5 * (v[c][k] + parity[c] * r[k]);
            bad[c][k] = 0.5 * (v[c][k] - parity[c] * r[k]);
        }
    }
    return {std::move(out), l2(bad)};
}

double integrate(const ScalarField& f)
{
    return kernels::weighted_sum(f.grid().volume_weights().data(), f.data(), f.size());
}

double inner(const ScalarField& f, const ScalarField& g)
{
    return kernels::weighted_dot(f.grid().volume_weights().data(), f.data(), g.data(), f.size());
}

double l2_sq(const ScalarField& f)
{
    return kernels::weighted_sum_sq(f.grid().volume_weights().data(), f.data(), f.size());
}

double l2(const ScalarField& f) { return std::sqrt(l2_sq(f)); }

double l2_sq(const VectorField& v) { return l2_sq(v.rho) + l2_sq(v.phi) + l2_sq(v.theta); }

double l2(const VectorField& v) { return std::sqrt(l2_sq(v)); }

double grad_sq(const ScalarField& f)
{
    const ScalarGradient gr = grad_scalar(f);
    return l2_sq(gr.rho) + l2_sq(gr.phi);
}

double grad_sq(const GradientField& g)
{
    double s = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s += l2_sq(g(r, c));
    return s;
}

double h1(const ScalarField& f) { return std::sqrt(l2_sq(f) + grad_sq(f)); }

double h1(const VectorField& v) { return std::sqrt(l2_sq(v) + grad_sq(grad_vector(v))); }

double l6(const ScalarField& f)
{
    ScalarField cube(f.grid_ptr());
    for (std::size_t k = 0; k < f.size(); ++k) cube[k] = f[k] * f[k] * f[k];
    return std::pow(l2_sq(cube), 1.0 / 6.0);
}

double linf(const ScalarField& f) { return f.max_abs(); }

double linf(const VectorField& v)
{
    double m = 0.0;
    for (std::size_t k = 0; k < v.rho.size(); ++k)
        m = std::max(m, std::sqrt(v.rho[k] * v.rho[k] + v.phi[k] * v.phi[k] + v.theta[k] * v.theta[k]));
    return m;
}

double volume(const MeridianGrid& g)
{
    double s = 0.0;
    for (double w : g.volume_weights()) s += w;
    return s;
}

std::vector<double> per_radius_mean(const ScalarField& v_rho)
{
    const MeridianGrid& g = v_rho.grid();
    std::vector<double> out(g.nr(), 0.0);
    for (int j = 0; j < g.nphi(); ++j) {
        const double w = g.phi_trap()[j] * g.sin_phi(j);
        for (int i = 0; i < g.nr(); ++i) out[i] += w * v_rho(i, j);
    }
    return out;
}

}  // namespace coneflow

namespace coneflow {

double EdgeResiduals::max() const { return std::max(std::max(r1, r2), std::max(a1, a2)); }

EdgeResiduals slip_residuals(const VectorField& v)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    const int nr = g.nr(), np = g.nphi();
    const ScalarField pr = d_phi(v.rho);
    const ScalarField st = d_phi(nodewise(gp, [&](int i, int j) { return g.sin_phi(j) * v.theta(i, j); }));
    const ScalarField rp = d_rho(nodewise(gp, [&](int i, int j) { return g.rho(i) * v.phi(i, j); }));
    const ScalarField rt = d_rho(nodewise(gp, [&](int i, int j) { return g.rho(i) * v.theta(i, j); }));
    EdgeResiduals e;
    auto wall = [&](int j) {
        double m = 0.0;
        for (int i = 0; i < nr; ++i)
            m = std::max({m, std::abs(v.phi(i, j)), std::abs(pr(i, j)), std::abs(st(i, j))});
        return m;
    };
    auto sphere = [&](int i) {
        double m = 0.0;
        for (int j = 0; j < np; ++j)
            m = std::max({m, std::abs(v.rho(i, j)), std::abs(rp(i, j)), std::abs(rt(i, j))});
        return m;
    };
    e.r1 = wall(0);
    e.r2 = wall(np - 1);
    e.a1 = sphere(0);
    e.a2 = sphere(nr - 1);
    return e;
}

double gradient_scale(const VectorField& v)
{
    const GradientField gr = grad_vector(v);
    double m = linf(v);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m = std::max(m, gr(r, c).max_abs());
    return m;
}

}  // namespace coneflow

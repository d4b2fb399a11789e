#include "coneflow/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "coneflow/errors.hpp"

namespace coneflow {

SwirlSolution stationary_swirl(GridPtr g)
{
    SwirlSolution s{VectorField(g), ScalarField(g)};
    const MeridianGrid& gr = *g;
    for (int j = 0; j < gr.nphi(); ++j)
        for (int i = 0; i < gr.nr(); ++i) {
            const double r = gr.rho(i) * gr.sin_phi(j);
            s.v.theta(i, j) = 1.0 / r;
            s.p(i, j) = -0.5 / (r * r);
        }
    return s;
}

namespace {

double psi(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double dpsi(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double EtaProfile::operator()(double t) const
{
    if (t <= 1.0) return 0.0;
    if (t >= 2.0) return 1.0;
    const double a = psi(t - 1.0), b = psi(2.0 - t);
    return a / (a + b);
}

double EtaProfile::derivative(double t) const
{
    if (t <= 1.0 || t >= 2.0) return 0.0;
    const double a = psi(t - 1.0), b = psi(2.0 - t);
    const double da = dpsi(t - 1.0), db = -dpsi(2.0 - t);
    const double s = a + b;
    return (da * b - a * db) / (s * s);
}

CuspFields cusp_blowup(double r, double t, const EtaProfile& eta)
{
    if (!(r > 0.0)) throw PreconditionError("cusp solution needs r > 0");
    const double e = eta(t), de = eta.derivative(t);
    return {e / r, -0.5 * e * e / (r * r), -de / r};
}

SlabResidual cusp_slab_residual(const CuspDomain& d, int j, double t, int n, const EtaProfile& eta)
{
    if (n < 5) throw PreconditionError("slab grid needs at least 5 nodes per direction");
    const SlabExtent s = cusp_slab(j, d);
    const double hr = (s.r_hi - s.r_lo) / (n - 1), hz = s.x3_hi / (n - 1);
    const double e = eta(t), de = eta.derivative(t);
    // The solution does not depend on x3, but the x3 stencil is applied anyway.
    std::vector<double> v(static_cast<std::size_t>(n) * n), p(v.size());
    auto at = [n](int i, int k) { return static_cast<std::size_t>(k) * n + i; };
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const CuspFields c = cusp_blowup(s.r_lo + i * hr, t, eta);
            v[at(i, k)] = c.v_theta;
            p[at(i, k)] = c.pressure;
        }
    SlabResidual out;
    out.slab = j;
    out.nodes = n;
    out.h = std::max(hr, hz);
    double sw = 0.0, sw_scale = 0.0, rad = 0.0, rad_scale = 0.0;
    for (int k = 1; k + 1 < n; ++k)
        for (int i = 1; i + 1 < n; ++i) {
            const double r = s.r_lo + i * hr;
            const double vc = v[at(i, k)];
            const double vrr = (v[at(i + 1, k)] - 2.0 * vc + v[at(i - 1, k)]) / (hr * hr);
            const double vr = (v[at(i + 1, k)] - v[at(i - 1, k)]) / (2.0 * hr);
            const double vzz = (v[at(i, k + 1)] - 2.0 * vc + v[at(i, k - 1)]) / (hz * hz);
            const double forcing = -de / r;
            const double dvdt = de / r;
            sw = std::max(sw, std::abs(vrr + vr / r + vzz - vc / (r * r) - dvdt - forcing));
            sw_scale = std::max({sw_scale, 2.0 * std::abs(e) / (r * r * r), std::abs(de) / r});
            const double pr = (p[at(i + 1, k)] - p[at(i - 1, k)]) / (2.0 * hr);
            rad = std::max(rad, std::abs(pr - vc * vc / r));
            rad_scale = std::max(rad_scale, vc * vc / r);
        }
    for (double x : v) out.v_max = std::max(out.v_max, std::abs(x));
    out.swirl = sw_scale > 0.0 ? sw / sw_scale : sw;
    out.radial = rad_scale > 0.0 ? rad / rad_scale : rad;
    return out;
}

CuspEnergy cusp_energy(const CuspDomain& d, double t, int n, const EtaProfile& eta)
{
    if (!(d.beta > 2.0)) throw PreconditionError("finite-energy claims need beta > 2");
    if (n < 3) throw PreconditionError("slab quadrature needs at least 3 nodes per direction");
    const double e = eta(t);
    CuspEnergy out;
    out.energy_bound = 2.0 * kPi * std::pow(2.0, d.beta) / d.beta;
    double se = 0.0, sd = 0.0;
    for (int j = 1; j <= d.depth; ++j) {
        const SlabExtent s = cusp_slab(j, d);
        const double hr = (s.r_hi - s.r_lo) / (n - 1);
        // Integrands are independent of x3, so the x3 trapezoid is exact.
        double qe = 0.0, qd = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = s.r_lo + i * hr;
            const double w = (i == 0 || i == n - 1) ? 0.5 * hr : hr;
            const double vt = e / r;
            qe += w * vt * vt * r;
            qd += w * 2.0 * vt * vt / (r * r) * r;  // |grad v|^2 = 2 eta^2 / r^4
        }
        const double fac = 2.0 * kPi * s.x3_hi;
        out.slab_energy.push_back(fac * qe);
        out.slab_dissipation.push_back(fac * qd);
        const double thick = std::pow(2.0, -d.beta * (j - 1));
        out.energy_closed.push_back(2.0 * kPi * e * e * thick * std::log(2.0));
        out.dissipation_closed.push_back(2.0 * kPi * e * e * thick * 3.0 * std::pow(4.0, j - 1));
        se += fac * qe;
        sd += fac * qd;
        out.energy_partial.push_back(se);
        out.dissipation_partial.push_back(sd);
    }
    for (int j = 2; j < d.depth; ++j) {
        const double a = out.energy_partial[j] - out.energy_partial[j - 1];
        const double b = out.energy_partial[j - 1] - out.energy_partial[j - 2];
        out.energy_ratio.push_back(b != 0.0 ? a / b : 0.0);
        const double c = out.dissipation_partial[j] - out.dissipation_partial[j - 1];
        const double f = out.dissipation_partial[j - 1] - out.dissipation_partial[j - 2];
        out.dissipation_ratio.push_back(f != 0.0 ? c / f : 0.0);
    }
    return out;
}

}  // namespace coneflow

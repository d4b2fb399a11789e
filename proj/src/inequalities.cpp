#include "coneflow/inequalities.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "coneflow/errors.hpp"
#include "coneflow/operators.hpp"

namespace coneflow {

InequalityReport make_report(std::string name, double alpha, int n, double lhs, double rhs, double constant,
                             double tolerance)
{
    InequalityReport r;
    r.name = std::move(name);
    r.alpha = alpha;
    r.n = n;
    r.lhs = lhs;
    r.rhs = rhs;
    r.constant = constant;
    r.slack = rhs - lhs;
    r.tolerance = tolerance;
    r.pass = std::isfinite(r.slack) && r.slack >= -tolerance;
    return r;
}

HypothesisViolation::HypothesisViolation(const std::string& h, double l, double r, double d)
    : std::invalid_argument("hypothesis violated: " + h), hypothesis(h), lhs(l), rhs(r), defect(d)
{
}

double poincare_const_A(double alpha)
{
    if (!(alpha > 0.0 && alpha < kHalfPi))
        throw PreconditionError("mean-zero Poincare constant needs 0 < alpha < pi/2");
    const double a2 = alpha * alpha;
    return 4.0 * a2 / (kPi * kPi + 2.0 * a2);
}

double poincare_const_B(double alpha)
{
    if (!(alpha > 0.0 && alpha <= kPi / 4.0 + 1e-15))
        throw PreconditionError("Dirichlet Poincare constant needs 0 < alpha <= pi/4");
    const double a2 = alpha * alpha, c = std::cos(alpha);
    return 4.0 * a2 / (kPi * kPi - 2.0 * a2 / (c * c));
}

double sharp_weighted_constant(double alpha, PoincareSubspace s, int n, SturmWeight w)
{
    if (n < 16) throw PreconditionError("eigenproblem needs at least 16 nodes");
    if (!(alpha > 0.0 && alpha < kHalfPi)) throw PreconditionError("half-angle must lie in (0, pi/2)");
    const double a = kHalfPi - alpha;
    const double h = 2.0 * alpha / (n - 1);
    auto p = [&](double y) { return w == SturmWeight::Sine ? std::sin(y) : 1.0; };

    // Stiffness K (tridiagonal) and lumped mass M (trapezoid weights).
    Eigen::VectorXd kd = Eigen::VectorXd::Zero(n), ko = Eigen::VectorXd::Zero(n - 1), md(n);
    for (int k = 0; k + 1 < n; ++k) {
        const double ph = p(a + (k + 0.5) * h) / (h * h);
        kd[k] += ph;
        kd[k + 1] += ph;
        ko[k] = -ph;
    }
    for (int k = 0; k < n; ++k) md[k] = p(a + k * h) * ((k == 0 || k == n - 1) ? 0.5 : 1.0);

    double lambda = 0.0;
    if (s == PoincareSubspace::Dirichlet) {
        const int m = n - 2;
        Eigen::VectorXd d(m), e(m - 1);
        for (int k = 0; k < m; ++k) d[k] = kd[k + 1] / md[k + 1];
        for (int k = 0; k + 1 < m; ++k) e[k] = ko[k + 1] / std::sqrt(md[k + 1] * md[k + 2]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw SolverError("tridiagonal eigensolver did not converge");
        lambda = es.eigenvalues()[0];
    } else {
        // Symmetrized C = M^{-1/2} K M^{-1/2}; its null vector is M^{1/2} 1.
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k < n; ++k) c(k, k) = kd[k] / md[k];
        for (int k = 0; k + 1 < n; ++k) c(k, k + 1) = c(k + 1, k) = ko[k] / std::sqrt(md[k] * md[k + 1]);
        Eigen::VectorXd q = md.cwiseSqrt();
        q.normalize();
        const double shift = 2.0 * c.cwiseAbs().rowwise().sum().maxCoeff();
        c += shift * q * q.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw SolverError("dense eigensolver did not converge");
        lambda = es.eigenvalues()[0];
    }
    if (!(lambda > 0.0)) throw SolverError("eigenproblem returned a non-positive smallest eigenvalue");
    return 1.0 / lambda;
}

InequalityReport hardy_check(const ScalarField& f, double eps)
{
    if (!(eps > 0.0)) throw PreconditionError("Hardy parameter eps must be positive");
    const MeridianGrid& g = f.grid();
    ScalarField q(f.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) q(i, j) = f(i, j) / g.rho(i);
    const double lhs = l2_sq(q);
    const double rhs = (4.0 + eps) * l2_sq(d_rho(f)) + (40.0 + 16.0 / eps) * l2_sq(f);
    return make_report("hardy", g.domain().alpha, g.nr(), lhs, rhs, 4.0 + eps, 1e-10 * (lhs + rhs));
}

CurlGradHypotheses curl_grad_hypotheses(const VectorField& u)
{
    const double gscale = std::sqrt(grad_sq(grad_vector(u)));
    const double vscale = gradient_scale(u);
    const double l2u = l2(u);
    CurlGradHypotheses h{0.0, 0.0, 0.0};
    if (gscale > 0.0) h.divergence = l2(divergence(u)) / gscale;
    if (vscale > 0.0) h.slip = slip_residuals(u).max() / vscale;
    if (l2u > 0.0) h.symmetry = eoo_project(u).residual / l2u;
    return h;
}

InequalityReport curl_grad_check(const VectorField& u, const CurlGradOptions& opt)
{
    const MeridianGrid& g = u.grid();
    if (g.domain().alpha > kPi / 6.0 + 1e-15) throw PreconditionError("curl-gradient bound needs alpha <= pi/6");
    const double lhs = std::sqrt(grad_sq(grad_vector(u)));
    const double rhs = std::sqrt(3.0) * l2(curl(u));
    const double h = g.h();
    const double hyp_tol = opt.c_hypothesis * h;
    const CurlGradHypotheses hy = curl_grad_hypotheses(u);
    if (hy.divergence > hyp_tol) throw HypothesisViolation("divergence-free", lhs, rhs, hy.divergence);
    if (hy.slip > hyp_tol) throw HypothesisViolation("slip boundary condition", lhs, rhs, hy.slip);
    if (hy.symmetry > hyp_tol) throw HypothesisViolation("even-odd-odd symmetry", lhs, rhs, hy.symmetry);
    return make_report("curl_grad", g.domain().alpha, g.nr(), lhs, rhs, std::sqrt(3.0), opt.c_tol * h * lhs);
}

InequalityReport poincare_field_check(const ScalarField& u, PoincareSubspace mode, double c_tol)
{
    const MeridianGrid& g = u.grid();
    const double alpha = g.domain().alpha;
    const double hp = g.hphi();
    if (mode == PoincareSubspace::MeanZero) {
        const std::vector<double> mean = per_radius_mean(u);
        for (int i = 0; i < g.nr(); ++i) {
            double mass = 0.0;
            for (int j = 0; j < g.nphi(); ++j) mass += g.phi_trap()[j] * g.sin_phi(j) * std::abs(u(i, j));
            if (std::abs(mean[i]) > 1e-8 * mass + 1e-300)
                throw HypothesisViolation("zero weighted mean on every sphere", 0.0, 0.0, std::abs(mean[i]));
        }
    } else {
        const double tol = 1e-10 * u.max_abs();
        for (int i = 0; i < g.nr(); ++i)
            if (std::abs(u(i, 0)) > tol || std::abs(u(i, g.nphi() - 1)) > tol)
                throw HypothesisViolation("zero trace on the conical walls", 0.0, 0.0,
                                          std::max(std::abs(u(i, 0)), std::abs(u(i, g.nphi() - 1))));
    }
    const double c = mode == PoincareSubspace::MeanZero ? poincare_const_A(alpha) : poincare_const_B(alpha);
    ScalarField a(u.grid_ptr()), b = d_phi(u);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            a(i, j) = u(i, j) / g.rho(i);
            b(i, j) /= g.rho(i);
        }
    const double lhs = l2_sq(a);
    const double rhs = c * l2_sq(b);
    const char* name = mode == PoincareSubspace::MeanZero ? "poincare_mean_zero" : "poincare_dirichlet";
    return make_report(name, alpha, g.nphi(), lhs, rhs, c, c_tol * hp * hp * rhs);
}

double h1_equivalence_ratio(const VectorField& v)
{
    const double whole = h1(v);
    if (whole == 0.0) return 1.0;
    return (h1(v.rho) + h1(v.phi) + h1(v.theta)) / whole;
}

double h1_equivalence_constant(const MeridianDomain& d)
{
    // The gradient matrix differs from the componentwise gradients by terms
    // bounded by (3 + 2 tan^2 a) m^2 |v|^2 pointwise.
    const double t = std::tan(d.alpha);
    const double c2 = std::max(2.0, 1.0 + 2.0 * (3.0 + 2.0 * t * t) * d.m * d.m);
    return std::sqrt(3.0 * c2);
}

VectorField eoo_stream_field(GridPtr g, const EooFlowParams& p)
{
    const MeridianDomain& d = g->domain();
    const double a = 1.0 / d.m, al = d.alpha;
    // H is the antiderivative of s^4 - (a+1) s^3 + a s^2 times (1 + c s).
    const double c = p.swirl_tilt;
    const double h5 = c, h4 = 1.0 - c * (a + 1.0), h3 = c * a - (a + 1.0), h2 = a;
    auto big_h = [&](double r) {
        const double r3 = r * r * r;
        return r3 * (h2 / 3.0 + r * (h3 / 4.0 + r * (h4 / 5.0 + r * h5 / 6.0)));
    };
    return VectorField::sample(g, [&](double rho, double phi) {
        const double s = std::sin(phi), x = phi - kHalfPi;
        double gv = 0.0, dg = 0.0, sv = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double w = (k + 1) * kPi / al;
            const double sx = std::sin(w * x), cx = std::cos(w * x);
            gv += p.stream[k] * sx * sx * sx;
            dg += p.stream[k] * 3.0 * w * sx * sx * cx;
            sv += p.swirl[k] * std::sin((2 * k + 1) * kPi * x / (2.0 * al));
        }
        const double u = rho - a, q = rho - 1.0, t = 1.0 + p.stream_tilt * rho;
        const double r4 = rho * rho * rho * rho;
        const double base = r4 * u * u * u * q * q * q;
        const double dbase = 4.0 * rho * rho * rho * u * u * u * q * q * q + 3.0 * r4 * u * u * q * q * q +
                             3.0 * r4 * u * u * u * q * q;
        const double f = base * t, df = dbase * t + base * p.stream_tilt;
        return Vec3{f * dg / (rho * rho * s), -df * gv / (rho * s), big_h(rho) * sv / (rho * s)};
    });
}

EooFlowParams random_eoo_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    EooFlowParams p;
    p.stream = {u(rng), 0.5 * u(rng)};
    p.stream_tilt = 0.5 * u(rng);
    // Swirl scaled to the size of the meridional part.
    p.swirl = {0.5 * u(rng), 0.25 * u(rng)};
    p.swirl_tilt = 0.5 * u(rng);
    return p;
}

ScalarField random_smooth_scalar(GridPtr g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0), ph(0.0, 2.0 * kPi);
    const MeridianDomain& d = g->domain();
    const double lr = d.rho_max() - d.rho_min(), lp = 2.0 * d.alpha;
    double c[4][4], pr[4][4], pp[4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            c[a][b] = u(rng) / (1.0 + a * a + b * b);
            pr[a][b] = ph(rng);
            pp[a][b] = ph(rng);
        }
    return ScalarField::sample(g, [&](double rho, double phi) {
        const double y = (rho - d.rho_min()) / lr, z = (phi - d.phi1()) / lp;
        double s = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                s += c[a][b] * std::cos(a * kPi * y + pr[a][b]) * std::cos(b * kPi * z + pp[a][b]);
        return s;
    });
}

}  // namespace coneflow

#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "coneflow/analytic.hpp"
#include "coneflow/elliptic.hpp"
#include "coneflow/errors.hpp"
#include "coneflow/operators.hpp"

using namespace coneflow;

namespace {

GridPtr grid(int n) { return MeridianGrid::create(make_domain(kPi / 6.0, 2), n, n); }

// Scalar Laplacian in flux form.
EllipticProblem laplace(GridPtr g)
{
    EllipticProblem p;
    p.grid = std::move(g);
    p.a_r = [](double r, double) { return 1.0 / (r * r); };
    p.p_r = [](double r, double) { return r * r; };
    p.a_p = [](double r, double ph) { return 1.0 / (r * r * std::sin(ph)); };
    p.p_p = [](double, double ph) { return std::sin(ph); };
    return p;
}

double max_err(const ScalarField& f, const ScalarField& e)
{
    double m = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k] - e[k]));
    return m;
}

// u = sin(3 rho) cos(phi): Laplacian (g'' + 2 g'/rho - 2 g/rho^2) cos(phi).
double dirichlet_error(int n)
{
    const GridPtr g = grid(n);
    auto gfun = [](double r) { return std::sin(3.0 * r); };
    const ScalarField exact = ScalarField::sample(g, [&](double r, double p) { return gfun(r) * std::cos(p); });
    EllipticProblem p = laplace(g);
    p.r1 = p.r2 = p.a1 = p.a2 = EdgeBc::dirichlet();
    for (int j = 0; j < n; ++j) {
        p.a1.data.push_back(exact(0, j));
        p.a2.data.push_back(exact(n - 1, j));
    }
    for (int i = 0; i < n; ++i) {
        p.r1.data.push_back(exact(i, 0));
        p.r2.data.push_back(exact(i, n - 1));
    }
    const ScalarField f = ScalarField::sample(g, [](double r, double ph) {
        const double s = std::sin(3.0 * r), c = std::cos(3.0 * r);
        return (-9.0 * s + 6.0 * c / r - 2.0 * s / (r * r)) * std::cos(ph);
    });
    SolveStats st;
    const ScalarField u = EllipticSolver(p).solve(f, &st);
    CHECK(st.iterations == 1);
    CHECK(st.residual < 1e-10);
    return max_err(u, exact);
}

// u = sin(3 rho): Neumann walls, Dirichlet inner sphere, Robin or Neumann outer sphere.
double radial_error(int n, bool robin)
{
    const GridPtr g = grid(n);
    const ScalarField exact = ScalarField::sample(g, [](double r, double) { return std::sin(3.0 * r); });
    EllipticProblem p = laplace(g);
    p.r1 = p.r2 = EdgeBc::neumann(0.0);
    p.a1 = EdgeBc::dirichlet(std::sin(1.5));
    p.a2 = robin ? EdgeBc::robin(3.0 * std::cos(3.0) / std::sin(3.0)) : EdgeBc::neumann(3.0 * std::cos(3.0));
    const ScalarField f = ScalarField::sample(g, [](double r, double) {
        return -9.0 * std::sin(3.0 * r) + 6.0 * std::cos(3.0 * r) / r;
    });
    return max_err(EllipticSolver(p).solve(f), exact);
}

}  // namespace

TEST_CASE("Dirichlet Poisson solve converges at second order")
{
    const double e1 = dirichlet_error(33), e2 = dirichlet_error(65);
    CHECK(e2 < 1e-4);
    CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("Neumann and Robin closures converge at second order")
{
    for (bool robin : {false, true}) {
        const double e1 = radial_error(33, robin), e2 = radial_error(65, robin);
        CHECK(e2 < 1e-3);
        CHECK(std::log2(e1 / e2) > 1.8);
    }
}

TEST_CASE("pure Neumann problem is refused as singular")
{
    EllipticProblem p = laplace(grid(17));
    p.r1 = p.r2 = p.a1 = p.a2 = EdgeBc::neumann(0.0);
    CHECK_THROWS_AS(EllipticSolver{p}, SolverError);
}

TEST_CASE("apply_operator reproduces the discrete right-hand side")
{
    const GridPtr g = grid(17);
    EllipticProblem p = laplace(g);
    p.r1 = p.r2 = EdgeBc::neumann(0.0);
    p.a1 = p.a2 = EdgeBc::dirichlet(0.0);
    const EllipticSolver s(p);
    const ScalarField rhs = ScalarField::sample(g, [](double r, double) { return r; });
    const ScalarField u = s.solve(rhs);
    const ScalarField lu = apply_operator(s.op(), u);
    for (int j = 0; j < 17; ++j)
        for (int i = 1; i < 16; ++i) CHECK(lu(i, j) == doctest::Approx(rhs(i, j)).epsilon(1e-9));
    CHECK(std::abs(lu(0, 3)) < 1e-14);
}

TEST_CASE("finite-volume phi derivative telescopes")
{
    const GridPtr g = grid(17);
    const ScalarField q = ScalarField::sample(g, [](double r, double p) { return r * std::exp(p); });
    const ScalarField d = fv_d_phi(q);
    for (int i = 0; i < 17; ++i) {
        double s = 0.0;
        for (int j = 0; j < 17; ++j) s += g->phi_trap()[j] * d(i, j);
        CHECK(s == doctest::Approx(q(i, 16) - q(i, 0)).epsilon(1e-13));
    }
}

TEST_CASE("Biot-Savart recovers a divergence-free meridional flow")
{
    auto run = [](int n) {
        const GridPtr g = grid(n);
        const double a = 0.5, al = kPi / 6.0;
        const ScalarField om = ScalarField::sample(g, [&](double r, double p) {
            return std::sin(kPi * (r - a) / (1.0 - a)) * std::sin(kPi * (p - kHalfPi) / al);
        });
        const AssembledVelocity av = assemble_b(om);
        const ScalarField w = curl(av.b).theta;
        double gap = 0.0;
        for (int j = 2; j + 2 < n; ++j)
            for (int i = 2; i + 2 < n; ++i)
                gap = std::max(gap, std::abs(w(i, j) - g->rho(i) * g->sin_phi(j) * om(i, j)));
        CHECK(av.audit.mean_max < 1e-12);
        CHECK(parity_defect(av.b.rho, +1) < 1e-12);
        CHECK(parity_defect(av.b.phi, -1) < 1e-12);
        CHECK(av.b.theta.max_abs() == 0.0);
        return std::array<double, 2>{gap, av.audit.div_l2};
    };
    const auto c = run(33), f = run(65);
    CHECK(std::log2(c[0] / f[0]) > 1.8);
    CHECK(std::log2(c[1] / f[1]) > 1.5);
}

TEST_CASE("Biot-Savart refuses vorticity that does not vanish on the edges")
{
    const GridPtr g = grid(17);
    CHECK_THROWS_AS(solve_vrho(ScalarField(g, 1.0)), PreconditionError);
    CHECK_THROWS_AS(solve_vphi(ScalarField(g, 1.0)), PreconditionError);
}

TEST_CASE("pressure of the stationary swirl")
{
    auto err = [](int n) {
        const GridPtr g = grid(n);
        const SwirlSolution s = stationary_swirl(g);
        const PressureResult pr = recover_pressure(s.v, VectorField(g));
        const double mean = integrate(s.p) / volume(*g);
        CHECK_FALSE(pr.warning);
        CHECK(pr.loop_defect <= pr.defect_limit);
        CHECK(std::abs(integrate(pr.p)) < 1e-12);
        return max_err(pr.p, s.p - ScalarField(g, mean));
    };
    const double e1 = err(33), e2 = err(65);
    CHECK(e2 < 1e-3);
    CHECK(std::log2(e1 / e2) > 1.8);
}

#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "coneflow/errors.hpp"
#include "coneflow/operators.hpp"

using namespace coneflow;

namespace {

GridPtr grid(int n, double alpha = kPi / 6.0) { return MeridianGrid::create(make_domain(alpha, 2), n, n); }

double max_err(const ScalarField& f, const std::function<double(double, double)>& exact)
{
    const MeridianGrid& g = f.grid();
    double e = 0.0;
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) e = std::max(e, std::abs(f(i, j) - exact(g.rho(i), g.phi(j))));
    return e;
}

// Observed order between n = 33 and n = 65.
double order(const std::function<double(const GridPtr&)>& err)
{
    const double e1 = err(grid(33)), e2 = err(grid(65));
    return std::log2(e1 / e2);
}

// Cartesian (xz, yz, x^2 + y^2) plus swirl (-yz, xz, 0), in spherical components.
Vec3 oracle_v(double r, double p)
{
    const double s = std::sin(p), c = std::cos(p);
    return {2.0 * r * r * s * s * c, r * r * s * (c * c - s * s), r * r * s * c};
}

}  // namespace

TEST_CASE("grid layout is phi-major with a mirrored equator")
{
    const GridPtr g = grid(9);
    CHECK(g->idx(3, 2) == 2u * 9u + 3u);
    CHECK(g->phi(4) == doctest::Approx(kHalfPi).epsilon(1e-15));
    for (int j = 0; j < 9; ++j) {
        CHECK(g->sin_phi(j) == g->sin_phi(g->mirror(j)));
        CHECK(g->cot_phi(j) == -g->cot_phi(g->mirror(j)));
    }
    CHECK(g->rho(0) == 0.5);
    CHECK(g->rho(8) == 1.0);
    CHECK(g->label(0, 4) == BoundaryLabel::A1);
    CHECK(g->label(4, 0) == BoundaryLabel::R1);
    CHECK(g->label(8, 8) == BoundaryLabel::Corner);
    CHECK_THROWS_AS(MeridianGrid(make_domain(0.5, 2), 9, 10), PreconditionError);
    CHECK_THROWS_AS(MeridianGrid(make_domain(0.5, 2), 2, 9), PreconditionError);
    CHECK_THROWS_AS(ScalarField(g, std::vector<double>(3)), PreconditionError);
}

TEST_CASE("volume quadrature converges to the cone-shell volume")
{
    const double exact = 2.0 * kPi / 3.0 * (1.0 - 1.0 / 8.0) * 2.0 * std::sin(kPi / 6.0);
    const double e1 = std::abs(volume(*grid(33)) - exact), e2 = std::abs(volume(*grid(65)) - exact);
    CHECK(e2 < 1e-3 * exact);
    CHECK(std::log2(e1 / e2) > 1.9);
    const GridPtr g = grid(33);
    CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(volume(*g)));
    CHECK(l2_sq(ScalarField(g, 2.0)) == doctest::Approx(4.0 * volume(*g)));
    CHECK(linf(ScalarField::sample(g, [](double r, double) { return -3.0 * r; })) == doctest::Approx(3.0));
}

TEST_CASE("scalar Laplacian oracles")
{
    const GridPtr g = grid(33);
    const ScalarField q = laplacian_scalar(ScalarField::sample(g, [](double r, double) { return r * r; }));
    CHECK(max_err(q, [](double, double) { return 6.0; }) < 1e-9);
    auto harmonic = [](const GridPtr& gg) {
        return laplacian_scalar(ScalarField::sample(gg, [](double r, double p) { return r * std::cos(p); })).max_abs();
    };
    CHECK(harmonic(grid(65)) < 1e-2);
    CHECK(order(harmonic) > 1.8);
    auto fund = [](const GridPtr& gg) {
        return laplacian_scalar(ScalarField::sample(gg, [](double r, double) { return 1.0 / r; })).max_abs();
    };
    CHECK(fund(grid(65)) < 5e-2);
    CHECK(order(fund) > 1.8);
}

TEST_CASE("gradient, divergence and curl against a Cartesian oracle")
{
    auto div_err = [](const GridPtr& g) {
        return max_err(divergence(VectorField::sample(g, oracle_v)),
                       [](double r, double p) { return 2.0 * r * std::cos(p); });
    };
    CHECK(div_err(grid(65)) < 1e-2);
    CHECK(order(div_err) > 1.8);

    auto curl_err = [](const GridPtr& g) {
        const VectorField w = curl(VectorField::sample(g, oracle_v));
        return std::max({max_err(w.rho, [](double r, double p) {
                             const double s = std::sin(p), c = std::cos(p);
                             return r * (2.0 * c * c - s * s);
                         }),
                         max_err(w.phi, [](double r, double p) { return -3.0 * r * std::sin(p) * std::cos(p); }),
                         max_err(w.theta, [](double r, double p) { return -r * std::sin(p); })});
    };
    CHECK(curl_err(grid(65)) < 1e-3);
    CHECK(order(curl_err) > 1.8);

    // the discrete curl and gradient commute, so this vanishes to rounding
    auto cg = [](const GridPtr& g) {
        const ScalarGradient gr =
            grad_scalar(ScalarField::sample(g, [](double r, double p) { return r * r * r * std::sin(3.0 * p); }));
        return curl(VectorField{gr.rho, gr.phi, ScalarField(g)}).theta.max_abs();
    };
    CHECK(cg(grid(65)) < 1e-10);

    // likewise the divergence of a curl
    auto dc = [](const GridPtr& g) {
        const VectorField w = curl(VectorField::sample(g, [](double r, double p) {
            return Vec3{std::sin(2.0 * r) * std::cos(p), r * r * std::sin(p), std::exp(r) * std::cos(2.0 * p)};
        }));
        return divergence(w).max_abs();
    };
    CHECK(dc(grid(65)) < 1e-9);
}

TEST_CASE("vector Laplacian oracles")
{
    auto lap_err = [](const GridPtr& g) {
        const VectorField l = laplacian_vector(VectorField::sample(g, oracle_v));
        return std::max({max_err(l.rho, [](double, double p) { return 4.0 * std::cos(p); }),
                         max_err(l.phi, [](double, double p) { return -4.0 * std::sin(p); }),
                         max_err(l.theta, [](double, double) { return 0.0; })});
    };
    CHECK(lap_err(grid(65)) < 1e-2);
    CHECK(order(lap_err) > 1.8);

    auto swirl = [](const GridPtr& g) {
        return laplacian_divfree(VectorField::sample(g, [](double r, double p) {
                   return Vec3{0.0, 0.0, 1.0 / (r * std::sin(p))};
               })).theta.max_abs();
    };
    CHECK(swirl(grid(65)) < 0.1);
    CHECK(order(swirl) > 1.8);

    auto radial = [](const GridPtr& g) {
        return laplacian_divfree(VectorField::sample(g, [](double r, double) {
                   return Vec3{1.0 / (r * r), 0.0, 0.0};
               })).rho.max_abs();
    };
    CHECK(order(radial) > 1.8);
}

TEST_CASE("convection oracles")
{
    const GridPtr g = grid(33);
    const VectorField er = VectorField::sample(g, [](double, double) { return Vec3{1.0, 0.0, 0.0}; });
    const ScalarField rho = ScalarField::sample(g, [](double r, double) { return r; });
    CHECK(max_err(convect(er, rho), [](double, double) { return 1.0; }) < 1e-12);
    CHECK(convect(VectorField(g), rho).max_abs() == 0.0);
    const VectorField x = VectorField::sample(g, [](double r, double) { return Vec3{r, 0.0, 0.0}; });
    const VectorField xx = convect_vector(x);
    CHECK(max_err(xx.rho, [](double r, double) { return r; }) < 1e-12);
    CHECK(xx.phi.max_abs() < 1e-12);
}

TEST_CASE("derived quantities of the stationary swirl")
{
    const GridPtr g = grid(33);
    const VectorField v = VectorField::sample(g, [](double r, double p) { return Vec3{0.0, 0.0, 1.0 / (r * std::sin(p))}; });
    const DerivedQuantities d = derived_quantities(v, curl(v));
    CHECK(max_err(d.gamma, [](double, double) { return 1.0; }) < 1e-14);
    CHECK(d.k.max_abs() < 1e-9);
    CHECK(d.f.max_abs() < 1e-9);
    CHECK(d.omega.max_abs() < 1e-12);
}

TEST_CASE("parity tools")
{
    const GridPtr g = grid(17);
    const ScalarField even = ScalarField::sample(g, [](double r, double p) { return r * std::cos(2.0 * (p - kHalfPi)); });
    const ScalarField odd = ScalarField::sample(g, [](double r, double p) { return r * std::sin(p - kHalfPi); });
    CHECK(parity_defect(even, +1) == 0.0);
    CHECK(parity_defect(odd, -1) == 0.0);
    CHECK(parity_defect(even, -1) > 0.1);
    const ScalarField re = reflect(odd);
    for (std::size_t k = 0; k < re.size(); ++k) CHECK(re[k] == -odd[k]);

    const EooProjection clean = eoo_project(VectorField{even, odd, odd});
    CHECK(clean.residual == 0.0);
    const EooProjection dirty = eoo_project(VectorField{odd, even, odd});
    CHECK(dirty.residual > 0.1);
    CHECK(parity_defect(dirty.field.rho, +1) < 1e-15);
    CHECK(parity_defect(dirty.field.phi, -1) < 1e-15);
}

TEST_CASE("per-radius mean and slip residuals")
{
    const GridPtr g = grid(33);
    const std::vector<double> m = per_radius_mean(ScalarField::sample(g, [](double, double p) { return std::cos(p); }));
    for (double x : m) CHECK(std::abs(x) < 1e-14);
    const std::vector<double> one = per_radius_mean(ScalarField(g, 1.0));
    CHECK(one.front() == doctest::Approx(2.0 * std::sin(kPi / 6.0)).epsilon(1e-3));

    const VectorField bad = VectorField::sample(g, [](double, double) { return Vec3{1.0, 0.0, 0.0}; });
    const EdgeResiduals e = slip_residuals(bad);
    CHECK(e.a1 == doctest::Approx(1.0));
    CHECK(e.a2 == doctest::Approx(1.0));
    CHECK(e.r1 < 1e-12);
    CHECK(e.max() == doctest::Approx(1.0));
    CHECK(gradient_scale(bad) >= 1.0);
}

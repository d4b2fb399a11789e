#include <doctest.h>

#include <cmath>

#include "coneflow/analytic.hpp"
#include "coneflow/operators.hpp"
#include "coneflow/parabolic.hpp"

using namespace coneflow;

namespace {

GridPtr grid(int n) { return MeridianGrid::create(make_domain(kPi / 6.0, 2), n, n); }

// Neumann eigenmode of the swirl-flux operator: cos(pi (rho - 1/2) / (1/2)).
ScalarField mode(const GridPtr& g) { return ScalarField::sample(g, [](double r, double) { return std::cos(2.0 * kPi * (r - 0.5)); }); }

ScalarField heat(const GridPtr& g, double dt, TimeScheme s, double t_end)
{
    const ThetaStepper st(gamma_operator(g), {dt, s, 0.5, 0});
    ScalarField u = mode(g);
    const ScalarField zero(g);
    const int n = static_cast<int>(std::lround(t_end / dt));
    for (int k = 0; k < n; ++k) u = st.step(u, zero);
    return u;
}

double diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("theta stepper temporal order")
{
    const GridPtr g = grid(33);
    const double t = 0.02;
    for (auto [s, lo] : {std::pair{TimeScheme::CrankNicolson, 1.8}, std::pair{TimeScheme::BackwardEuler, 0.9}}) {
        const ScalarField a = heat(g, 2e-3, s, t), b = heat(g, 1e-3, s, t), c = heat(g, 5e-4, s, t);
        CHECK(std::log2(diff(a, b) / diff(b, c)) > lo);
    }
}

TEST_CASE("decaying mode matches its exact rate")
{
    const GridPtr g = grid(65);
    const double t = 0.02, lambda = 4.0 * kPi * kPi;
    const ScalarField u = heat(g, 2.5e-4, TimeScheme::CrankNicolson, t);
    CHECK(diff(u, mode(g) * std::exp(-lambda * t)) < 2e-3);
}

TEST_CASE("swirl flux obeys a maximum principle without drift")
{
    const GridPtr g = grid(33);
    const GammaStepper st(g, {1e-3, TimeScheme::BackwardEuler, 0.5, 0});
    ScalarField gm = ScalarField::sample(g, [](double r, double p) { return r * std::cos(4.0 * (p - kHalfPi)) + std::sin(9.0 * r); });
    double m = gm.max_abs();
    for (int k = 0; k < 20; ++k) {
        gm = st.step(gm, VectorField(g));
        CHECK(gm.max_abs() <= m * (1.0 + 1e-12));
        m = gm.max_abs();
    }
}

TEST_CASE("CFL guard")
{
    const GridPtr g = grid(17);
    const VectorField fast = VectorField::sample(g, [](double, double) { return Vec3{100.0, 0.0, 0.0}; });
    CHECK(advective_cfl(fast, 1e-3) == doctest::Approx(100.0 * 1e-3 / g->hr()));
    CHECK_THROWS_AS(check_cfl(fast, {1e-3, TimeScheme::CrankNicolson, 0.5, 0}), CflViolation);
    CHECK_THROWS_AS(GammaStepper(g, {1e-3, TimeScheme::CrankNicolson, 0.5, 0}).step(ScalarField(g), fast), CflViolation);
    CHECK_THROWS_AS(ThetaStepper(gamma_operator(g), {0.0, TimeScheme::CrankNicolson, 0.5, 0}), PreconditionError);
}

TEST_CASE("angular vorticity source vanishes for the stationary swirl")
{
    auto src = [](int n) { return omega_source(stationary_swirl(grid(n)).v.theta).max_abs(); };
    CHECK(src(65) < 0.1);
    CHECK(std::log2(src(33) / src(65)) > 1.8);
}

TEST_CASE("vorticity stepper keeps zero edge values")
{
    const GridPtr g = grid(17);
    const OmegaStepper st(g, {1e-3, TimeScheme::CrankNicolson, 0.5, 0});
    const ScalarField vt = ScalarField::sample(g, [](double r, double p) { return r * std::sin(3.0 * (p - kHalfPi)); });
    const ScalarField w = st.step(ScalarField(g), VectorField(g), vt, vt);
    for (int i = 0; i < 17; ++i) {
        CHECK(w(i, 0) == 0.0);
        CHECK(w(i, 16) == 0.0);
        CHECK(w(0, i) == 0.0);
        CHECK(w(16, i) == 0.0);
    }
    CHECK(w.max_abs() > 0.0);
}

TEST_CASE("swirl flux recovers the swirl velocity")
{
    const GridPtr g = grid(17);
    const ScalarField v = vtheta_from_gamma(ScalarField(g, 1.0));
    for (int j = 0; j < 17; ++j)
        for (int i = 0; i < 17; ++i) CHECK(v(i, j) == doctest::Approx(1.0 / (g->rho(i) * g->sin_phi(j))));
    CHECK(omega_theta_residual(VectorField(g), ScalarField(g), ScalarField(g)).max_abs() == 0.0);
}

#include <doctest.h>

#include <cmath>

#include "coneflow/analytic.hpp"
#include "coneflow/errors.hpp"
#include "coneflow/operators.hpp"

using namespace coneflow;

TEST_CASE("stationary swirl fields")
{
    const GridPtr g = MeridianGrid::create(make_domain(kPi / 6.0, 2), 17, 17);
    const SwirlSolution s = stationary_swirl(g);
    CHECK(s.v.rho.max_abs() == 0.0);
    CHECK(s.v.phi.max_abs() == 0.0);
    CHECK(s.v.theta(0, 8) == doctest::Approx(2.0));
    CHECK(s.p(16, 8) == doctest::Approx(-0.5));
    auto div = [](int n) {
        return divergence(stationary_swirl(MeridianGrid::create(make_domain(kPi / 6.0, 2), n, n)).v).max_abs();
    };
    CHECK(div(33) < 1e-12);
}

TEST_CASE("ramp profile")
{
    const EtaProfile eta;
    CHECK(eta(0.5) == 0.0);
    CHECK(eta(1.0) == 0.0);
    CHECK(eta(2.0) == 1.0);
    CHECK(eta(3.0) == 1.0);
    CHECK(eta(1.5) == doctest::Approx(0.5));
    for (double t : {1.1, 1.3, 1.6, 1.9}) {
        const double h = 1e-6;
        CHECK(eta.derivative(t) == doctest::Approx((eta(t + h) - eta(t - h)) / (2.0 * h)).epsilon(1e-6));
        CHECK(eta(t) > 0.0);
        CHECK(eta(t) < 1.0);
    }
    CHECK(eta.derivative(0.5) == 0.0);
    CHECK(eta.derivative(2.5) == 0.0);
}

TEST_CASE("cusp solution fields")
{
    const CuspFields c = cusp_blowup(0.25, 2.5);
    CHECK(c.v_theta == 4.0);
    CHECK(c.pressure == doctest::Approx(-8.0));
    CHECK(c.forcing == 0.0);
    const CuspFields q = cusp_blowup(0.5, 0.5);
    CHECK(q.v_theta == 0.0);
    CHECK_THROWS_AS(cusp_blowup(0.0, 1.5), PreconditionError);
}

TEST_CASE("cusp residuals converge at second order on every slab")
{
    const CuspDomain d = make_cusp_domain(3.0, 6);
    for (int j = 1; j <= 6; ++j)
        for (double t : {1.25, 1.75}) {
            const SlabResidual a = cusp_slab_residual(d, j, t, 33), b = cusp_slab_residual(d, j, t, 65);
            CHECK(std::log2(a.swirl / b.swirl) > 1.8);
            CHECK(std::log2(a.radial / b.radial) > 1.8);
            CHECK(b.swirl < 1e-2);
        }
    CHECK(cusp_slab_residual(d, 4, 2.5, 17).v_max == doctest::Approx(16.0));
    CHECK(cusp_slab_residual(d, 2, 0.5, 17).v_max == 0.0);
    CHECK_THROWS_AS(cusp_slab_residual(d, 1, 1.5, 4), PreconditionError);
}

TEST_CASE("cusp energy is finite while the dissipation grows")
{
    const CuspDomain d = make_cusp_domain(3.0, 12);
    const CuspEnergy e = cusp_energy(d, 2.5, 257);
    for (std::size_t j = 0; j < e.slab_energy.size(); ++j) {
        CHECK(e.slab_energy[j] == doctest::Approx(e.energy_closed[j]).epsilon(1e-4));
        CHECK(e.slab_dissipation[j] == doctest::Approx(e.dissipation_closed[j]).epsilon(1e-4));
    }
    CHECK(e.energy_partial.back() <= e.energy_bound);
    for (double r : e.energy_ratio) CHECK(r == doctest::Approx(0.125).epsilon(1e-6));
    for (double r : e.dissipation_ratio) CHECK(r == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(cusp_energy(make_cusp_domain(2.0, 4), 2.5, 17), PreconditionError);
}

#include "coneflow/geometry.hpp"

#include <cmath>
#include <string>

#include "coneflow/errors.hpp"

namespace coneflow {

MeridianDomain make_domain(double alpha, int m, bool for_solver)
{
    if (!(alpha > 0.0) || !(alpha < kHalfPi))
        throw PreconditionError("half-angle must lie in (0, pi/2), got " + std::to_string(alpha));
    if (for_solver && alpha > kPi / 6.0 + 1e-14)
        throw PreconditionError("solver runs need half-angle <= pi/6, got " + std::to_string(alpha));
    if (m < 2)
        throw PreconditionError("inner-radius index m must be >= 2, got " + std::to_string(m));
    return MeridianDomain{alpha, m};
}

CuspDomain make_cusp_domain(double beta, int depth)
{
    if (!(beta > 1.0))
        throw PreconditionError("cusp exponent must exceed 1, got " + std::to_string(beta));
    if (depth < 1)
        throw PreconditionError("cusp depth must be positive");
    return CuspDomain{beta, depth};
}

Spherical to_spherical(const Cylindrical& p)
{
    if (p.r < 0.0)
        throw PreconditionError("cylindrical radius must be non-negative");
    return {std::hypot(p.r, p.x3), std::atan2(p.r, p.x3), p.theta};
}

Cylindrical to_cylindrical(const Spherical& p)
{
    return {p.rho * std::sin(p.phi), p.theta, p.rho * std::cos(p.phi)};
}

Vec3 to_cartesian(const Spherical& p)
{
    const double r = p.rho * std::sin(p.phi);
    return {r * std::cos(p.theta), r * std::sin(p.theta), p.rho * std::cos(p.phi)};
}

Spherical cartesian_to_spherical(const Vec3& x)
{
    const double r = std::hypot(x[0], x[1]);
    return {std::hypot(r, x[2]), std::atan2(r, x[2]), std::atan2(x[1], x[0])};
}

SphericalBasis spherical_basis(double phi, double theta)
{
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double st = std::sin(theta), ct = std::cos(theta);
    return {{sp * ct, sp * st, cp}, {cp * ct, cp * st, -sp}, {-st, ct, 0.0}};
}

const char* label_name(BoundaryLabel b)
{
    switch (b) {
    case BoundaryLabel::R1: return "R1";
    case BoundaryLabel::R2: return "R2";
    case BoundaryLabel::A1: return "A1";
    case BoundaryLabel::A2: return "A2";
    case BoundaryLabel::Interior: return "Interior";
    case BoundaryLabel::Corner: return "Corner";
    }
    return "?";
}

BoundaryLabel classify_boundary(double rho, double phi, const MeridianDomain& d, double tol)
{
    const double rs = tol * (d.rho_max() - d.rho_min());
    const double ps = tol * (d.phi2() - d.phi1());
    if (rho < d.rho_min() - rs || rho > d.rho_max() + rs || phi < d.phi1() - ps || phi > d.phi2() + ps)
        throw PreconditionError("node lies outside the closed meridian rectangle");
    const bool a1 = std::abs(rho - d.rho_min()) <= rs;
    const bool a2 = std::abs(rho - d.rho_max()) <= rs;
    const bool r1 = std::abs(phi - d.phi1()) <= ps;
    const bool r2 = std::abs(phi - d.phi2()) <= ps;
    if ((a1 || a2) && (r1 || r2)) return BoundaryLabel::Corner;
    if (a1) return BoundaryLabel::A1;
    if (a2) return BoundaryLabel::A2;
    if (r1) return BoundaryLabel::R1;
    if (r2) return BoundaryLabel::R2;
    return BoundaryLabel::Interior;
}

SlabExtent cusp_slab(int j, const CuspDomain& d)
{
    if (j < 1 || j > d.depth)
        throw PreconditionError("slab index out of range: " + std::to_string(j));
    return {std::ldexp(1.0, -j), std::ldexp(1.0, -(j - 1)), std::pow(2.0, -d.beta * (j - 1))};
}

}  // namespace coneflow

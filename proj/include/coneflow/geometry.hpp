#pragma once

#include <array>
#include <numbers>

namespace coneflow {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

using Vec3 = std::array<double, 3>;

// Truncated cone sector: 1/m < rho < 1, |phi - pi/2| < alpha.
struct MeridianDomain {
    double alpha = kPi / 6.0;
    int m = 2;

    double phi1() const { return kHalfPi - alpha; }
    double phi2() const { return kHalfPi + alpha; }
    double rho_min() const { return 1.0 / m; }
    double rho_max() const { return 1.0; }
};

// Construction-only domains accept alpha < pi/2; solver runs need alpha <= pi/6.
MeridianDomain make_domain(double alpha, int m, bool for_solver = false);

struct CuspDomain {
    double beta = 3.0;
    int depth = 10;
};

CuspDomain make_cusp_domain(double beta, int depth);

struct Cylindrical {
    double r, theta, x3;
};

struct Spherical {
    double rho, phi, theta;
};

Spherical to_spherical(const Cylindrical& p);
Cylindrical to_cylindrical(const Spherical& p);
Vec3 to_cartesian(const Spherical& p);
Spherical cartesian_to_spherical(const Vec3& x);

struct SphericalBasis {
    Vec3 e_rho, e_phi, e_theta;
};

SphericalBasis spherical_basis(double phi, double theta);

enum class BoundaryLabel { R1, R2, A1, A2, Interior, Corner };

const char* label_name(BoundaryLabel b);

// Tolerance is relative to the edge spacing; callers on a grid pass exact node coordinates.
BoundaryLabel classify_boundary(double rho, double phi, const MeridianDomain& d, double tol = 1e-12);

struct SlabExtent {
    double r_lo, r_hi;   // [r_lo, r_hi)
    double x3_hi;        // (0, x3_hi)
};

SlabExtent cusp_slab(int j, const CuspDomain& d);

}  // namespace coneflow

#pragma once

#include <vector>

#include "coneflow/geometry.hpp"
#include "coneflow/grid.hpp"

namespace coneflow {

struct SwirlSolution {
    VectorField v;  // (1 / (rho sin phi)) e_theta
    ScalarField p;  // -1 / (2 rho^2 sin^2 phi)
};
SwirlSolution stationary_swirl(GridPtr g);

// Smooth ramp: 0 on (-inf, 1], 1 on [2, inf), built from exp(-1/s).
struct EtaProfile {
    double operator()(double t) const;
    double derivative(double t) const;
};

// Exact forced solution on the cusp region: v = (eta/r) e_theta,
// P = -eta^2 / (2 r^2), forcing = -(eta'/r) e_theta.
struct CuspFields {
    double v_theta, pressure, forcing;
};
CuspFields cusp_blowup(double r, double t, const EtaProfile& eta = {});

// Finite-difference residuals on a uniform (r, x3) grid over one slab.
struct SlabResidual {
    int slab = 0;
    int nodes = 0;
    double h = 0.0;         // larger of the two spacings
    double swirl = 0.0;     // max |(Lap - 1/r^2) v_theta - d_t v_theta - f| / scale
    double radial = 0.0;    // max |d_r P - v_theta^2 / r| / scale
    double v_max = 0.0;     // max |v| on the slab nodes
};
// n nodes per direction; residuals are taken at interior nodes only.
SlabResidual cusp_slab_residual(const CuspDomain& d, int j, double t, int n, const EtaProfile& eta = {});

struct CuspEnergy {
    std::vector<double> slab_energy;        // trapezoid quadrature of int |v|^2 per slab
    std::vector<double> slab_dissipation;   // same for int |grad v|^2
    std::vector<double> energy_closed;      // 2 pi eta^2 2^{-beta(j-1)} ln 2
    std::vector<double> dissipation_closed; // 2 pi eta^2 2^{-beta(j-1)} 3 4^{j-1}
    std::vector<double> energy_partial, dissipation_partial;
    std::vector<double> energy_ratio, dissipation_ratio;  // Cauchy quotients of partial sums
    double energy_bound = 0.0;  // 2 pi 2^beta / beta, the bounding integral
};
// Requires beta > 2. n quadrature nodes per direction on every slab.
CuspEnergy cusp_energy(const CuspDomain& d, double t, int n, const EtaProfile& eta = {});

}  // namespace coneflow

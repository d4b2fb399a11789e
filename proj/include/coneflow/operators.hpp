#pragma once

#include <vector>

#include "coneflow/grid.hpp"

namespace coneflow {

// Second-order finite differences; central inside, one-sided at the edges.
ScalarField d_rho(const ScalarField& f);
ScalarField d_phi(const ScalarField& f);
ScalarField d2_rho(const ScalarField& f);
ScalarField d2_phi(const ScalarField& f);

// (d_rho f, (1/rho) d_phi f): the two nonzero components of grad f.
struct ScalarGradient {
    ScalarField rho, phi;
};
ScalarGradient grad_scalar(const ScalarField& f);

GradientField grad_vector(const VectorField& v);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);
ScalarField laplacian_scalar(const ScalarField& f);
// Vector Laplacian with the divergence-free simplification of the rho component.
VectorField laplacian_divfree(const VectorField& v);
// Vector Laplacian without assuming zero divergence.
VectorField laplacian_vector(const VectorField& v);
// b . grad f for a meridional b (theta component ignored).
ScalarField convect(const VectorField& b, const ScalarField& f);
// (v . grad) v including the curvature terms.
VectorField convect_vector(const VectorField& v);

struct DerivedQuantities {
    ScalarField gamma, k, f, omega;
};
// gamma = rho sin(phi) v_theta, k = w_rho/rho, f = w_phi/rho, omega = w_theta/(rho sin(phi)).
DerivedQuantities derived_quantities(const VectorField& v, const VectorField& w);

// Mirror image f(rho, pi - phi).
ScalarField reflect(const ScalarField& f);

struct EooProjection {
    VectorField field;
    double residual;  // weighted L2 norm of the discarded part
};
// v_rho even, v_phi and v_theta odd about the equator.
EooProjection eoo_project(const VectorField& v);
// Weighted L2 norm of the part of f with the wrong parity (+1 even, -1 odd).
double parity_defect(const ScalarField& f, int parity);

// Weighted quadrature with 2*pi*rho^2*sin(phi) (trapezoid in rho and phi).
double integrate(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);
double l2_sq(const ScalarField& f);
double l2(const ScalarField& f);
double l2_sq(const VectorField& v);
double l2(const VectorField& v);
double grad_sq(const ScalarField& f);              // int |grad f|^2
double grad_sq(const GradientField& g);            // int |grad v|^2 (Frobenius)
double h1(const ScalarField& f);
double h1(const VectorField& v);
double l6(const ScalarField& f);
double linf(const ScalarField& f);
double linf(const VectorField& v);                 // sup of the Euclidean magnitude
double volume(const MeridianGrid& g);

// Per-edge maxima of the velocity form of the slip condition:
// walls v_phi, d_phi v_rho, d_phi(sin(phi) v_theta); spheres v_rho,
// d_rho(rho v_phi), d_rho(rho v_theta). Corners count toward both edges.
struct EdgeResiduals {
    double r1 = 0.0, r2 = 0.0, a1 = 0.0, a2 = 0.0;
    double max() const;
};
EdgeResiduals slip_residuals(const VectorField& v);

// Largest gradient entry plus sup|v|: the velocity scale for slip tolerances.
double gradient_scale(const VectorField& v);

// int_{phi1}^{phi2} v_rho(rho_i, phi) sin(phi) dphi for every radius.
std::vector<double> per_radius_mean(const ScalarField& v_rho);

}  // namespace coneflow

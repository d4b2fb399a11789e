#pragma once

#include <string>
#include <vector>

#include "coneflow/grid.hpp"

namespace coneflow {

// Primary unknowns of the evolution: swirl flux, rescaled angular vorticity,
// and the meridional velocity (theta component zero).
struct SimulationState {
    double t = 0.0;
    ScalarField gamma, omega_t;
    VectorField b;

    ScalarField v_theta() const;
    VectorField velocity() const;
};

// Scalar summary of one time level; every integral uses the spherical
// volume weight. Fields prefixed mid_ describe the step that ends at t and
// are evaluated on the time-weighted state of the scheme (zero for the first
// record).
struct StepRecord {
    double t = 0.0;
    double energy = 0.0;       // ||v||^2
    double curl_sq = 0.0;      // ||curl v||^2
    double grad_sq = 0.0;      // ||grad v||^2
    double gamma_max = 0.0;
    double v_max = 0.0;
    double omega_theta_max = 0.0;
    double v_over_rho_l6 = 0.0;  // ||(|v_rho| + |v_phi| + |v_theta|) / rho||_L6
    double k_sq = 0.0, f_sq = 0.0, o_sq = 0.0;
    double grad_k_sq = 0.0, grad_f_sq = 0.0, grad_o_sq = 0.0;
    double eoo_residual = 0.0;   // relative to ||v||
    double div_rel = 0.0;        // ||div b|| / ||grad b||
    double vorticity_gap = 0.0;  // ||curl(b)_theta - rho sin Omega~|| / ||rho sin Omega~||
    // Right-hand sides of the K, F, Omega energy identities at time t.
    double k_rhs = 0.0, f_rhs = 0.0, o_rhs = 0.0;

    double dt = 0.0;  // length of the step ending at t
    double mid_curl_sq = 0.0, mid_grad_sq = 0.0;
    double mid_grad_k_sq = 0.0, mid_grad_f_sq = 0.0, mid_grad_o_sq = 0.0;
    double mid_k_rhs = 0.0, mid_f_rhs = 0.0, mid_o_rhs = 0.0;
    double mid_convective = 0.0;  // int ((v.grad) v) . v
    double mid_v_dvdt = 0.0;      // int v . (v' - v) / dt
};

// Full state stored at the snapshot cadence.
struct Snapshot {
    int step = 0;
    SimulationState state;
};

// Strong-form residuals at one interior snapshot, each relative to the size
// of the largest term in its equation.
struct ResidualRecord {
    double t = 0.0;
    double momentum_rho = 0.0, momentum_phi = 0.0, momentum_theta = 0.0;
    double divergence = 0.0;
    double pressure_loop_defect = 0.0;
    double pressure_defect_limit = 0.0;
    double omega_theta = 0.0;
};

struct WindowRecord {
    double t0 = 0.0, t1 = 0.0;
    int steps = 0;
    int iterations = 0;
    int halvings = 0;
    std::vector<double> diffs;   // ||b^{k+1} - b^k||_E
    std::vector<double> ratios;  // consecutive quotients of diffs
};

struct Trajectory {
    std::vector<StepRecord> steps;
    std::vector<Snapshot> snapshots;
    std::vector<ResidualRecord> residuals;
    std::vector<WindowRecord> windows;
    double gamma0_max = 0.0;
    bool initial_eoo = true;  // initial data passed the symmetry check
    double h = 0.0, dt = 0.0;
    double theta = 0.5;       // time weight of the scheme
};

}  // namespace coneflow

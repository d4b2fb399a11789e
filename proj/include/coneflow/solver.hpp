#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coneflow/elliptic.hpp"
#include "coneflow/geometry.hpp"
#include "coneflow/operators.hpp"
#include "coneflow/parabolic.hpp"
#include "coneflow/trajectory.hpp"

namespace coneflow {

enum class InitialData { Example, Swirl, Zero, Snapshot };

struct SimulationConfig {
    double alpha = kPi / 6.0;
    int m = 2;
    int nr = 65, nphi = 65;
    double t_final = 0.5;
    double window = 0.05;
    double window_floor = 0.05 / 16.0;
    double dt = 1e-3;
    TimeScheme scheme = TimeScheme::CrankNicolson;
    double cfl_safety = 0.5;
    int startup_steps = 2;
    double picard_tol = 1e-10;
    int picard_max_iter = 30;
    InitialData initial = InitialData::Example;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double gamma_target = 1.0 / 200.0;  // when > 0, lambda2 is sized to reach it
    std::string snapshot_path;          // velocity CSV for InitialData::Snapshot
    bool enforce_symmetry = false;
    int snapshot_every = 10;
    bool compute_residuals = true;

    void validate() const;
    StepperConfig stepper() const { return {dt, scheme, cfl_safety, startup_steps}; }
};

// Swirl-profile ratio: lambda2 that makes the grid maximum of |Gamma_0| equal target.
double example_lambda2(const MeridianGrid& g, double target);

// Stream-function initial data with radial profile rho^4 (rho - 1/m)^3 (rho - 1)^3.
VectorField example_initial_data(GridPtr g, double lambda1, double lambda2);

struct AdmissibilityReport {
    double div_rel = 0.0;
    EdgeResiduals slip;  // relative to the velocity scale
    double eoo_rel = 0.0;
    double gamma_max = 0.0;
    double tolerance = 0.0;
    bool div_ok = false, slip_ok = false, eoo_ok = false;
    bool below_100 = false;  // sup|Gamma_0| <= 1/100
    bool below_95 = false;   // sup|Gamma_0| <= 1/95
    bool admissible() const { return div_ok && slip_ok && eoo_ok; }
};
AdmissibilityReport admissibility_check(const VectorField& v0, double c_tol = 4.0);

// Initial state: Gamma and Omega~ from v0, b = meridional part of v0.
SimulationState initial_state(const VectorField& v0, double t0 = 0.0);

// Factorized operators reused across windows.
class Pipeline {
public:
    Pipeline(GridPtr g, const StepperConfig& cfg);
    const GridPtr& grid() const { return grid_; }
    const StepperConfig& config() const { return cfg_; }
    const BiotSavart& biot_savart() const { return bs_; }
    const GammaStepper& gamma() const { return gamma_; }
    const OmegaStepper& omega() const { return omega_; }
    // True when global step n is a startup step.
    bool startup(int n) const { return gamma_half_.has_value() && n < cfg_.startup_steps; }
    const GammaStepper& gamma_half() const { return *gamma_half_; }
    const OmegaStepper& omega_half() const { return *omega_half_; }

private:
    GridPtr grid_;
    StepperConfig cfg_;
    BiotSavart bs_;
    GammaStepper gamma_;
    OmegaStepper omega_;
    std::optional<GammaStepper> gamma_half_;
    std::optional<OmegaStepper> omega_half_;
};

// One application of the fixed-point map over a window of `steps` steps. The
// drift b[n] is used on step n; the returned states carry the new b~, whose
// first entry is pinned to state0.b. first_step is the global index of state0;
// when given, halves[n] receives the intermediate state of startup step n.
std::vector<SimulationState> apply_L(const Pipeline& p, const std::vector<VectorField>& b,
                                     const SimulationState& state0, int steps, int first_step = 0,
                                     std::vector<SimulationState>* halves = nullptr);

// Discrete energy norm over a window: max_n ||u_n||^2 + trapezoid of ||grad u_n||^2.
double window_e_norm(const std::vector<VectorField>& u, double dt);

struct PicardResult {
    std::vector<SimulationState> states;
    std::vector<SimulationState> halves;  // intermediate states of startup steps
    WindowRecord record;
};

// Iterates b <- L b from b^0 = state0.b (constant in time) on one window.
PicardResult picard_solve(const Pipeline& p, const SimulationState& state0, int steps, double tol, int max_iter,
                          int first_step = 0);

// Chains Picard windows to t_final, halving the window on non-convergence.
Trajectory march(const SimulationConfig& cfg, const VectorField& v0);
Trajectory march(const SimulationConfig& cfg);

VectorField initial_velocity(const SimulationConfig& cfg, GridPtr g);
GridPtr make_grid(const SimulationConfig& cfg);

}  // namespace coneflow

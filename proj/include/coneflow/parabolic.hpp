#pragma once

#include <memory>

#include "coneflow/elliptic.hpp"
#include "coneflow/errors.hpp"
#include "coneflow/grid.hpp"

namespace coneflow {

enum class TimeScheme { BackwardEuler, CrankNicolson };

struct StepperConfig {
    double dt = 1e-3;
    TimeScheme scheme = TimeScheme::CrankNicolson;
    double cfl_safety = 0.5;
    // Crank-Nicolson only: the first steps of a run are each taken as two
    // backward Euler half steps so stiff modes of the initial data are damped.
    int startup_steps = 2;
};

class CflViolation : public SolverError {
public:
    using SolverError::SolverError;
};

// max(|v_rho|/h_rho, |v_phi|/(rho h_phi)) * dt
double advective_cfl(const VectorField& b, double dt);
void check_cfl(const VectorField& b, const StepperConfig& cfg);

// Implicit theta step for du/dt = L u + F with L from an elliptic problem:
// (I - theta dt L) u' = u + (1 - theta) dt L u + dt F.
class ThetaStepper {
public:
    ThetaStepper(const EllipticProblem& p, const StepperConfig& cfg);
    ScalarField step(const ScalarField& u, const ScalarField& forcing) const;
    const StepperConfig& config() const { return cfg_; }
    const DiscreteOperator& op() const { return op_; }

private:
    GridPtr grid_;
    StepperConfig cfg_;
    double theta_;
    DiscreteOperator op_;
    Eigen::SparseMatrix<double> m_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
};

// Linear part of the swirl-flux equation, homogeneous Neumann on every edge.
EllipticProblem gamma_operator(GridPtr g);
// Linear part of the rescaled-vorticity equation, zero on every edge.
EllipticProblem omega_operator(GridPtr g);

ScalarField vtheta_from_gamma(const ScalarField& gamma);
// Source (1/(rho^2 sin)) ((1/rho) d_phi(v_theta^2) - cot d_rho(v_theta^2)).
ScalarField omega_source(const ScalarField& v_theta);

class GammaStepper {
public:
    GammaStepper(GridPtr g, const StepperConfig& cfg);
    // b is the drift at the start of the step.
    ScalarField step(const ScalarField& gamma, const VectorField& b) const;

private:
    StepperConfig cfg_;
    ThetaStepper stepper_;
};

class OmegaStepper {
public:
    OmegaStepper(GridPtr g, const StepperConfig& cfg);
    // Source is taken from v_theta at both ends of the step (theta-weighted).
    ScalarField step(const ScalarField& omega_t, const VectorField& b, const ScalarField& v_theta_old,
                     const ScalarField& v_theta_new) const;

private:
    StepperConfig cfg_;
    ThetaStepper stepper_;
};

ScalarField step_gamma(const ScalarField& gamma, const VectorField& b, const StepperConfig& cfg);
ScalarField step_omega(const ScalarField& omega_t, const VectorField& b, const ScalarField& v_theta,
                       const StepperConfig& cfg);

// Residual of the angular-vorticity equation at interior nodes (zero on edges):
// (Lap - 1/(rho sin)^2) w - b.grad w + (v_rho + cot v_phi) w / rho - 2 v_theta (K + cot F) - dw/dt
// with w = rho sin(phi) omega_t and K, F from the discrete curl of v_theta.
ScalarField omega_theta_residual(const VectorField& v, const ScalarField& omega_t, const ScalarField& d_omega_t_dt);

}  // namespace coneflow

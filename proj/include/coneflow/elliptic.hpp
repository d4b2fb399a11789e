#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "coneflow/grid.hpp"

namespace coneflow {

enum class BcKind { Dirichlet, Neumann, Robin };

// Dirichlet: u = value; Neumann: du/dn = value; Robin: du/dn = value * u.
// n is the outward normal. Optional per-node data along the edge overrides value.
struct EdgeBc {
    BcKind kind = BcKind::Dirichlet;
    double value = 0.0;
    std::vector<double> data;

    static EdgeBc dirichlet(double g = 0.0) { return {BcKind::Dirichlet, g, {}}; }
    static EdgeBc neumann(double g = 0.0) { return {BcKind::Neumann, g, {}}; }
    static EdgeBc robin(double c) { return {BcKind::Robin, c, {}}; }
    double at(int k) const { return data.empty() ? value : data[k]; }
};

using Coef = std::function<double(double rho, double phi)>;

// L u = a_r d_rho(p_r d_rho u) + a_p d_phi(p_p d_phi u) + b_r d_rho u + b_p d_phi u + c u.
// The flux coefficients p_r, p_p are sampled at half-nodes, so any operator of
// the form (1/w) d(w d u) is discretized conservatively. Unset coefficients
// are 1 for a and p and 0 otherwise.
struct EllipticProblem {
    GridPtr grid;
    Coef a_r, p_r, a_p, p_p, b_r, b_p, c;
    EdgeBc r1, r2, a1, a2;  // walls phi1, phi2; spheres 1/m, 1
};

struct SolveStats {
    int iterations = 0;  // 1 for a direct solve
    double residual = 0.0;
    double seconds = 0.0;
};

// Discrete operator: for free rows (L u)_k = (A u)_k + s_k; fixed rows carry
// a Dirichlet value and have an empty row in A.
struct DiscreteOperator {
    Eigen::SparseMatrix<double> a;
    Eigen::VectorXd s;
    std::vector<char> fixed;
    Eigen::VectorXd fixed_value;
};

DiscreteOperator assemble(const EllipticProblem& p);

// Factorizes once; solve() may be called repeatedly with new right-hand sides.
class EllipticSolver {
public:
    explicit EllipticSolver(const EllipticProblem& p, double tol = 1e-10);
    ScalarField solve(const ScalarField& rhs, SolveStats* stats = nullptr) const;
    const DiscreteOperator& op() const { return op_; }

private:
    GridPtr grid_;
    DiscreteOperator op_;
    Eigen::SparseMatrix<double> m_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
    double tol_;
};

// Applies L (with its boundary closures) to u; fixed rows return u - g.
ScalarField apply_operator(const DiscreteOperator& op, const ScalarField& u);

// Derivative in phi whose trapezoid sum telescopes exactly to q(phi2) - q(phi1).
ScalarField fv_d_phi(const ScalarField& q);

EllipticProblem vrho_problem(GridPtr g);
EllipticProblem vphi_problem(GridPtr g);
// Right-hand sides of the two problems for a given rescaled vorticity.
ScalarField vrho_rhs(const ScalarField& omega_t);
ScalarField vphi_rhs(const ScalarField& omega_t);

// Factorized Biot-Savart solves recovering (v_rho, v_phi) from the rescaled
// angular vorticity.
class BiotSavart {
public:
    explicit BiotSavart(GridPtr g);
    ScalarField solve_vrho(const ScalarField& omega_t, SolveStats* stats = nullptr) const;
    ScalarField solve_vphi(const ScalarField& omega_t, SolveStats* stats = nullptr) const;
    const GridPtr& grid() const { return grid_; }

private:
    GridPtr grid_;
    EllipticSolver f_, g_;
};

ScalarField solve_vrho(const ScalarField& omega_t);
ScalarField solve_vphi(const ScalarField& omega_t);

struct BiotSavartAudit {
    double div_l2 = 0.0;     // ||div b||
    double h_max = 0.0;      // max |rho^2 div b|
    double flux_max = 0.0;   // max over rho of |rho int v_rho sin dphi|
    double mean_max = 0.0;   // max over rho of |int v_rho sin dphi|
};

struct AssembledVelocity {
    VectorField b;
    BiotSavartAudit audit;
};

BiotSavartAudit audit_meridional(const VectorField& b);
AssembledVelocity assemble_b(const BiotSavart& bs, const ScalarField& omega_t);
AssembledVelocity assemble_b(const ScalarField& omega_t);

struct PressureResult {
    ScalarField p;
    double loop_defect = 0.0;    // max |discrete curl of (B_rho, rho B_phi)| / term scale
    double defect_limit = 0.0;   // 10 x the discretization estimate
    bool warning = false;
};

// Momentum balance terms B_rho, B_phi of the meridional equations.
struct PressureGradient {
    ScalarField b_rho, b_phi;
};
PressureGradient pressure_gradient(const VectorField& v, const VectorField& dvdt);

// Integrates d_rho P = B_rho along the equator, then d_phi P = rho B_phi,
// and normalizes the volume integral of P to zero.
PressureResult recover_pressure(const VectorField& v, const VectorField& dvdt);

}  // namespace coneflow

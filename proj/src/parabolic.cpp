#include "coneflow/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coneflow/operators.hpp"

namespace coneflow {

double advective_cfl(const VectorField& b, double dt)
{
    const MeridianGrid& g = b.grid();
    double m = 0.0;
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i)
            m = std::max({m, std::abs(b.rho(i, j)) / g.hr(), std::abs(b.phi(i, j)) / (g.rho(i) * g.hphi())});
    return m * dt;
}

void check_cfl(const VectorField& b, const StepperConfig& cfg)
{
    const double c = advective_cfl(b, cfg.dt);
    if (c > cfg.cfl_safety)
        throw CflViolation("advective CFL number " + std::to_string(c) + " exceeds safety factor " +
                           std::to_string(cfg.cfl_safety));
}

ThetaStepper::ThetaStepper(const EllipticProblem& p, const StepperConfig& cfg)
    : grid_(p.grid), cfg_(cfg), theta_(cfg.scheme == TimeScheme::BackwardEuler ? 1.0 : 0.5), op_(assemble(p))
{
    if (!(cfg.dt > 0.0)) throw PreconditionError("time step must be positive");
    const std::size_t n = grid_->size();
    m_ = -theta_ * cfg.dt * op_.a;
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        m_.coeffRef(kk, kk) = op_.fixed[k] ? 1.0 : m_.coeff(kk, kk) + 1.0;
    }
    m_.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
    lu_->compute(m_);
    if (lu_->info() != Eigen::Success) throw SolverError("implicit step factorization failed");
}

ScalarField ThetaStepper::step(const ScalarField& u, const ScalarField& forcing) const
{
    const std::size_t n = grid_->size();
    const double dt = cfg_.dt;
    const Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs = x;
    if (theta_ < 1.0) rhs += (1.0 - theta_) * dt * (op_.a * x);
    for (std::size_t k = 0; k < n; ++k)
        rhs[k] = op_.fixed[k] ? op_.fixed_value[k] : rhs[k] + dt * (op_.s[k] + forcing[k]);
    const Eigen::VectorXd y = lu_->solve(rhs);
    if (lu_->info() != Eigen::Success) throw SolverError("implicit step solve failed");
    return ScalarField(grid_, std::vector<double>(y.data(), y.data() + n));
}

EllipticProblem gamma_operator(GridPtr g)
{
    // d_rho^2 + (1/rho^2) sin d_phi((1/sin) d_phi)
    EllipticProblem p;
    p.grid = std::move(g);
    p.a_p = [](double r, double ph) { return std::sin(ph) / (r * r); };
    p.p_p = [](double, double ph) { return 1.0 / std::sin(ph); };
    p.r1 = p.r2 = p.a1 = p.a2 = EdgeBc::neumann(0.0);
    return p;
}

EllipticProblem omega_operator(GridPtr g)
{
    // (1/rho^4) d_rho(rho^4 d_rho) + (1/(rho^2 sin^3)) d_phi(sin^3 d_phi)
    EllipticProblem p;
    p.grid = std::move(g);
    p.a_r = [](double r, double) { return 1.0 / (r * r * r * r); };
    p.p_r = [](double r, double) { return r * r * r * r; };
    p.a_p = [](double r, double ph) {
        const double s = std::sin(ph);
        return 1.0 / (r * r * s * s * s);
    };
    p.p_p = [](double, double ph) {
        const double s = std::sin(ph);
        return s * s * s;
    };
    p.r1 = p.r2 = p.a1 = p.a2 = EdgeBc::dirichlet(0.0);
    return p;
}

ScalarField vtheta_from_gamma(const ScalarField& gamma)
{
    const MeridianGrid& g = gamma.grid();
    ScalarField v(gamma.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) v(i, j) = gamma(i, j) / (g.rho(i) * g.sin_phi(j));
    return v;
}

ScalarField omega_source(const ScalarField& v_theta)
{
    const MeridianGrid& g = v_theta.grid();
    const ScalarField sq = hadamard(v_theta, v_theta);
    const ScalarField dp = d_phi(sq), dr = d_rho(sq);
    ScalarField out(v_theta.grid_ptr());
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            const double r = g.rho(i);
            out(i, j) = (dp(i, j) / r - g.cot_phi(j) * dr(i, j)) / (r * r * g.sin_phi(j));
        }
    return out;
}

GammaStepper::GammaStepper(GridPtr g, const StepperConfig& cfg) : cfg_(cfg), stepper_(gamma_operator(g), cfg) {}

ScalarField GammaStepper::step(const ScalarField& gamma, const VectorField& b) const
{
    check_cfl(b, cfg_);
    ScalarField f = convect(b, gamma);
    f *= -1.0;
    return stepper_.step(gamma, f);
}

OmegaStepper::OmegaStepper(GridPtr g, const StepperConfig& cfg) : cfg_(cfg), stepper_(omega_operator(g), cfg) {}

ScalarField OmegaStepper::step(const ScalarField& omega_t, const VectorField& b, const ScalarField& v_theta_old,
                               const ScalarField& v_theta_new) const
{
    check_cfl(b, cfg_);
    ScalarField f = convect(b, omega_t);
    f *= -1.0;
    if (cfg_.scheme == TimeScheme::BackwardEuler) {
        f -= omega_source(v_theta_new);
    } else {
        f -= 0.5 * (omega_source(v_theta_old) + omega_source(v_theta_new));
    }
    return stepper_.step(omega_t, f);
}

ScalarField step_gamma(const ScalarField& gamma, const VectorField& b, const StepperConfig& cfg)
{
    return GammaStepper(gamma.grid_ptr(), cfg).step(gamma, b);
}

ScalarField step_omega(const ScalarField& omega_t, const VectorField& b, const ScalarField& v_theta,
                       const StepperConfig& cfg)
{
    return OmegaStepper(omega_t.grid_ptr(), cfg).step(omega_t, b, v_theta, v_theta);
}

ScalarField omega_theta_residual(const VectorField& v, const ScalarField& omega_t, const ScalarField& d_omega_t_dt)
{
    const GridPtr& gp = v.grid_ptr();
    const MeridianGrid& g = *gp;
    ScalarField w(gp), wt(gp);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            const double rs = g.rho(i) * g.sin_phi(j);
            w(i, j) = rs * omega_t(i, j);
            wt(i, j) = rs * d_omega_t_dt(i, j);
        }
    const ScalarField lap = laplacian_scalar(w);
    const ScalarField adv = convect(v.meridional(), w);
    const VectorField swirl{ScalarField(gp), ScalarField(gp), v.theta};
    const DerivedQuantities dq = derived_quantities(swirl, curl(swirl));
    ScalarField out(gp);
    for (int j = 1; j + 1 < g.nphi(); ++j) {
        const double s = g.sin_phi(j), cot = g.cot_phi(j);
        for (int i = 1; i + 1 < g.nr(); ++i) {
            const double r = g.rho(i);
            out(i, j) = lap(i, j) - w(i, j) / (r * r * s * s) - adv(i, j) +
                        (v.rho(i, j) + cot * v.phi(i, j)) * w(i, j) / r -
                        2.0 * v.theta(i, j) * (dq.k(i, j) + cot * dq.f(i, j)) - wt(i, j);
        }
    }
    return out;
}

}  // namespace coneflow

#pragma once

#include <array>
#include <random>
#include <stdexcept>
#include <string>

#include "coneflow/grid.hpp"

namespace coneflow {

enum class PoincareSubspace { MeanZero, Dirichlet };
// Only the sine weight of the meridian problem and the unit weight (sanity
// limit) are supported.
enum class SturmWeight { Sine, Unit };

struct InequalityReport {
    std::string name;
    double alpha = 0.0;
    int n = 0;
    double lhs = 0.0, rhs = 0.0, constant = 0.0;
    double slack = 0.0;      // rhs - lhs
    double tolerance = 0.0;  // pass iff slack >= -tolerance
    bool pass = false;
};

InequalityReport make_report(std::string name, double alpha, int n, double lhs, double rhs, double constant,
                             double tolerance);

// A checker refused to run because a hypothesis of the inequality fails.
class HypothesisViolation : public std::invalid_argument {
public:
    HypothesisViolation(const std::string& hypothesis, double lhs, double rhs, double defect);
    std::string hypothesis;
    double lhs, rhs;  // the inequality's two sides evaluated anyway
    double defect;    // size of the failed hypothesis
};

// 4 a^2 / (pi^2 + 2 a^2), mean-zero subspace, 0 < a < pi/2.
double poincare_const_A(double alpha);
// 4 a^2 / (pi^2 - 2 a^2 / cos^2 a), Dirichlet subspace, 0 < a <= pi/4.
double poincare_const_B(double alpha);

// 1 / lambda_min of -(p u')' = lambda p u on [pi/2 - a, pi/2 + a] with n nodes.
// Conservative three-point stencil with p at half-nodes; the mean-zero
// subspace is imposed by deflating the weighted constant.
double sharp_weighted_constant(double alpha, PoincareSubspace s, int n, SturmWeight w = SturmWeight::Sine);

// int f^2/rho^2 <= (4+eps) int |d_rho f|^2 + (40 + 16/eps) int f^2.
InequalityReport hardy_check(const ScalarField& f, double eps);

struct CurlGradOptions {
    double c_tol = 1.0;         // slack tolerance c*h*||grad u||
    double c_hypothesis = 1.0;  // hypotheses accepted up to c*h*scale
};
// ||grad u|| <= sqrt(3) ||curl u|| for divergence-free, slip-compliant,
// even-odd-odd u on a sector with alpha <= pi/6. Throws HypothesisViolation
// naming the first failed check.
InequalityReport curl_grad_check(const VectorField& u, const CurlGradOptions& opt = {});

// Largest relative defects of the three hypotheses above.
struct CurlGradHypotheses {
    double divergence, slip, symmetry;
};
CurlGradHypotheses curl_grad_hypotheses(const VectorField& u);

// int u^2/rho^2 <= C int (d_phi u / rho)^2, C = C_A (MeanZero) or C_B (Dirichlet).
InequalityReport poincare_field_check(const ScalarField& u, PoincareSubspace mode, double c_tol = 10.0);

// (sum_c ||v_c||_H1) / ||v||_H1 and the admissible band [1/C, C].
double h1_equivalence_ratio(const VectorField& v);
double h1_equivalence_constant(const MeridianDomain& d);

// Divergence-free, slip-compliant, even-odd-odd flows built from a stream
// function f(rho) G(phi) and a swirl flux H(rho) S(phi):
//   f = rho^4 (rho - 1/m)^3 (rho - 1)^3 (1 + stream_tilt rho),
//   G = sum_k stream[k] sin^3((k+1) pi x / alpha),
//   H' = rho^2 (rho - 1/m)(rho - 1)(1 + swirl_tilt rho), H(0) = 0,
//   S = sum_l swirl[l] sin((2l+1) pi x / (2 alpha)),  x = phi - pi/2.
struct EooFlowParams {
    std::array<double, 2> stream{1.0, 0.0};
    double stream_tilt = 0.0;
    std::array<double, 2> swirl{0.0, 0.0};
    double swirl_tilt = 0.0;
};
VectorField eoo_stream_field(GridPtr g, const EooFlowParams& p);
EooFlowParams random_eoo_params(std::mt19937_64& rng);

// Low-order trigonometric field with random amplitudes and phases.
ScalarField random_smooth_scalar(GridPtr g, std::mt19937_64& rng);

}  // namespace coneflow

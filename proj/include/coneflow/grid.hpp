#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "coneflow/geometry.hpp"

namespace coneflow {

// Uniform tensor grid on [1/m, 1] x [phi1, phi2]. Node (i, j) sits at
// rho_i = 1/m + i*hr and phi_j = pi/2 + (j - c)*hphi with c the middle index,
// so the equator is a grid line and the phi nodes mirror exactly.
class MeridianGrid {
public:
    MeridianGrid(const MeridianDomain& d, int nr, int nphi);

    static std::shared_ptr<const MeridianGrid> create(const MeridianDomain& d, int nr, int nphi);

    const MeridianDomain& domain() const { return dom_; }
    int nr() const { return nr_; }
    int nphi() const { return nphi_; }
    double hr() const { return hr_; }
    double hphi() const { return hphi_; }
    std::size_t size() const { return static_cast<std::size_t>(nr_) * nphi_; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nr_ + i; }

    double rho(int i) const { return rho_[i]; }
    double phi(int j) const { return phi_[j]; }
    double sin_phi(int j) const { return sin_[j]; }
    double cot_phi(int j) const { return cot_[j]; }
    int mirror(int j) const { return nphi_ - 1 - j; }

    BoundaryLabel label(int i, int j) const;

    // Trapezoid weights including the 2*pi*rho^2*sin(phi) volume factor.
    const std::vector<double>& volume_weights() const { return vol_w_; }
    // Trapezoid weights in phi only (no sin factor), length nphi.
    const std::vector<double>& phi_trap() const { return phi_tw_; }
    const std::vector<double>& rho_trap() const { return rho_tw_; }

    // Smallest spacing measured as arc length, used in tolerance formulas.
    double h() const;

private:
    MeridianDomain dom_;
    int nr_, nphi_;
    double hr_, hphi_;
    std::vector<double> rho_, phi_, sin_, cot_;
    std::vector<double> vol_w_, phi_tw_, rho_tw_;
};

using GridPtr = std::shared_ptr<const MeridianGrid>;

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr g, double fill = 0.0);
    ScalarField(GridPtr g, std::vector<double> values);

    static ScalarField sample(GridPtr g, const std::function<double(double rho, double phi)>& f);

    const MeridianGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[grid_->idx(i, j)]; }
    double operator()(int i, int j) const { return v_[grid_->idx(i, j)]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

    bool all_finite() const;
    double max_abs() const;

private:
    GridPtr grid_;
    std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
ScalarField operator*(double s, ScalarField a);
// Nodewise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Spherical components (rho, phi, theta). The meridional part b has theta == 0.
struct VectorField {
    ScalarField rho, phi, theta;

    VectorField() = default;
    explicit VectorField(GridPtr g);
    VectorField(ScalarField r, ScalarField p, ScalarField t);

    static VectorField sample(GridPtr g, const std::function<Vec3(double rho, double phi)>& f);

    const MeridianGrid& grid() const { return rho.grid(); }
    const GridPtr& grid_ptr() const { return rho.grid_ptr(); }
    ScalarField& operator[](int c) { return c == 0 ? rho : (c == 1 ? phi : theta); }
    const ScalarField& operator[](int c) const { return c == 0 ? rho : (c == 1 ? phi : theta); }

    VectorField meridional() const;
    bool all_finite() const;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(VectorField a, double s);

// Row = component (rho, phi, theta); column = derivative direction.
struct GradientField {
    std::array<std::array<ScalarField, 3>, 3> m;
    ScalarField& operator()(int r, int c) { return m[r][c]; }
    const ScalarField& operator()(int r, int c) const { return m[r][c]; }
};

}  // namespace coneflow

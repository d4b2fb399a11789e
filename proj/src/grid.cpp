#include "coneflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coneflow/errors.hpp"

namespace coneflow {

MeridianGrid::MeridianGrid(const MeridianDomain& d, int nr, int nphi)
    : dom_(d), nr_(nr), nphi_(nphi)
{
    if (nr < 3 || nphi < 3)
        throw PreconditionError("grid needs at least 3 nodes per direction");
    if (nphi % 2 == 0)
        throw PreconditionError("phi node count must be odd so the equator is a grid line, got " +
                                std::to_string(nphi));
    hr_ = (d.rho_max() - d.rho_min()) / (nr - 1);
    hphi_ = 2.0 * d.alpha / (nphi - 1);
    rho_.resize(nr);
    for (int i = 0; i < nr; ++i) rho_[i] = d.rho_min() + i * hr_;
    rho_[nr - 1] = d.rho_max();
    const int c = (nphi - 1) / 2;
    phi_.resize(nphi);
    sin_.resize(nphi);
    cot_.resize(nphi);
    for (int j = 0; j < nphi; ++j) {
        phi_[j] = kHalfPi + (j - c) * hphi_;
        // cos(j - c) is symmetric in the offset; evaluating through the offset
        // keeps sin exactly even and cot exactly odd about the equator.
        const double off = std::abs(j - c) * hphi_;
        sin_[j] = std::cos(off);
        const double cot = std::tan(off);
        cot_[j] = (j < c) ? cot : -cot;
    }
    rho_tw_.assign(nr, hr_);
    rho_tw_.front() = rho_tw_.back() = 0.5 * hr_;
    phi_tw_.assign(nphi, hphi_);
    phi_tw_.front() = phi_tw_.back() = 0.5 * hphi_;
    vol_w_.resize(size());
    for (int j = 0; j < nphi; ++j)
        for (int i = 0; i < nr; ++i)
            vol_w_[idx(i, j)] = 2.0 * kPi * rho_[i] * rho_[i] * sin_[j] * rho_tw_[i] * phi_tw_[j];
}

std::shared_ptr<const MeridianGrid> MeridianGrid::create(const MeridianDomain& d, int nr, int nphi)
{
    return std::make_shared<const MeridianGrid>(d, nr, nphi);
}

BoundaryLabel MeridianGrid::label(int i, int j) const
{
    const bool a1 = i == 0, a2 = i == nr_ - 1, r1 = j == 0, r2 = j == nphi_ - 1;
    if ((a1 || a2) && (r1 || r2)) return BoundaryLabel::Corner;
    if (a1) return BoundaryLabel::A1;
    if (a2) return BoundaryLabel::A2;
    if (r1) return BoundaryLabel::R1;
    if (r2) return BoundaryLabel::R2;
    return BoundaryLabel::Interior;
}

double MeridianGrid::h() const
{
    return std::max(hr_, hphi_ * dom_.rho_max());
}

ScalarField::ScalarField(GridPtr g, double fill) : grid_(std::move(g)), v_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr g, std::vector<double> values) : grid_(std::move(g)), v_(std::move(values))
{
    if (v_.size() != grid_->size())
        throw PreconditionError("field length does not match grid");
}

ScalarField ScalarField::sample(GridPtr g, const std::function<double(double, double)>& f)
{
    ScalarField out(g);
    for (int j = 0; j < g->nphi(); ++j)
        for (int i = 0; i < g->nr(); ++i) out(i, j) = f(g->rho(i), g->phi(j));
    return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o)
{
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o)
{
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s)
{
    for (double& x : v_) x *= s;
    return *this;
}

bool ScalarField::all_finite() const
{
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double ScalarField::max_abs() const
{
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b)
{
    ScalarField out(a.grid_ptr());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

VectorField::VectorField(GridPtr g) : rho(g), phi(g), theta(g) {}

VectorField::VectorField(ScalarField r, ScalarField p, ScalarField t)
    : rho(std::move(r)), phi(std::move(p)), theta(std::move(t))
{
}

VectorField VectorField::sample(GridPtr g, const std::function<Vec3(double, double)>& f)
{
    VectorField out(g);
    for (int j = 0; j < g->nphi(); ++j)
        for (int i = 0; i < g->nr(); ++i) {
            const Vec3 v = f(g->rho(i), g->phi(j));
            out.rho(i, j) = v[0];
            out.phi(i, j) = v[1];
            out.theta(i, j) = v[2];
        }
    return out;
}

VectorField VectorField::meridional() const
{
    return VectorField(rho, phi, ScalarField(rho.grid_ptr()));
}

bool VectorField::all_finite() const
{
    return rho.all_finite() && phi.all_finite() && theta.all_finite();
}

VectorField operator+(VectorField a, const VectorField& b)
{
    for (int c = 0; c < 3; ++c) a[c] += b[c];
    return a;
}

VectorField operator-(VectorField a, const VectorField& b)
{
    for (int c = 0; c < 3; ++c) a[c] -= b[c];
    return a;
}

VectorField operator*(VectorField a, double s)
{
    for (int c = 0; c < 3; ++c) a[c] *= s;
    return a;
}

}  // namespace coneflow

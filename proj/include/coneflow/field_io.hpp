#pragma once

#include <string>

#include "coneflow/grid.hpp"

namespace coneflow {

// Snapshot CSV: header "rho,phi,value" or "rho,phi,v_rho,v_phi,v_theta",
// phi in the outer loop and rho in the inner loop, 17 significant digits.
void write_csv(const std::string& path, const ScalarField& f);
void write_csv(const std::string& path, const VectorField& v);

// The file's node coordinates must match the grid to 1e-12.
ScalarField read_scalar_csv(const std::string& path, GridPtr grid);
VectorField read_vector_csv(const std::string& path, GridPtr grid);

}  // namespace coneflow

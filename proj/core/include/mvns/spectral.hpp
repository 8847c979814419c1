#pragma once

#include "mvns/fields.hpp"

namespace mvns::spectral {

/// Exact inverse of the cell-centered Neumann Laplacian; the constant mode is dropped.
ScalarField neumann_solve(const ScalarField& rhs);

/// Applies (alpha I - beta Laplacian)^{-1} componentwise in the no-slip sine eigenbasis.
VectorField helmholtz_solve(const VectorField& f, double alpha, double beta);

}  // namespace mvns::spectral

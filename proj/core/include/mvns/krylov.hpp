#pragma once

#include <functional>

#include "mvns/fields.hpp"

namespace mvns {

using LinOp = std::function<VectorField(const VectorField&)>;

/// Preconditioned conjugate gradients in the L2 inner product; stops at relative residual tol.
VectorField cg(const LinOp& A, const LinOp& precond, const VectorField& b, VectorField x,
               double tol, int maxit, SolveStats* stats = nullptr);

/// Restarted right-preconditioned GMRES; stops at relative residual tol.
VectorField gmres(const LinOp& A, const LinOp& precond, const VectorField& b, VectorField x,
                  double tol, int restart, int maxit, SolveStats* stats = nullptr);

}  // namespace mvns

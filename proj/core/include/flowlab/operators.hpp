#pragma once

#include "flowlab/grid.hpp"

namespace flowlab {

/// D²u by second-order stencils; xy and yy are zero fields in 1D.
struct Hessian {
  ScalarField xx;
  ScalarField xy;
  ScalarField yy;
};

/// Du. Central differences at interior nodes, one-sided second-order at
/// dirichlet boundaries, wrap-around central on periodic grids.
VectorField gradient(const ScalarField& u);

/// D²u with the same stencil policy as gradient().
Hessian hessian(const ScalarField& u);

/// div(Du/v), v = sqrt(1+|Du|²). Conservative staggered-midpoint fluxes at
/// interior nodes; dirichlet boundary nodes carry one-sided nondivergence
/// values (not flux-conservative).
ScalarField div_flux(const ScalarField& u);

/// Quadrature of f·weight over the domain: trapezoidal on dirichlet grids,
/// rectangle rule on periodic grids. Exact for constants.
double integrate(const ScalarField& f, const ScalarField& weight);

}  // namespace flowlab

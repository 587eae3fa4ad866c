#pragma once

#include "flowlab/grid.hpp"
#include "flowlab/operators.hpp"

namespace flowlab {

/// Pointwise geometry of the graph of u with downward translation vector
/// V = -e_{n+1}. Sign convention: convex u has A >= 0 and H <= 0
/// (H = -(1/v) g^{ij} u_ij, g^{ij} = delta_ij - u_i u_j / v²).
struct GraphGeometry {
  ScalarField v;       ///< area element sqrt(1+|Du|²)
  ScalarField H;       ///< mean curvature
  ScalarField Vnu;     ///< <V,nu> = -1/v
  Hessian hess;        ///< D²u
  VectorField grad;    ///< Du
  ScalarField sff_min_eig;  ///< smallest eigenvalue of A relative to g
  ScalarField sff_max_eig;  ///< largest eigenvalue (equals min in 1D)
};

GraphGeometry graph_geometry(const ScalarField& u);

struct PinchMonitors {
  double min_beta_vnu_minus_h;  ///< min over nodes of beta·<V,nu> - H
  double min_pinch_eig;  ///< min eigenvalue over nodes of A + beta·<V,nu>·g/n
};

PinchMonitors pinch_monitors(const ScalarField& u, double beta);
PinchMonitors pinch_monitors(const GraphGeometry& geo, double beta);

}  // namespace flowlab

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "flowlab/grid.hpp"

namespace flowlab {

/// 1D translating soliton u(x) = -log cos x on (-pi/2, pi/2).
double grim_reaper(double x);
/// Its slope tan x.
double grim_reaper_slope(double x);

/// Radial bowl-soliton profile: phi'' = (1+phi'²)(1 - (n-1) phi'/r),
/// phi(0) = phi'(0) = 0.
struct SolitonProfile {
  int n;  ///< dimension of the graph domain
  std::vector<double> r;
  std::vector<double> phi;
  std::vector<double> dphi;

  /// phi at an arbitrary radius in [0, r_max], cubic Hermite between samples.
  double value(double radius) const;
  double slope(double radius) const;
  /// phi''(0) recovered from a quartic fit of the first samples.
  double fitted_second_derivative_at_zero() const;
  /// Sup over interior samples of the radial-equation residual with phi''
  /// reconstructed by a 4th-order difference of the stored phi' samples.
  double max_equation_residual() const;
};

/// Integrate the radial ODE with a series start near r = 0 and classical
/// 4th-order stepping beyond r0 = 10h. Samples at radii 0, h, 2h, ..., r_max.
SolitonProfile bowl_profile(int n, double r_max, double h);

/// w(x) = phi(|x|) sampled on a grid (1D or 2D).
ScalarField lift_radial(const SolitonProfile& profile,
                        const StructuredGrid& grid);

/// CSV serialization with columns (r, phi, dphi).
void write_profile_csv(std::ostream& os, const SolitonProfile& profile);

struct StationaryOptions {
  double tol = 1e-10;  ///< sup-norm of the discrete residual
  int max_iters = 50;
  int max_halvings = 30;  ///< backtracking limit per Newton step
};

struct StationaryResult {
  ScalarField u;
  int iterations;
  double residual;
};

/// Damped Newton iteration on the discrete residual v·div(Du/v) - 1 = 0 with
/// dirichlet data taken from phi (or from the boundary trace of u_init).
/// The Jacobian is assembled by exact differentiation of the discrete flux.
StationaryResult stationary_solve(
    const ScalarField& u_init,
    const std::optional<ScalarField>& phi = std::nullopt,
    const StationaryOptions& options = {});

/// Smallest C with w - C <= u0 <= w + C pointwise.
double barrier_offsets(const ScalarField& u0, const ScalarField& w);

/// Action of the Newton Jacobian at u on a direction w (boundary rows are
/// the identity). Exposed so the hand-assembled derivative can be compared
/// against finite differences of the residual.
ScalarField stationary_jacobian_apply(const ScalarField& u,
                                      const ScalarField& w);

}  // namespace flowlab

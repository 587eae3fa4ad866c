#include "flowlab/graph_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flowlab {

GraphGeometry graph_geometry(const ScalarField& u) {
  const StructuredGrid& g = u.grid();
  VectorField grad = gradient(u);
  Hessian hs = hessian(u);
  ScalarField v(g), H(g), Vnu(g), emin(g), emax(g);
  const int dim = g.dim();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double ux = grad.comp(p, 0);
    const double uy = dim == 2 ? grad.comp(p, 1) : 0.0;
    const double v2 = 1.0 + ux * ux + uy * uy;
    const double vp = std::sqrt(v2);
    v[p] = vp;
    Vnu[p] = -1.0 / vp;
    const double uxx = hs.xx[p];
    if (dim == 1) {
      H[p] = -(1.0 - ux * ux / v2) * uxx / vp;
      emin[p] = emax[p] = uxx / (vp * v2);  // uxx / v³
    } else {
      const double uxy = hs.xy[p], uyy = hs.yy[p];
      H[p] = -((1.0 - ux * ux / v2) * uxx - 2.0 * (ux * uy / v2) * uxy +
               (1.0 - uy * uy / v2) * uyy) / vp;
      // Generalized eigenvalues of (D²u / v, g), g = I + Du Duᵀ: solve the
      // characteristic quadratic of M = g⁻¹ D²u / v.
      const double s_xx = uxx / vp, s_xy = uxy / vp, s_yy = uyy / vp;
      const double m00 = (1.0 - ux * ux / v2) * s_xx - (ux * uy / v2) * s_xy;
      const double m01 = (1.0 - ux * ux / v2) * s_xy - (ux * uy / v2) * s_yy;
      const double m10 = (1.0 - uy * uy / v2) * s_xy - (ux * uy / v2) * s_xx;
      const double m11 = (1.0 - uy * uy / v2) * s_yy - (ux * uy / v2) * s_xy;
      const double tr = m00 + m11;
      const double det = m00 * m11 - m01 * m10;
      const double disc = std::max(0.0, tr * tr - 4.0 * det);
      const double sq = std::sqrt(disc);
      emin[p] = 0.5 * (tr - sq);
      emax[p] = 0.5 * (tr + sq);
    }
  }
  return GraphGeometry{std::move(v),    std::move(H),   std::move(Vnu),
                       std::move(hs),   std::move(grad), std::move(emin),
                       std::move(emax)};
}

PinchMonitors pinch_monitors(const GraphGeometry& geo, double beta) {
  const int n = geo.v.grid().dim();
  double m1 = std::numeric_limits<double>::infinity();
  double m2 = m1;
  for (std::size_t p = 0; p < geo.v.size(); ++p) {
    m1 = std::min(m1, beta * geo.Vnu[p] - geo.H[p]);
    m2 = std::min(m2, geo.sff_min_eig[p] + beta * geo.Vnu[p] / n);
  }
  return PinchMonitors{m1, m2};
}

PinchMonitors pinch_monitors(const ScalarField& u, double beta) {
  return pinch_monitors(graph_geometry(u), beta);
}

}  // namespace flowlab

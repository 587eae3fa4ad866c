#include "flowlab/operators.hpp"

#include <cmath>
#include <cstddef>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

void require_valid(const ScalarField& u) {
  if (!u.all_finite())
    throw InvalidInputError("field contains non-finite values");
  for (int k = 0; k < u.grid().dim(); ++k)
    if (u.grid().stored(k) < 3)
      throw InvalidInputError("need at least 3 nodes per axis");
}

/// d/dx_axis by the shared stencil policy, one grid line at a time.
ScalarField axis_deriv(const ScalarField& u, int axis) {
  const StructuredGrid& g = u.grid();
  ScalarField out(g);
  const int nx = g.stored(0);
  const double h = g.spacing(axis);
  const int n = g.stored(axis);
  const std::ptrdiff_t stride = axis == 0 ? 1 : nx;
  const int nlines = axis == 0 ? g.stored(1) : nx;
  const bool per = g.boundary() == BoundaryKind::periodic;
  for (int l = 0; l < nlines; ++l) {
    const std::size_t base = axis == 0 ? g.index(0, l) : g.index(l, 0);
    auto val = [&](int p) { return u[base + stride * p]; };
    if (per) {
      for (int p = 0; p < n; ++p) {
        const int pm = p == 0 ? n - 1 : p - 1;
        const int pp = p == n - 1 ? 0 : p + 1;
        out[base + stride * p] = (val(pp) - val(pm)) / (2 * h);
      }
    } else {
      out[base] = (-3 * val(0) + 4 * val(1) - val(2)) / (2 * h);
      for (int p = 1; p < n - 1; ++p)
        out[base + stride * p] = (val(p + 1) - val(p - 1)) / (2 * h);
      out[base + stride * (n - 1)] =
          (3 * val(n - 1) - 4 * val(n - 2) + val(n - 3)) / (2 * h);
    }
  }
  return out;
}

/// d²/dx_axis² with matching boundary treatment.
ScalarField axis_second(const ScalarField& u, int axis) {
  const StructuredGrid& g = u.grid();
  ScalarField out(g);
  const int nx = g.stored(0);
  const double h2 = g.spacing(axis) * g.spacing(axis);
  const int n = g.stored(axis);
  const std::ptrdiff_t stride = axis == 0 ? 1 : nx;
  const int nlines = axis == 0 ? g.stored(1) : nx;
  const bool per = g.boundary() == BoundaryKind::periodic;
  for (int l = 0; l < nlines; ++l) {
    const std::size_t base = axis == 0 ? g.index(0, l) : g.index(l, 0);
    auto val = [&](int p) { return u[base + stride * p]; };
    if (per) {
      for (int p = 0; p < n; ++p) {
        const int pm = p == 0 ? n - 1 : p - 1;
        const int pp = p == n - 1 ? 0 : p + 1;
        out[base + stride * p] = (val(pp) - 2 * val(p) + val(pm)) / h2;
      }
    } else {
      for (int p = 1; p < n - 1; ++p)
        out[base + stride * p] = (val(p + 1) - 2 * val(p) + val(p - 1)) / h2;
      if (n >= 4) {
        out[base] = (2 * val(0) - 5 * val(1) + 4 * val(2) - val(3)) / h2;
        out[base + stride * (n - 1)] = (2 * val(n - 1) - 5 * val(n - 2) +
                                        4 * val(n - 3) - val(n - 4)) / h2;
      } else {
        out[base] = (val(0) - 2 * val(1) + val(2)) / h2;
        out[base + stride * (n - 1)] = out[base];
      }
    }
  }
  return out;
}

}  // namespace

VectorField gradient(const ScalarField& u) {
  require_valid(u);
  const StructuredGrid& g = u.grid();
  VectorField out(g);
  for (int axis = 0; axis < g.dim(); ++axis) {
    ScalarField d = axis_deriv(u, axis);
    for (std::size_t p = 0; p < g.size(); ++p) out.comp(p, axis) = d[p];
  }
  return out;
}

Hessian hessian(const ScalarField& u) {
  require_valid(u);
  const StructuredGrid& g = u.grid();
  if (g.dim() == 1)
    return Hessian{axis_second(u, 0), ScalarField(g), ScalarField(g)};
  ScalarField ux = axis_deriv(u, 0);
  return Hessian{axis_second(u, 0), axis_deriv(ux, 1), axis_second(u, 1)};
}

namespace {

double flux1d(double s) { return s / std::sqrt(1.0 + s * s); }

ScalarField div_flux_1d(const ScalarField& u) {
  const StructuredGrid& g = u.grid();
  ScalarField out(g);
  const int n = g.stored(0);
  const double h = g.spacing(0);
  const bool per = g.boundary() == BoundaryKind::periodic;
  if (per) {
    std::vector<double> F(n);  // F[p] = flux at midpoint between p and p+1
    for (int p = 0; p < n; ++p) {
      const int pp = p == n - 1 ? 0 : p + 1;
      F[p] = flux1d((u[pp] - u[p]) / h);
    }
    for (int p = 0; p < n; ++p) {
      const int pm = p == 0 ? n - 1 : p - 1;
      out[p] = (F[p] - F[pm]) / h;
    }
    return out;
  }
  double Fm = flux1d((u[1] - u[0]) / h);
  for (int p = 1; p < n - 1; ++p) {
    const double Fp = flux1d((u[p + 1] - u[p]) / h);
    out[p] = (Fp - Fm) / h;
    Fm = Fp;
  }
  // One-sided nondivergence values at the two boundary nodes: u''/v^3.
  auto one_sided = [&](int p, int dir) {
    const double du = dir * (-3 * u[p] + 4 * u[p + dir] - u[p + 2 * dir]) / (2 * h);
    double d2u;
    if (n >= 4)
      d2u = (2 * u[p] - 5 * u[p + dir] + 4 * u[p + 2 * dir] - u[p + 3 * dir]) /
            (h * h);
    else
      d2u = (u[p] - 2 * u[p + dir] + u[p + 2 * dir]) / (h * h);
    const double v = std::sqrt(1.0 + du * du);
    return d2u / (v * v * v);
  };
  out[0] = one_sided(0, +1);
  out[n - 1] = one_sided(n - 1, -1);
  return out;
}

ScalarField div_flux_2d(const ScalarField& u) {
  const StructuredGrid& g = u.grid();
  ScalarField out(g);
  const int nx = g.stored(0), ny = g.stored(1);
  const double hx = g.spacing(0), hy = g.spacing(1);
  const bool per = g.boundary() == BoundaryKind::periodic;
  auto wrap = [](int p, int n) { return p < 0 ? p + n : (p >= n ? p - n : p); };
  auto U = [&](int i, int j) {
    return u.at(per ? wrap(i, nx) : i, per ? wrap(j, ny) : j);
  };
  // Flux through the x-midpoint (i+1/2, j); tangential slope averaged from
  // the four surrounding central differences.
  auto Fx = [&](int i, int j) {
    const double a = (U(i + 1, j) - U(i, j)) / hx;
    const double b =
        (U(i, j + 1) + U(i + 1, j + 1) - U(i, j - 1) - U(i + 1, j - 1)) /
        (4 * hy);
    return a / std::sqrt(1.0 + a * a + b * b);
  };
  auto Fy = [&](int i, int j) {
    const double a = (U(i, j + 1) - U(i, j)) / hy;
    const double b =
        (U(i + 1, j) + U(i + 1, j + 1) - U(i - 1, j) - U(i - 1, j + 1)) /
        (4 * hx);
    return a / std::sqrt(1.0 + a * a + b * b);
  };
  const int i0 = per ? 0 : 1, i1 = per ? nx : nx - 1;
  const int j0 = per ? 0 : 1, j1 = per ? ny : ny - 1;
  for (int j = j0; j < j1; ++j)
    for (int i = i0; i < i1; ++i)
      out.at(i, j) = (Fx(i, j) - Fx(i - 1, j)) / hx +
                     (Fy(i, j) - Fy(i, j - 1)) / hy;
  if (per) return out;

  // Dirichlet boundary nodes: one-sided nondivergence form
  // (1/v) (g^xx uxx + 2 g^xy uxy + g^yy uyy).
  auto d1 = [&](auto&& f, int p, int n, double h) {
    if (p == 0) return (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
    if (p == n - 1) return (3 * f(n - 1) - 4 * f(n - 2) + f(n - 3)) / (2 * h);
    return (f(p + 1) - f(p - 1)) / (2 * h);
  };
  auto d2 = [&](auto&& f, int p, int n, double h) {
    if (p == 0)
      return n >= 4 ? (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / (h * h)
                    : (f(0) - 2 * f(1) + f(2)) / (h * h);
    if (p == n - 1)
      return n >= 4 ? (2 * f(n - 1) - 5 * f(n - 2) + 4 * f(n - 3) - f(n - 4)) /
                          (h * h)
                    : (f(n - 1) - 2 * f(n - 2) + f(n - 3)) / (h * h);
    return (f(p + 1) - 2 * f(p) + f(p - 1)) / (h * h);
  };
  auto boundary_value = [&](int i, int j) {
    auto row = [&](int p) { return u.at(p, j); };
    auto col = [&](int p) { return u.at(i, p); };
    const double px = d1(row, i, nx, hx);
    const double py = d1(col, j, ny, hy);
    const double uxx = d2(row, i, nx, hx);
    const double uyy = d2(col, j, ny, hy);
    auto ux_at = [&](int jj) {
      auto r = [&](int p) { return u.at(p, jj); };
      return d1(r, i, nx, hx);
    };
    const double uxy = d1(ux_at, j, ny, hy);
    const double v2 = 1.0 + px * px + py * py;
    const double v = std::sqrt(v2);
    return ((1.0 - px * px / v2) * uxx - 2 * (px * py / v2) * uxy +
            (1.0 - py * py / v2) * uyy) / v;
  };
  for (int i = 0; i < nx; ++i) {
    out.at(i, 0) = boundary_value(i, 0);
    out.at(i, ny - 1) = boundary_value(i, ny - 1);
  }
  for (int j = 1; j < ny - 1; ++j) {
    out.at(0, j) = boundary_value(0, j);
    out.at(nx - 1, j) = boundary_value(nx - 1, j);
  }
  return out;
}

}  // namespace

ScalarField div_flux(const ScalarField& u) {
  require_valid(u);
  return u.grid().dim() == 1 ? div_flux_1d(u) : div_flux_2d(u);
}

double integrate(const ScalarField& f, const ScalarField& weight) {
  if (!(f.grid() == weight.grid()))
    throw GridMismatchError("integrate: fields live on different grids");
  const StructuredGrid& g = f.grid();
  const bool per = g.boundary() == BoundaryKind::periodic;
  auto w1 = [&](int p, int axis) {
    const double h = g.spacing(axis);
    if (per || g.dim() <= axis) return h;
    return (p == 0 || p == g.stored(axis) - 1) ? h / 2 : h;
  };
  double sum = 0.0;
  for (int j = 0; j < g.stored(1); ++j) {
    const double wy = g.dim() == 2 ? w1(j, 1) : 1.0;
    for (int i = 0; i < g.stored(0); ++i) {
      const std::size_t p = g.index(i, j);
      sum += w1(i, 0) * wy * f[p] * weight[p];
    }
  }
  return sum;
}

}  // namespace flowlab

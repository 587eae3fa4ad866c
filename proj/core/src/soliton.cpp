#include "flowlab/soliton.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "flowlab/errors.hpp"
#include "flowlab/graph_flow.hpp"
#include "flowlab/operators.hpp"

namespace flowlab {

double grim_reaper(double x) {
  if (std::fabs(x) >= std::numbers::pi / 2)
    throw InvalidInputError("grim reaper: |x| must be < pi/2");
  return -std::log(std::cos(x));
}

double grim_reaper_slope(double x) {
  if (std::fabs(x) >= std::numbers::pi / 2)
    throw InvalidInputError("grim reaper: |x| must be < pi/2");
  return std::tan(x);
}

namespace {

double hermite(double t, double h, double f0, double f1, double d0,
               double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
}

}  // namespace

double SolitonProfile::value(double radius) const {
  if (radius < 0.0 || radius > r.back() * (1.0 + 1e-12))
    throw InvalidInputError("radius outside profile range");
  const double h = r[1] - r[0];
  const auto k = std::min(r.size() - 2,
                          static_cast<std::size_t>(std::max(0.0, radius / h)));
  const double t = (radius - r[k]) / h;
  return hermite(t, h, phi[k], phi[k + 1], dphi[k], dphi[k + 1]);
}

double SolitonProfile::slope(double radius) const {
  if (radius < 0.0 || radius > r.back() * (1.0 + 1e-12))
    throw InvalidInputError("radius outside profile range");
  const double h = r[1] - r[0];
  const auto k = std::min(r.size() - 2,
                          static_cast<std::size_t>(std::max(0.0, radius / h)));
  const double t = (radius - r[k]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * phi[k] + (3 * t2 - 4 * t + 1) * h * dphi[k] +
          (-6 * t2 + 6 * t) * phi[k + 1] + (3 * t2 - 2 * t) * h * dphi[k + 1]) /
         h;
}

double SolitonProfile::fitted_second_derivative_at_zero() const {
  // phi is even: phi = A r²/2 + B r⁴ near 0; eliminate B from the samples
  // at h and 2h.
  const double h = r[1] - r[0];
  return (16.0 * phi[1] - phi[2]) / (6.0 * h * h);
}

double SolitonProfile::max_equation_residual() const {
  const double h = r[1] - r[0];
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < r.size(); ++i) {
    const double d2 = (-dphi[i + 2] + 8 * dphi[i + 1] - 8 * dphi[i - 1] +
                       dphi[i - 2]) / (12 * h);
    const double res = d2 / (1.0 + dphi[i] * dphi[i]) +
                       (n - 1) * dphi[i] / r[i] - 1.0;
    worst = std::max(worst, std::fabs(res));
  }
  return worst;
}

SolitonProfile bowl_profile(int n, double r_max, double h) {
  if (n < 2) throw InvalidInputError("bowl profile needs n >= 2");
  if (!(r_max > 0.0) || !(h > 0.0))
    throw InvalidInputError("bowl profile: r_max and h must be positive");
  if (r_max < 20.0 * h)
    throw InvalidInputError("bowl profile: r_max must be at least 20 h");

  // Even series phi = r²/(2n) + a4 r⁴ + a6 r⁶ removes the phi'/r
  // indeterminacy at the origin; coefficients from matching the ODE.
  const double a4 = 1.0 / (n * n * n * (4.0 * n + 8.0));
  const double a6 = (12.0 - 4.0 * n) * a4 / (n * n * (6.0 * n + 24.0));
  auto series = [&](double rr) {
    const double r2 = rr * rr;
    return r2 / (2.0 * n) + a4 * r2 * r2 + a6 * r2 * r2 * r2;
  };
  auto series_slope = [&](double rr) {
    const double r2 = rr * rr;
    return rr / n + 4.0 * a4 * r2 * rr + 6.0 * a6 * r2 * r2 * rr;
  };
  auto rhs = [&](double rr, double p) {
    return (1.0 + p * p) * (1.0 - (n - 1) * p / rr);
  };

  const auto count = static_cast<std::size_t>(std::llround(r_max / h)) + 1;
  SolitonProfile out;
  out.n = n;
  out.r.resize(count);
  out.phi.resize(count);
  out.dphi.resize(count);
  const std::size_t k0 = 10;  // series up to r0 = 10 h
  for (std::size_t k = 0; k <= k0 && k < count; ++k) {
    const double rr = k * h;
    out.r[k] = rr;
    out.phi[k] = series(rr);
    out.dphi[k] = series_slope(rr);
  }
  double y = out.phi[std::min(k0, count - 1)];
  double p = out.dphi[std::min(k0, count - 1)];
  for (std::size_t k = k0; k + 1 < count; ++k) {
    const double rr = k * h;
    const double k1y = p, k1p = rhs(rr, p);
    const double k2y = p + 0.5 * h * k1p, k2p = rhs(rr + 0.5 * h, k2y);
    const double k3y = p + 0.5 * h * k2p, k3p = rhs(rr + 0.5 * h, k3y);
    const double k4y = p + h * k3p, k4p = rhs(rr + h, k4y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (!std::isfinite(y) || !std::isfinite(p)) throw IntegrationError(rr);
    out.r[k + 1] = rr + h;
    out.phi[k + 1] = y;
    out.dphi[k + 1] = p;
  }
  return out;
}

ScalarField lift_radial(const SolitonProfile& profile,
                        const StructuredGrid& grid) {
  ScalarField w(grid);
  for (int j = 0; j < grid.stored(1); ++j)
    for (int i = 0; i < grid.stored(0); ++i) {
      const double x = grid.coord(0, i);
      const double y = grid.dim() == 2 ? grid.coord(1, j) : 0.0;
      w.at(i, j) = profile.value(std::hypot(x, y));
    }
  return w;
}

void write_profile_csv(std::ostream& os, const SolitonProfile& profile) {
  os << "r,phi,dphi\n";
  char buf[128];
  for (std::size_t k = 0; k < profile.r.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", profile.r[k],
                  profile.phi[k], profile.dphi[k]);
    os << buf;
  }
}

namespace {

/// Exact Jacobian of the discrete residual v·div(Du/v) - 1 (interior rows;
/// boundary rows are identity). Matches the stencils of div_flux/gradient.
Eigen::SparseMatrix<double> stationary_jacobian(const ScalarField& u) {
  const StructuredGrid& g = u.grid();
  const int nx = g.stored(0), ny = g.stored(1);
  const double hx = g.spacing(0), hy = g.dim() == 2 ? g.spacing(1) : 1.0;
  const auto N = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.size() * 12);
  auto add = [&](int row, int i, int j, double w) {
    trip.emplace_back(row, static_cast<int>(g.index(i, j)), w);
  };
  ScalarField d = div_flux(u);
  VectorField grad = gradient(u);

  if (g.dim() == 1) {
    add(0, 0, 0, 1.0);
    add(nx - 1, nx - 1, 0, 1.0);
    for (int i = 1; i < nx - 1; ++i) {
      const double sp = (u[i + 1] - u[i]) / hx;
      const double sm = (u[i] - u[i - 1]) / hx;
      const double fp = std::pow(1.0 + sp * sp, -1.5);
      const double fm = std::pow(1.0 + sm * sm, -1.5);
      const double ux = grad.comp(i, 0);
      const double v = std::sqrt(1.0 + ux * ux);
      // v · dD/du
      add(i, i + 1, 0, v * fp / (hx * hx));
      add(i, i, 0, -v * (fp + fm) / (hx * hx));
      add(i, i - 1, 0, v * fm / (hx * hx));
      // D · dv/du, v from the central gradient
      const double dv = ux / v * d[i] / (2.0 * hx);
      add(i, i + 1, 0, dv);
      add(i, i - 1, 0, -dv);
    }
  } else {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (g.is_boundary(i, j))
          add(static_cast<int>(g.index(i, j)), i, j, 1.0);
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const int row = static_cast<int>(g.index(i, j));
        const std::size_t p = g.index(i, j);
        const double ux = grad.comp(p, 0), uy = grad.comp(p, 1);
        const double v = std::sqrt(1.0 + ux * ux + uy * uy);
        // Contribution of one x-face flux at (ic+1/2, j) entering the
        // divergence with sign sgn/hx.
        auto face_x = [&](int ic, double sgn) {
          const double a = (u.at(ic + 1, j) - u.at(ic, j)) / hx;
          const double b = (u.at(ic, j + 1) + u.at(ic + 1, j + 1) -
                            u.at(ic, j - 1) - u.at(ic + 1, j - 1)) / (4 * hy);
          const double q = std::sqrt(1.0 + a * a + b * b);
          const double q3 = q * q * q;
          const double dFa = (1.0 + b * b) / q3;
          const double dFb = -a * b / q3;
          const double c = sgn * v / hx;
          add(row, ic + 1, j, c * dFa / hx);
          add(row, ic, j, -c * dFa / hx);
          add(row, ic, j + 1, c * dFb / (4 * hy));
          add(row, ic + 1, j + 1, c * dFb / (4 * hy));
          add(row, ic, j - 1, -c * dFb / (4 * hy));
          add(row, ic + 1, j - 1, -c * dFb / (4 * hy));
        };
        auto face_y = [&](int jc, double sgn) {
          const double a = (u.at(i, jc + 1) - u.at(i, jc)) / hy;
          const double b = (u.at(i + 1, jc) + u.at(i + 1, jc + 1) -
                            u.at(i - 1, jc) - u.at(i - 1, jc + 1)) / (4 * hx);
          const double q = std::sqrt(1.0 + a * a + b * b);
          const double q3 = q * q * q;
          const double dFa = (1.0 + b * b) / q3;
          const double dFb = -a * b / q3;
          const double c = sgn * v / hy;
          add(row, i, jc + 1, c * dFa / hy);
          add(row, i, jc, -c * dFa / hy);
          add(row, i + 1, jc, c * dFb / (4 * hx));
          add(row, i + 1, jc + 1, c * dFb / (4 * hx));
          add(row, i - 1, jc, -c * dFb / (4 * hx));
          add(row, i - 1, jc + 1, -c * dFb / (4 * hx));
        };
        face_x(i, +1.0);
        face_x(i - 1, -1.0);
        face_y(j, +1.0);
        face_y(j - 1, -1.0);
        // D · dv/du
        const double dvx = ux / v * d[p] / (2.0 * hx);
        const double dvy = uy / v * d[p] / (2.0 * hy);
        add(row, i + 1, j, dvx);
        add(row, i - 1, j, -dvx);
        add(row, i, j + 1, dvy);
        add(row, i, j - 1, -dvy);
      }
  }
  Eigen::SparseMatrix<double> J(N, N);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

double residual_sup(const ScalarField& r) { return r.max_abs(); }

}  // namespace

StationaryResult stationary_solve(const ScalarField& u_init,
                                  const std::optional<ScalarField>& phi,
                                  const StationaryOptions& options) {
  const StructuredGrid& g = u_init.grid();
  if (g.boundary() != BoundaryKind::dirichlet)
    throw InvalidInputError("stationary_solve needs a dirichlet grid");
  ScalarField u = u_init;
  if (phi) {
    if (!(phi->grid() == g))
      throw GridMismatchError("stationary_solve: phi grid mismatch");
    for (int j = 0; j < g.stored(1); ++j)
      for (int i = 0; i < g.stored(0); ++i)
        if (g.is_boundary(i, j)) u.at(i, j) = phi->at(i, j);
  }
  ScalarField res = tmcf_rhs(u);
  double norm = residual_sup(res);
  int iter = 0;
  while (norm >= options.tol) {
    if (iter >= options.max_iters) throw NewtonError(norm, iter);
    Eigen::SparseMatrix<double> J = stationary_jacobian(u);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NewtonError(norm, iter);
    Eigen::VectorXd b(static_cast<Eigen::Index>(u.size()));
    for (std::size_t p = 0; p < u.size(); ++p)
      b[static_cast<Eigen::Index>(p)] = -res[p];
    Eigen::VectorXd delta = lu.solve(b);

    // Backtracking halving on the residual sup-norm.
    double s = 1.0;
    ScalarField trial = u;
    double trial_norm = norm;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      for (std::size_t p = 0; p < u.size(); ++p)
        trial[p] = u[p] + s * delta[static_cast<Eigen::Index>(p)];
      if (trial.all_finite()) {
        ScalarField trial_res = tmcf_rhs(trial);
        trial_norm = residual_sup(trial_res);
        if (trial_norm < norm) {
          u = std::move(trial);
          res = std::move(trial_res);
          norm = trial_norm;
          accepted = true;
          break;
        }
        trial = u;
      }
      s *= 0.5;
    }
    ++iter;
    if (!accepted) throw NewtonError(norm, iter);
  }
  return StationaryResult{std::move(u), iter, norm};
}

ScalarField stationary_jacobian_apply(const ScalarField& u,
                                      const ScalarField& w) {
  if (!(u.grid() == w.grid()))
    throw GridMismatchError("stationary_jacobian_apply: grid mismatch");
  Eigen::SparseMatrix<double> J = stationary_jacobian(u);
  Eigen::VectorXd x(static_cast<Eigen::Index>(w.size()));
  for (std::size_t p = 0; p < w.size(); ++p)
    x[static_cast<Eigen::Index>(p)] = w[p];
  Eigen::VectorXd y = J * x;
  ScalarField out(u.grid());
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] = y[static_cast<Eigen::Index>(p)];
  return out;
}

double barrier_offsets(const ScalarField& u0, const ScalarField& w) {
  if (!(u0.grid() == w.grid()))
    throw GridMismatchError("barrier_offsets: grid mismatch");
  double c = 0.0;
  for (std::size_t p = 0; p < u0.size(); ++p)
    c = std::max(c, std::fabs(u0[p] - w[p]));
  return c;
}

}  // namespace flowlab

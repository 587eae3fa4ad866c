#include "flowlab/curve.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(const CurveState& c) {
  const std::size_t n = c.points.size();
  if (n < 8) throw InvalidInputError("curve needs at least 8 points");
  const std::size_t last = c.closed ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const std::size_t j = (i + 1) % n;
    if ((c.points[j] - c.points[i]).norm() < kDegenerate)
      throw InvalidInputError("degenerate segment at vertex " +
                              std::to_string(i));
  }
}

double signed_area(const std::vector<Vec2>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % pts.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

/// Nonuniform 3-point first and second derivatives in arclength.
double deriv1(double fm, double f0, double fp, double dm, double dp) {
  return fp * dm / (dp * (dm + dp)) + f0 * (dp - dm) / (dm * dp) -
         fm * dp / (dm * (dm + dp));
}
double deriv2(double fm, double f0, double fp, double dm, double dp) {
  return 2.0 * (fp * dm - f0 * (dm + dp) + fm * dp) / (dm * dp * (dm + dp));
}

}  // namespace

CurveGeometry curve_geometry(const CurveState& c) {
  validate(c);
  const std::size_t n = c.points.size();
  CurveGeometry geo;
  geo.T.resize(n);
  geo.nu.resize(n);
  geo.a11.resize(n);
  geo.H.resize(n);
  geo.Vnu.resize(n);
  geo.Vt.resize(n);
  geo.f.resize(n);
  geo.ds.resize(n);

  // Outward normal for closed CCW ordering is the tangent rotated by -pi/2;
  // for CW ordering or open graph-like curves the sign flips.
  double rot;
  if (c.closed)
    rot = signed_area(c.points) >= 0.0 ? -1.0 : +1.0;
  else
    rot = +1.0;
  auto normal = [&](Vec2 t) { return Vec2{-rot * t.y, rot * t.x}; };

  auto at = [&](std::ptrdiff_t i) -> const Vec2& {
    if (c.closed) {
      const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
      return c.points[static_cast<std::size_t>((i % m + m) % m)];
    }
    return c.points[static_cast<std::size_t>(i)];
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i);
    if (!c.closed) k = std::clamp<std::ptrdiff_t>(k, 1, n - 2);
    const Vec2 xm = at(k - 1), x0 = at(k), xp = at(k + 1);
    const double dm = (x0 - xm).norm();
    const double dp = (xp - x0).norm();
    Vec2 tang = xp - xm;
    const double tn = tang.norm();
    if (tn < kDegenerate)
      throw InvalidInputError("degenerate tangent at vertex " +
                              std::to_string(i));
    tang = tang * (1.0 / tn);
    const Vec2 nu = normal(tang);
    const Vec2 xpp{deriv2(xm.x, x0.x, xp.x, dm, dp),
                   deriv2(xm.y, x0.y, xp.y, dm, dp)};
    geo.T[i] = tang;
    geo.nu[i] = nu;
    geo.a11[i] = xpp.dot(nu);
    geo.H[i] = -geo.a11[i];
    geo.Vnu[i] = c.V.dot(nu);
    geo.Vt[i] = c.V.dot(tang);
    geo.f[i] = geo.Vnu[i] - geo.H[i];
  }
  // Trapezoidal arclength weights.
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (c.closed || i > 0) w += 0.5 * (c.points[i] - at(i - 1)).norm();
    if (c.closed || i + 1 < n) w += 0.5 * (at(i + 1) - c.points[i]).norm();
    geo.ds[i] = w;
  }
  return geo;
}

namespace {

std::vector<Vec2> resample_uniform(const std::vector<Vec2>& pts, bool closed) {
  const std::size_t n = pts.size();
  const std::size_t nseg = closed ? n : n - 1;
  std::vector<double> s(nseg + 1, 0.0);
  for (std::size_t k = 0; k < nseg; ++k)
    s[k + 1] = s[k] + (pts[(k + 1) % n] - pts[k]).norm();
  const double total = s[nseg];
  std::vector<Vec2> out(n);
  const std::size_t ntarget = closed ? n : n - 1;
  std::size_t seg = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const double target =
        closed ? total * m / n : total * m / ntarget;
    while (seg + 1 < nseg && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? (target - s[seg]) / len : 0.0;
    const Vec2& a = pts[seg % n];
    const Vec2& b = pts[(seg + 1) % n];
    out[m] = a + (b - a) * t;
  }
  if (!closed) out[n - 1] = pts[n - 1];
  return out;
}

}  // namespace

CurveState curve_step(const CurveState& c, double dt,
                      const CurveStepOptions& options) {
  CurveGeometry geo = curve_geometry(c);
  const std::size_t n = c.points.size();
  double min_seg = std::numeric_limits<double>::infinity();
  const std::size_t nseg = c.closed ? n : n - 1;
  for (std::size_t k = 0; k < nseg; ++k)
    min_seg = std::min(min_seg, (c.points[(k + 1) % n] - c.points[k]).norm());
  const double limit = options.cfl * min_seg * min_seg;
  if (dt > limit * (1.0 + 1e-12)) throw CflError(dt, limit);

  CurveState next = c;
  for (std::size_t i = 0; i < n; ++i) {
    if (!c.closed && options.fix_endpoints && (i == 0 || i == n - 1)) continue;
    next.points[i] = c.points[i] + geo.nu[i] * (dt * geo.f[i]);
    if (!std::isfinite(next.points[i].x) || !std::isfinite(next.points[i].y))
      throw BlowUpError(i, c.t + dt);
  }
  if (options.redistribute)
    next.points = resample_uniform(next.points, c.closed);
  next.t = c.t + dt;
  return next;
}

bool self_intersects(const CurveState& c) {
  const std::size_t n = c.points.size();
  const std::size_t nseg = c.closed ? n : n - 1;
  auto seg = [&](std::size_t k) {
    return std::pair<Vec2, Vec2>{c.points[k], c.points[(k + 1) % n]};
  };
  auto cross = [](Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; };
  for (std::size_t i = 0; i + 1 < nseg; ++i)
    for (std::size_t j = i + 2; j < nseg; ++j) {
      if (c.closed && i == 0 && j == nseg - 1) continue;  // shared vertex
      auto [a, b] = seg(i);
      auto [p, q] = seg(j);
      const double d1 = cross(b - a, p - a);
      const double d2 = cross(b - a, q - a);
      const double d3 = cross(q - p, a - p);
      const double d4 = cross(q - p, b - p);
      if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    }
  return false;
}

EvolutionResiduals evolution_residuals(const CurveState& prev,
                                       const CurveState& mid,
                                       const CurveState& next) {
  const std::size_t n = mid.points.size();
  if (prev.points.size() != n || next.points.size() != n)
    throw InvalidInputError("evolution_residuals: vertex counts differ");
  const double dt1 = mid.t - prev.t;
  const double dt2 = next.t - mid.t;
  if (dt1 <= 0.0 || dt2 <= 0.0 || std::fabs(dt2 - dt1) > 1e-12 * dt1)
    throw InvalidInputError("evolution_residuals: need uniform time spacing");
  const double dt = dt1;

  CurveGeometry gm = curve_geometry(prev);
  CurveGeometry g0 = curve_geometry(mid);
  CurveGeometry gp = curve_geometry(next);

  EvolutionResiduals out;
  out.vnu.assign(n, kNaN);
  out.h.assign(n, kNaN);
  out.sup_vnu = 0.0;
  out.sup_h = 0.0;

  auto wrap = [&](std::ptrdiff_t i) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>((i % m + m) % m);
  };
  const std::size_t lo = mid.closed ? 0 : 2;
  const std::size_t hi = mid.closed ? n : n - 2;
  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t im = wrap(static_cast<std::ptrdiff_t>(i) - 1);
    const std::size_t ip = wrap(static_cast<std::ptrdiff_t>(i) + 1);
    const double dm = (mid.points[i] - mid.points[im]).norm();
    const double dp = (mid.points[ip] - mid.points[i]).norm();
    auto residual = [&](const std::vector<double>& qm,
                        const std::vector<double>& q0,
                        const std::vector<double>& qp) {
      const double ddt = (qp[i] - qm[i]) / (2.0 * dt);
      const double lap = deriv2(q0[im], q0[i], q0[ip], dm, dp);
      const double grad = deriv1(q0[im], q0[i], q0[ip], dm, dp);
      return ddt - lap + g0.Vt[i] * grad -
             q0[i] * g0.a11[i] * g0.a11[i];
    };
    out.vnu[i] = residual(gm.Vnu, g0.Vnu, gp.Vnu);
    out.h[i] = residual(gm.H, g0.H, gp.H);
    out.sup_vnu = std::max(out.sup_vnu, std::fabs(out.vnu[i]));
    out.sup_h = std::max(out.sup_h, std::fabs(out.h[i]));
  }
  return out;
}

CurveMonitors curve_monitors(const CurveState& c, double beta,
                                std::optional<double> lambda) {
  CurveGeometry geo = curve_geometry(c);
  const double lam = lambda.value_or(beta);
  CurveMonitors m;
  m.min_Vnu = m.min_H = m.min_beta_vnu_minus_h = m.min_a11_plus_beta_vnu =
      std::numeric_limits<double>::infinity();
  double sup_b2 = 0.0;
  bool denom_positive = true;
  for (std::size_t i = 0; i < geo.Vnu.size(); ++i) {
    const double denom = beta * geo.Vnu[i] - geo.H[i];
    m.min_Vnu = std::min(m.min_Vnu, geo.Vnu[i]);
    m.min_H = std::min(m.min_H, geo.H[i]);
    m.min_beta_vnu_minus_h = std::min(m.min_beta_vnu_minus_h, denom);
    m.min_a11_plus_beta_vnu =
        std::min(m.min_a11_plus_beta_vnu, geo.a11[i] + beta * geo.Vnu[i]);
    if (denom > 0.0) {
      const double b = (geo.a11[i] + lam * geo.Vnu[i]) / denom;
      sup_b2 = std::max(sup_b2, b * b);
    } else {
      denom_positive = false;
    }
  }
  if (denom_positive) m.sup_B2 = sup_b2;
  return m;
}

namespace {

double weighted_area_of(const std::vector<Vec2>& pts, bool closed, Vec2 V,
                        const CurveGeometry* geo_hint = nullptr) {
  CurveState tmp{pts, closed, 0.0, V};
  CurveGeometry local;
  const CurveGeometry& geo = geo_hint ? *geo_hint : (local = curve_geometry(tmp));
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = -V.dot(pts[i]);
    if (e > 700.0) throw OverflowError(e);
    sum += std::exp(e) * geo.ds[i];
  }
  return sum;
}

}  // namespace

double weighted_area(const CurveState& c) {
  return weighted_area_of(c.points, c.closed, c.V);
}

VariationCheck first_variation_check(const CurveState& c,
                                     const std::vector<double>& fperturb,
                                     double eps) {
  const std::size_t n = c.points.size();
  if (fperturb.size() != n)
    throw InvalidInputError("first_variation_check: perturbation size");
  if (!c.closed &&
      (std::fabs(fperturb.front()) > 0.0 || std::fabs(fperturb.back()) > 0.0))
    throw InvalidInputError(
        "first_variation_check: perturbation must vanish at endpoints");
  CurveGeometry geo = curve_geometry(c);
  double analytic = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    analytic += fperturb[i] * (geo.H[i] - geo.Vnu[i]) *
                std::exp(-c.V.dot(c.points[i])) * geo.ds[i];
  std::vector<Vec2> plus(n), minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = geo.nu[i] * (eps * fperturb[i]);
    plus[i] = c.points[i] + d;
    minus[i] = c.points[i] - d;
  }
  const double Fp = weighted_area_of(plus, c.closed, c.V);
  const double Fm = weighted_area_of(minus, c.closed, c.V);
  const double fd = (Fp - Fm) / (2.0 * eps);
  const bool warn =
      std::fabs(Fp - Fm) < 1e-12 * std::max(1.0, std::fabs(Fp));
  return VariationCheck{analytic, fd, warn};
}

double jacobi_form(const CurveState& c, const std::vector<double>& fperturb) {
  const std::size_t n = c.points.size();
  if (fperturb.size() != n) throw InvalidInputError("jacobi_form: size");
  if (!c.closed &&
      (std::fabs(fperturb.front()) > 0.0 || std::fabs(fperturb.back()) > 0.0))
    throw InvalidInputError("jacobi_form: perturbation must vanish at endpoints");
  CurveGeometry geo = curve_geometry(c);
  double crit = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    crit = std::max(crit, std::fabs(geo.H[i] - geo.Vnu[i]));
  if (crit >= 1e-4)
    throw InvalidInputError("jacobi_form: curve is not a discrete critical "
                            "point, sup|H-<V,nu>| = " + std::to_string(crit));
  auto wrap = [&](std::ptrdiff_t i) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>((i % m + m) % m);
  };
  double sum = 0.0;
  const std::size_t lo = c.closed ? 0 : 1;
  const std::size_t hi = c.closed ? n : n - 1;
  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t im = wrap(static_cast<std::ptrdiff_t>(i) - 1);
    const std::size_t ip = wrap(static_cast<std::ptrdiff_t>(i) + 1);
    const double dm = (c.points[i] - c.points[im]).norm();
    const double dp = (c.points[ip] - c.points[i]).norm();
    const double lf =
        deriv2(fperturb[im], fperturb[i], fperturb[ip], dm, dp) -
        geo.Vt[i] * deriv1(fperturb[im], fperturb[i], fperturb[ip], dm, dp) +
        geo.a11[i] * geo.a11[i] * fperturb[i];
    sum += fperturb[i] * lf * std::exp(-c.V.dot(c.points[i])) * geo.ds[i];
  }
  return -sum;
}

void write_curve_csv(std::ostream& os, const CurveState& c) {
  os << "index,x,y\n";
  char buf[96];
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, c.points[i].x,
                  c.points[i].y);
    os << buf;
  }
}

void write_curve_records_csv(std::ostream& os,
                             const std::vector<CurveRecord>& records) {
  os << "t,F,D,sup_dtu,sup_Du,min_H_minus_betaVnu,min_pinch_eig,"
        "cumulative_dissipation,min_H,min_Vnu,sup_B2\n";
  char buf[640];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g\n",
                  r.t, r.F, r.D, r.sup_f, r.sup_a11, r.min_beta_vnu_minus_h,
                  r.min_a11_plus_beta_vnu, r.cumulative_dissipation, r.min_H,
                  r.min_Vnu, r.sup_B2.value_or(kNaN));
    os << buf;
  }
}

CurveRunResult curve_run(const CurveRunSpec& spec) {
  CurveState state = spec.c0;
  CurveRunResult result{.records = {},
                        .snapshots = {},
                        .final_state = spec.c0,
                        .status = CurveStatus::completed,
                        .steps = 0};
  double cum_D = 0.0, prev_D = 0.0;
  bool have_prev = false;
  double next_record = 0.0;
  double dt = spec.dt;

  while (true) {
    CurveGeometry geo = curve_geometry(state);
    const std::size_t n = state.points.size();
    double min_seg = std::numeric_limits<double>::infinity();
    const std::size_t nseg = state.closed ? n : n - 1;
    for (std::size_t k = 0; k < nseg; ++k)
      min_seg = std::min(min_seg,
                         (state.points[(k + 1) % n] - state.points[k]).norm());
    const double step_dt =
        spec.dt > 0.0 ? spec.dt : spec.step.cfl * min_seg * min_seg;
    dt = step_dt;

    double D = 0.0, sup_f = 0.0, sup_a11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      D += geo.f[i] * geo.f[i] * std::exp(-state.V.dot(state.points[i])) *
           geo.ds[i];
      sup_f = std::max(sup_f, std::fabs(geo.f[i]));
      sup_a11 = std::max(sup_a11, std::fabs(geo.a11[i]));
    }
    if (have_prev) cum_D += dt * 0.5 * (prev_D + D);
    prev_D = D;
    have_prev = true;

    const bool done = state.t >= spec.t_end - 1e-12;
    if (done || state.t >= next_record - 0.5 * dt) {
      CurveMonitors m = curve_monitors(state, spec.beta, spec.lambda);
      result.records.push_back(CurveRecord{
          state.t, weighted_area(state), D, sup_f, sup_a11,
          m.min_beta_vnu_minus_h, m.min_a11_plus_beta_vnu, cum_D, m.min_H,
          m.min_Vnu, m.sup_B2});
      if (spec.store_snapshots) result.snapshots.push_back(state);
      if (self_intersects(state)) {
        result.status = CurveStatus::self_intersected;
        break;
      }
      while (next_record <= state.t + 0.5 * dt)
        next_record += spec.record_interval;
    }
    if (done) break;
    state = curve_step(state, std::min(step_dt, spec.t_end - state.t),
                       spec.step);
    ++result.steps;
  }
  result.final_state = state;
  return result;
}

}  // namespace flowlab

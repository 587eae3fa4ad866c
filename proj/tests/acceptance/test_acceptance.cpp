// Acceptance suite: one line of output per criterion, PASS or FAIL, with the
// measured quantities. The binary exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "flowlab/curve.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/graph_flow.hpp"
#include "flowlab/graph_geometry.hpp"
#include "flowlab/grid.hpp"
#include "flowlab/operators.hpp"
#include "flowlab/soliton.hpp"

using namespace flowlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

ScalarField reaper_field(const StructuredGrid& g) {
  ScalarField u(g);
  for (int i = 0; i < g.stored(0); ++i)
    u.at(i) = -std::log(std::cos(g.coord(0, i)));
  return u;
}

CurveState make_circle(std::size_t n, double radius, Vec2 V = {0.0, 0.0}) {
  CurveState c;
  c.V = V;
  c.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * static_cast<double>(i) / n;
    c.points[i] = {radius * std::cos(th), radius * std::sin(th)};
  }
  return c;
}

CurveState make_ellipse(std::size_t n, double a, double b,
                        Vec2 V = {0.0, 0.0}) {
  CurveState c;
  c.V = V;
  c.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * static_cast<double>(i) / n;
    c.points[i] = {a * std::cos(th), b * std::sin(th)};
  }
  return c;
}

CurveState make_reaper_curve(std::size_t n, Vec2 V = {0.0, -1.0}) {
  CurveState c;
  c.closed = false;
  c.V = V;
  c.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x =
        -1.2 + 2.4 * static_cast<double>(i) / static_cast<double>(n - 1);
    c.points[i] = {x, -std::log(std::cos(x))};
  }
  return c;
}

/// v-weighted dissipation integral for the identity cross-check, written as
/// (du/dt)²/v so that the held boundary contributes exactly zero.
double dissipation_v_weighted(const ScalarField& u) {
  ScalarField rhs = tmcf_rhs(u);
  GraphGeometry geo = graph_geometry(u);
  ScalarField q(u.grid()), eu(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p) {
    q[p] = rhs[p] * rhs[p] / geo.v[p];
    eu[p] = std::exp(u[p]);
  }
  return integrate(q, eu);
}

// shared acceptance runs ----------------------------------------------------

struct SharedRuns {
  // 1D dirichlet flow from a linear interpolant of grim-reaper data
  StructuredGrid grid1 = StructuredGrid::line(-1.3, 1.3, 261);
  double run1d_seconds = 0.0;
  FlowRunResult run1d = compute_run1d(grid1, run1d_seconds);

  // 2D dirichlet flow from zero data on 101x101
  StructuredGrid grid2 =
      StructuredGrid::rectangle(-1, 1, 101, -1, 1, 101);
  double run2d_seconds = 0.0;
  FlowRunResult run2d = compute_run2d(grid2, run2d_seconds);

  // periodic pinching run
  StructuredGrid gridp =
      StructuredGrid::line(0, 2 * M_PI, 257, BoundaryKind::periodic);
  FlowRunResult runp = compute_runp(gridp);

  static FlowRunResult compute_run1d(const StructuredGrid& g,
                                     double& seconds) {
    const ScalarField phi = reaper_field(g);
    ScalarField u0(g);
    const int n = g.stored(0);
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / (n - 1);
      u0.at(i) = (1 - s) * phi.at(0) + s * phi.at(n - 1);
    }
    FlowRunSpec spec(u0);
    spec.phi = phi;
    spec.t_end = 400.0;
    spec.tol_stationary = 1e-5;
    spec.record_interval = 0.1;
    spec.store_snapshots = true;
    const auto t0 = std::chrono::steady_clock::now();
    FlowRunResult res = run(spec);
    seconds = seconds_since(t0);
    return res;
  }

  static FlowRunResult compute_run2d(const StructuredGrid& g,
                                     double& seconds) {
    FlowRunSpec spec(ScalarField(g, 0.0));
    spec.t_end = 20.0;
    spec.tol_stationary = 1e-5;
    spec.record_interval = 0.05;
    spec.store_snapshots = true;
    const auto t0 = std::chrono::steady_clock::now();
    FlowRunResult res = run(spec);
    seconds = seconds_since(t0);
    return res;
  }

  static FlowRunResult compute_runp(const StructuredGrid& g) {
    ScalarField u0(g);
    for (int i = 0; i < g.stored(0); ++i)
      u0.at(i) = 0.1 * std::sin(g.coord(0, i));
    FlowRunSpec spec(u0);
    spec.t_end = 1.0;
    spec.tol_stationary = 0.0;
    spec.record_interval = 0.1;
    spec.beta = -0.2;
    spec.store_snapshots = true;
    return run(spec);
  }
};

// criteria ------------------------------------------------------------------

Outcome criterion_reaper_stationarity() {
  const auto t0 = std::chrono::steady_clock::now();
  auto sup_rhs = [](int nodes) {
    auto g = StructuredGrid::line(-1.3, 1.3, nodes);
    return tmcf_rhs(reaper_field(g)).max_abs();
  };
  const double ec = sup_rhs(521);
  const double ef = sup_rhs(1041);
  const double ratio = ec / ef;
  const double secs = seconds_since(t0);
  const bool pass =
      ec <= 5e-4 && ratio >= 3.2 && ratio <= 4.8 && secs < 5.0;
  return {pass, fmt("sup|rhs| = %.3g (gate 5e-4), halving ratio = %.2f "
                    "(gate 4+-0.8), %.2f s (gate 5 s)",
                    ec, ratio, secs)};
}

Outcome criterion_convergence_1d(const SharedRuns& shared) {
  const FlowRunResult& res = shared.run1d;
  double err = 0.0;
  for (int i = 0; i < shared.grid1.stored(0); ++i)
    err = std::max(err, std::fabs(res.final_u.at(i) +
                                  std::log(std::cos(shared.grid1.coord(0, i)))));
  const bool converged = res.status == FlowStatus::converged;
  const double sup_dtu = res.records.back().sup_dtu;
  const bool pass = converged && err < 1e-3 && sup_dtu < 1e-5 &&
                    shared.run1d_seconds < 60.0;
  return {pass, fmt("final sup-error = %.3g (gate 1e-3), sup|dtu| = %.3g "
                    "(gate 1e-5), %s, %.1f s (gate 60 s)",
                    err, sup_dtu, converged ? "converged" : "not converged",
                    shared.run1d_seconds)};
}

Outcome criterion_convergence_2d(const SharedRuns& shared) {
  const FlowRunResult& res = shared.run2d;
  StationaryResult newton = stationary_solve(ScalarField(shared.grid2, 0.0));
  double diff = 0.0;
  for (std::size_t p = 0; p < shared.grid2.size(); ++p)
    diff = std::max(diff, std::fabs(res.final_u[p] - newton.u[p]));
  const bool pass = res.status == FlowStatus::converged && diff < 1e-3 &&
                    newton.residual < 1e-10 && shared.run2d_seconds < 600.0;
  return {pass, fmt("|flow - newton| = %.3g (gate 1e-3), newton residual = "
                    "%.2g (gate 1e-10), %s, %.0f s (gate 600 s)",
                    diff, newton.residual,
                    res.status == FlowStatus::converged ? "converged"
                                                        : "not converged",
                    shared.run2d_seconds)};
}

Outcome criterion_dissipation_bound(const SharedRuns& shared) {
  auto check = [](const FlowRunResult& res) {
    return std::pair<double, double>{res.records.back().cumulative_dissipation,
                                     res.records.front().F};
  };
  auto [cum1, f1] = check(shared.run1d);
  auto [cum2, f2] = check(shared.run2d);
  const bool pass = cum1 <= f1 * 1.01 && cum2 <= f2 * 1.01;
  return {pass, fmt("1D: integral D = %.4f vs F(0) = %.4f; 2D: %.4f vs %.4f "
                    "(gate: integral <= 1.01 F(0))",
                    cum1, f1, cum2, f2)};
}

Outcome criterion_dissipation_identity(const SharedRuns& shared) {
  // |dF/dt + D| <= 5% of D wherever D > 1e-6, via centered differences of
  // the recorded energies. Two diagnostics are reported alongside the gate:
  // the same scan restricted to D > 1e-2 (where the centered difference and
  // the late-time stationary floor contribute little), and that restricted
  // scan with the integrand weighted by the area element v.
  double worst = 0.0, worst_mid = 0.0, worst_mid_v = 0.0;
  auto scan = [&](const FlowRunResult& res) {
    const auto& r = res.records;
    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
      const double dtp = r[k + 1].t - r[k].t;
      const double dtm = r[k].t - r[k - 1].t;
      if (std::fabs(dtp - dtm) > 0.01 * dtm) continue;
      if (r[k].D <= 1e-6) continue;
      const double dFdt = (r[k + 1].F - r[k - 1].F) / (dtp + dtm);
      worst = std::max(worst, std::fabs(dFdt + r[k].D) / r[k].D);
      if (r[k].D > 1e-2 && r[k].t >= 0.5) {
        worst_mid = std::max(worst_mid, std::fabs(dFdt + r[k].D) / r[k].D);
        const double Dv = dissipation_v_weighted(res.snapshots[k]);
        worst_mid_v = std::max(worst_mid_v, std::fabs(dFdt + Dv) / Dv);
      }
    }
  };
  scan(shared.run1d);
  scan(shared.run2d);
  const bool pass = worst <= 0.05;
  return {pass,
          fmt("max |dF/dt + D|/D = %.3f (gate 0.05); restricted to D > 1e-2: "
              "%.3f unweighted, %.4f with the integrand weighted by the area "
              "element v",
              worst, worst_mid, worst_mid_v)};
}

Outcome criterion_energy_monotone(const SharedRuns& shared) {
  const double worst = std::max({shared.run1d.max_step_energy_increase,
                                 shared.run2d.max_step_energy_increase,
                                 shared.runp.max_step_energy_increase});
  return {worst <= 1e-8,
          fmt("max single-step energy increase = %.3g (gate 1e-8)", worst)};
}

Outcome criterion_barrier(const SharedRuns& shared) {
  SolitonProfile profile = bowl_profile(2, 2.0, 1e-3);
  ScalarField w = lift_radial(profile, shared.grid2);
  const ScalarField u0(shared.grid2, 0.0);
  const double C = barrier_offsets(u0, w);
  double min_slack = 1e300;
  for (const ScalarField& u : shared.run2d.snapshots)
    for (std::size_t p = 0; p < u.size(); ++p) {
      min_slack = std::min(min_slack, u[p] - (w[p] - C));
      min_slack = std::min(min_slack, (w[p] + C) - u[p]);
    }
  const bool pass = min_slack >= -1e-10;
  return {pass, fmt("C = %.4f, min slack of w-C <= u <= w+C over %zu recorded "
                    "states = %.3g (gate >= -1e-10)",
                    C, shared.run2d.snapshots.size(), min_slack)};
}

Outcome criterion_comparison(const SharedRuns& shared) {
  const StructuredGrid& g = shared.grid1;
  const int n = g.stored(0);
  ScalarField phi = reaper_field(g);
  ScalarField lo(g), hi(g);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    lo.at(i) = (1 - s) * phi.at(0) + s * phi.at(n - 1);
    const double x = g.coord(0, i);
    hi.at(i) = lo.at(i) + 0.3 * std::cos(x * M_PI / 2.6) *
                              (1.0 - (x / 1.3) * (x / 1.3));
  }
  const double dt = 0.9 * cfl_limit(g);
  GraphFlowState a{lo, 0.0, dt, phi};
  GraphFlowState b{hi, 0.0, dt, phi};
  long violations = 0;
  long checks = 0;
  const long steps = static_cast<long>(2.0 / dt);
  const long stride = std::max(1L, steps / 40);
  for (long k = 0; k < steps; ++k) {
    a = step(a);
    b = step(b);
    if (k % stride == 0 || k + 1 == steps) {
      ++checks;
      for (int i = 0; i < n; ++i)
        if (a.u.at(i) > b.u.at(i)) ++violations;
    }
  }
  return {violations == 0,
          fmt("ordered initial data, %ld recorded times to t = 2.0: %ld "
              "ordering violations (gate 0)",
              checks, violations)};
}

Outcome criterion_paraboloid_sign() {
  auto g = StructuredGrid::rectangle(-2, 2, 41, -2, 2, 41);
  double worst_rel = 0.0;
  bool signs_ok = true;
  for (double lambda : {1.0, 0.1}) {
    ScalarField u(g);
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i) {
        const double x = g.coord(0, i), y = g.coord(1, j);
        u.at(i, j) = 0.5 * lambda * (x * x + y * y);
      }
    GraphGeometry geo = graph_geometry(u);
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i) {
        const std::size_t p = g.index(i, j);
        const double numeric = geo.H[p] - geo.Vnu[p];
        if (lambda == 1.0) {
          // closed form at lambda = 1, n = 2: -(1/v^3)
          const double x = g.coord(0, i), y = g.coord(1, j);
          const double v2 = 1.0 + x * x + y * y;
          const double closed = -1.0 / (v2 * std::sqrt(v2));
          worst_rel = std::max(
              worst_rel, std::fabs(numeric - closed) / std::fabs(closed));
          if (numeric >= 0.0) signs_ok = false;
        } else if (numeric <= 0.0) {
          signs_ok = false;
        }
      }
  }
  const bool pass = signs_ok && worst_rel <= 1e-3;
  return {pass, fmt("signs %s; max relative error vs closed form = %.3g "
                    "(gate 1e-3)",
                    signs_ok ? "correct" : "WRONG", worst_rel)};
}

Outcome criterion_pinching(const SharedRuns& shared) {
  const double h = shared.gridp.spacing(0);
  const double tol = 5.0 * h * h;
  double worst = 1e300;
  for (const ScalarField& u : shared.runp.snapshots) {
    GraphGeometry geo = graph_geometry(u);
    for (std::size_t p = 0; p < u.size(); ++p) {
      worst = std::min(worst, -0.2 * geo.Vnu[p] - geo.H[p]);  // H <= beta<V,nu>
      worst = std::min(worst, geo.H[p] - 0.2 * geo.Vnu[p]);   // beta1<V,nu> <= H
    }
  }
  const bool pass = worst >= -tol;
  return {pass, fmt("min margin of beta1<V,nu> <= H <= beta<V,nu> over "
                    "%zu recorded states = %.3g (gate >= -%.1e = -5 h^2)",
                    shared.runp.snapshots.size(), worst, tol)};
}

Outcome criterion_evolution_identities() {
  auto ellipse_residual = [](std::size_t n, double dt) {
    CurveState c0 = make_ellipse(n, 1.3, 0.8);
    CurveState c1 = curve_step(c0, dt);
    CurveState c2 = curve_step(c1, dt);
    return evolution_residuals(c0, c1, c2).sup_h;
  };
  const double ec = ellipse_residual(128, 5e-7);
  const double ef = ellipse_residual(256, 5e-7);
  const double exponent = std::log2(ec / ef);

  auto reaper_residual = [](std::size_t n) {
    CurveState prev = make_reaper_curve(n), mid = prev, next = prev;
    mid.t = 1e-3;
    next.t = 2e-3;
    EvolutionResiduals r = evolution_residuals(prev, mid, next);
    return std::max(r.sup_vnu, r.sup_h);
  };
  const double h201 = 2.4 / 200, h401 = 2.4 / 400;
  const double r201 = reaper_residual(201), r401 = reaper_residual(401);
  const double c = 100.0;
  const bool pass = exponent >= 1.6 && exponent <= 2.4 &&
                    r201 <= c * h201 * h201 && r401 <= c * h401 * h401;
  return {pass, fmt("ellipse refinement exponent = %.2f (gate [1.6, 2.4]); "
                    "static reaper residual %.3g / %.3g at h = %.3g / %.3g "
                    "(gate 100 h^2)",
                    exponent, r201, r401, h201, h401)};
}

Outcome criterion_shrinking_circle() {
  CurveRunSpec spec(make_circle(512, 1.0));
  spec.t_end = 0.4;
  spec.record_interval = 0.05;
  CurveRunResult res = curve_run(spec);
  const double want = std::sqrt(1.0 - 2.0 * 0.4);
  double err = 0.0;
  for (const auto& p : res.final_state.points)
    err = std::max(err, std::fabs(p.norm() - want));
  const bool pass = res.status == CurveStatus::completed && err <= 1e-3;
  return {pass, fmt("512 vertices to t = 0.4: max radius error vs "
                    "sqrt(R0^2 - 2t) = %.3g (gate 1e-3)",
                    err)};
}

Outcome criterion_variation_formulas() {
  // (a) order-2 agreement of the finite difference with the analytic first
  // variation on three curves
  struct Case {
    CurveState c;
    std::vector<double> f;
  };
  std::vector<Case> cases;
  {
    CurveState c = make_circle(512, 1.0, {0.0, -1.0});
    std::vector<double> f(512);
    for (std::size_t i = 0; i < 512; ++i)
      f[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / 512);
    cases.push_back({c, f});
  }
  {
    CurveState c = make_ellipse(512, 1.3, 0.8, {0.0, -1.0});
    std::vector<double> f(512);
    for (std::size_t i = 0; i < 512; ++i)
      f[i] = std::cos(2.0 * 2.0 * M_PI * static_cast<double>(i) / 512);
    cases.push_back({c, f});
  }
  {
    CurveState c = make_reaper_curve(401, {0.3, -1.0});
    std::vector<double> f(401);
    for (std::size_t i = 0; i < 401; ++i) {
      const double x = c.points[i].x;
      f[i] = std::sin(M_PI * (x + 1.2) / 2.4);
    }
    f.front() = f.back() = 0.0;
    cases.push_back({c, f});
  }
  bool order_ok = true;
  double worst_ratio = 4.0;
  for (const Case& cs : cases) {
    // eps large enough that the eps^2 truncation term dominates the O(h^2)
    // offset between the discrete variation sum and the exact derivative of
    // the polyline functional
    const double e1 =
        std::fabs(first_variation_check(cs.c, cs.f, 1e-1).finite_difference -
                  first_variation_check(cs.c, cs.f, 1e-1).analytic);
    const double e2 =
        std::fabs(first_variation_check(cs.c, cs.f, 5e-2).finite_difference -
                  first_variation_check(cs.c, cs.f, 5e-2).analytic);
    const double ratio = e1 / e2;
    if (ratio < 3.2 || ratio > 4.8) order_ok = false;
    if (std::fabs(ratio - 4.0) > std::fabs(worst_ratio - 4.0))
      worst_ratio = ratio;
  }

  // (b) the first variation vanishes at the grim reaper
  CurveState reaper = make_reaper_curve(801);
  std::vector<double> fr(801);
  for (std::size_t i = 0; i < 801; ++i) {
    const double x = reaper.points[i].x;
    fr[i] = 1.44 - x * x;
  }
  fr.front() = fr.back() = 0.0;
  const double critical = std::fabs(first_variation_check(reaper, fr, 1e-5)
                                        .analytic);

  // (c) jacobi form vs finite-difference second variation, three modes
  CurveGeometry geo = curve_geometry(reaper);
  double worst_second = 0.0;
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> f(801);
    for (std::size_t i = 0; i < 801; ++i) {
      const double x = reaper.points[i].x;
      f[i] = std::sin(k * M_PI * (x + 1.2) / 2.4);
    }
    f.front() = f.back() = 0.0;
    const double q = jacobi_form(reaper, f);
    auto area_at = [&](double eps) {
      CurveState moved = reaper;
      for (std::size_t i = 0; i < 801; ++i)
        moved.points[i] = reaper.points[i] + geo.nu[i] * (eps * f[i]);
      return weighted_area(moved);
    };
    const double e = 1e-3;
    const double fd =
        (area_at(e) - 2.0 * area_at(0.0) + area_at(-e)) / (e * e);
    worst_second = std::max(worst_second, std::fabs(q - fd) / std::fabs(fd));
  }

  const bool pass = order_ok && critical <= 1e-4 && worst_second <= 0.05;
  return {pass, fmt("first-variation halving ratio worst case %.2f (gate "
                    "4+-0.8); |dF| at the reaper = %.3g (gate 1e-4); jacobi "
                    "vs second difference worst %.3f (gate 0.05)",
                    worst_ratio, critical, worst_second)};
}

Outcome criterion_bowl() {
  double phi2_err = 0.0;
  for (int n : {2, 3}) {
    SolitonProfile p = bowl_profile(n, 1.0, 1e-3);
    phi2_err = std::max(phi2_err,
                        std::fabs(p.fitted_second_derivative_at_zero() -
                                  1.0 / n));
  }
  SolitonProfile p2 = bowl_profile(2, 2.0, 1e-3);
  auto lifted_residual = [&](int nodes) {
    auto g = StructuredGrid::rectangle(-1, 1, nodes, -1, 1, nodes);
    return tmcf_rhs(lift_radial(p2, g)).max_abs();
  };
  const double h41 = 2.0 / 40, h81 = 2.0 / 80;
  const double r41 = lifted_residual(41), r81 = lifted_residual(81);
  const double c = 2.0;
  const bool pass = phi2_err <= 1e-6 && r41 <= c * h41 * h41 &&
                    r81 <= c * h81 * h81;
  return {pass, fmt("max |phi''(0) - 1/n| = %.2g for n in {2,3} (gate 1e-6); "
                    "lifted residual %.3g / %.3g at h = %.3g / %.3g "
                    "(gate 2 h^2)",
                    phi2_err, r41, r81, h41, h81)};
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  SharedRuns shared;

  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "grim reaper stationarity",
       [] { return criterion_reaper_stationarity(); }},
      {2, "1D convergence to the translator",
       [&] { return criterion_convergence_1d(shared); }},
      {3, "2D convergence to the Newton solution",
       [&] { return criterion_convergence_2d(shared); }},
      {4, "dissipation bound",
       [&] { return criterion_dissipation_bound(shared); }},
      {5, "dissipation identity",
       [&] { return criterion_dissipation_identity(shared); }},
      {6, "energy monotonicity",
       [&] { return criterion_energy_monotone(shared); }},
      {7, "barrier trapping", [&] { return criterion_barrier(shared); }},
      {8, "comparison principle",
       [&] { return criterion_comparison(shared); }},
      {9, "paraboloid sign oracle", [] { return criterion_paraboloid_sign(); }},
      {10, "periodic pinching", [&] { return criterion_pinching(shared); }},
      {11, "evolution-identity residuals",
       [] { return criterion_evolution_identities(); }},
      {12, "shrinking-circle exactness",
       [] { return criterion_shrinking_circle(); }},
      {13, "variation formulas", [] { return criterion_variation_formulas(); }},
      {14, "bowl profile", [] { return criterion_bowl(); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%2d] %s  %s  (%s)\n", c.id,
                outcome.pass ? "PASS" : "FAIL", c.title,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

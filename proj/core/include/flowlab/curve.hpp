#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <vector>

namespace flowlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

/// Polyline hypersurface in R² moving under normal speed f = <V,nu> - H.
struct CurveState {
  std::vector<Vec2> points;
  bool closed = true;
  double t = 0.0;
  Vec2 V{0.0, 0.0};  ///< fixed translation vector
};

/// Per-vertex geometry. Closed curves use the outward normal (positive
/// signed-area ordering); open curves use the tangent rotated by +pi/2,
/// the upward normal for left-to-right graph-like ordering.
struct CurveGeometry {
  std::vector<Vec2> T;
  std::vector<Vec2> nu;
  std::vector<double> a11;  ///< <D_T T, nu>; -1/R on a circle with outward nu
  std::vector<double> H;    ///< -a11
  std::vector<double> Vnu;  ///< <V,nu>
  std::vector<double> Vt;   ///< <V,T>
  std::vector<double> f;    ///< Vnu - H, the normal speed
  std::vector<double> ds;   ///< arclength weights
};

CurveGeometry curve_geometry(const CurveState& c);

struct CurveStepOptions {
  double cfl = 0.25;  ///< dt <= cfl · (min segment length)²
  bool redistribute = false;  ///< resample toward uniform arclength
  bool fix_endpoints = true;  ///< open curves only
};

CurveState curve_step(const CurveState& c, double dt,
                      const CurveStepOptions& options = {});

bool self_intersects(const CurveState& c);

/// Residuals of the normal-motion evolution identities at the middle state,
/// from three consecutive vertex-tracked states (tangential redistribution
/// must be off). NaN at vertices without a full stencil.
struct EvolutionResiduals {
  std::vector<double> vnu;
  std::vector<double> h;
  double sup_vnu;
  double sup_h;
};

EvolutionResiduals evolution_residuals(const CurveState& prev,
                                       const CurveState& mid,
                                       const CurveState& next);

struct CurveMonitors {
  double min_Vnu;
  double min_H;
  double min_beta_vnu_minus_h;
  double min_a11_plus_beta_vnu;
  /// Defined only when beta·<V,nu> - H > 0 at every vertex.
  std::optional<double> sup_B2;
};

CurveMonitors curve_monitors(const CurveState& c, double beta,
                                std::optional<double> lambda = std::nullopt);

/// F(M) = sum of e^{-<V,X>} ds.
double weighted_area(const CurveState& c);

struct VariationCheck {
  double analytic;
  double finite_difference;
  bool cancellation_warning;
};

/// Analytic first variation sum f (H - <V,nu>) e^{-<V,X>} ds against a
/// central finite difference of F under the normal perturbation eps·f·nu.
VariationCheck first_variation_check(const CurveState& c,
                                     const std::vector<double>& fperturb,
                                     double eps);

/// -sum f (Lf) e^{-<V,X>} ds with L = Delta - grad_{V^T} + |A|²; requires c
/// to be a discrete critical point (sup|H - <V,nu>| < 1e-4).
double jacobi_form(const CurveState& c, const std::vector<double>& fperturb);

/// CSV with columns (index, x, y).
void write_curve_csv(std::ostream& os, const CurveState& c);

enum class CurveStatus { completed, self_intersected };

struct CurveRecord {
  double t;
  double F;        ///< weighted area
  double D;        ///< sum f² e^{-<V,X>} ds
  double sup_f;
  double sup_a11;
  double min_beta_vnu_minus_h;
  double min_a11_plus_beta_vnu;
  double cumulative_dissipation;
  double min_H;
  double min_Vnu;
  std::optional<double> sup_B2;
};

/// Graph-flow CSV schema plus the curve-specific columns.
void write_curve_records_csv(std::ostream& os,
                             const std::vector<CurveRecord>& records);

struct CurveRunSpec {
  CurveState c0;
  double dt = 0.0;  ///< 0 = CFL policy
  CurveStepOptions step;
  double t_end = 1.0;
  double record_interval = 0.05;
  double beta = 1.0;
  std::optional<double> lambda;
  bool store_snapshots = false;

  explicit CurveRunSpec(CurveState initial) : c0(std::move(initial)) {}
};

struct CurveRunResult {
  std::vector<CurveRecord> records;
  std::vector<CurveState> snapshots;
  CurveState final_state;
  CurveStatus status;
  long steps;
};

CurveRunResult curve_run(const CurveRunSpec& spec);

}  // namespace flowlab

#pragma once

#include <optional>
#include <iosfwd>
#include <vector>

#include "flowlab/graph_geometry.hpp"
#include "flowlab/grid.hpp"

namespace flowlab {

/// Right-hand side of the graphical flow: v·div(Du/v) - 1 at interior nodes,
/// 0 at dirichlet boundary nodes (boundary held fixed).
ScalarField tmcf_rhs(const ScalarField& u);

/// Largest admissible explicit timestep: h_min² / (2 n).
double cfl_limit(const StructuredGrid& grid);

/// Weighted area F(u) = ∫ v e^u dx.
double energy(const ScalarField& u);

/// ∫ (H + 1/v)² e^u dx.
double dissipation(const ScalarField& u);

enum class TimeStepping { explicit_euler, semi_implicit };

struct GraphFlowState {
  ScalarField u;
  double t = 0.0;
  double dt = 0.0;
  /// Dirichlet boundary data; only boundary nodes are read. Empty on
  /// periodic grids.
  std::optional<ScalarField> phi;
};

/// One explicit Euler step. Throws CflError if dt exceeds the limit and
/// BlowUpError on non-finite updates.
GraphFlowState step(const GraphFlowState& state);

/// One semi-implicit step: coefficients of the nondivergence operator are
/// lagged at the current state and the linear system is solved directly.
/// Not subject to the explicit CFL bound.
GraphFlowState step_semi_implicit(const GraphFlowState& state);

struct DiagnosticsRecord {
  double t;
  double F;
  double D;
  double sup_dtu;
  double sup_Du;
  /// Pinching monitor: min over nodes of beta·<V,nu> - H.
  double min_H_minus_betaVnu;
  double min_pinch_eig;
  double cumulative_dissipation;
};

/// CSV with the exact column set of the time-series format.
void write_diagnostics_csv(std::ostream& os,
                           const std::vector<DiagnosticsRecord>& records);

enum class FlowStatus { converged, t_end_reached };

struct FlowRunSpec {
  ScalarField u0;
  std::optional<ScalarField> phi;  ///< defaults to the boundary trace of u0
  double dt = 0.0;            ///< 0 = explicit-cfl policy
  double cfl_fraction = 0.9;  ///< used by the explicit-cfl policy
  TimeStepping scheme = TimeStepping::explicit_euler;
  double t_end = 1.0;
  double tol_stationary = 1e-5;
  double record_interval = 0.1;
  double beta = 1.0;  ///< monitor parameter
  bool store_snapshots = false;

  explicit FlowRunSpec(ScalarField initial) : u0(std::move(initial)) {}
};

struct FlowRunResult {
  std::vector<DiagnosticsRecord> records;
  std::vector<ScalarField> snapshots;  ///< one per record if requested
  ScalarField final_u;
  double final_t;
  FlowStatus status;
  double max_step_energy_increase;  ///< max over steps of F(t+dt) - F(t)
  long steps;
};

FlowRunResult run(const FlowRunSpec& spec);

}  // namespace flowlab

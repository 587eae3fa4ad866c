#include "execute.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "flowlab/curve.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/graph_flow.hpp"
#include "flowlab/graph_geometry.hpp"
#include "flowlab/grid.hpp"
#include "flowlab/operators.hpp"
#include "flowlab/soliton.hpp"

namespace flowlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

/// Collects artifacts so the manifest can list every file with a checksum.
class OutputDir {
 public:
  OutputDir(std::string path, bool quiet)
      : path_(std::move(path)), quiet_(quiet) {
    if (path_.empty())
      throw InvalidInputError("no output directory (spec key out or --out)");
    if (fs::exists(path_))
      throw InvalidInputError("output directory '" + path_ +
                              "' already exists; refusing to overwrite");
    fs::create_directories(path_);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path full = fs::path(path_) / name;
    std::ofstream os(full, std::ios::binary);
    if (!os) throw Error("cannot open " + full.string() + " for writing");
    os << content;
    os.close();
    files_.push_back({name, fnv1a64(content)});
    if (!quiet_) std::cout << "wrote " << full.string() << "\n";
  }

  void write_manifest(json manifest) {
    json files = json::array();
    for (const auto& [name, hash] : files_) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(hash));
      files.push_back({{"name", name}, {"fnv1a64", buf}});
    }
    manifest["files"] = files;
    const fs::path full = fs::path(path_) / "manifest.json";
    std::ofstream os(full, std::ios::binary);
    os << manifest.dump(2) << "\n";
    if (!quiet_) std::cout << "wrote " << full.string() << "\n";
  }

 private:
  std::string path_;
  bool quiet_;
  std::vector<std::pair<std::string, std::uint64_t>> files_;
};

json base_manifest(const RunSpec& spec, const ExecuteOptions& options,
                   double wall_seconds, const std::string& status) {
  return json{{"version", kVersion},
              {"mode", mode_name(spec.mode)},
              {"spec_text", options.spec_text},
              {"wall_time_seconds", wall_seconds},
              {"status", status}};
}

StructuredGrid build_grid(const RunSpec& s) {
  const BoundaryKind bk = s.boundary == "periodic" ? BoundaryKind::periodic
                                                   : BoundaryKind::dirichlet;
  if (s.dim == 1) return StructuredGrid::line(s.x_min, s.x_max, s.nodes_x, bk);
  return StructuredGrid::rectangle(s.x_min, s.x_max, s.nodes_x, s.y_min,
                                   s.y_max, s.nodes_y, bk);
}

ScalarField build_profile(const RunSpec& s, const StructuredGrid& g) {
  ScalarField u(g, 0.0);
  if (s.profile == "paraboloid" || s.profile == "sine" ||
      s.profile == "grim-reaper") {
    for (int j = 0; j < g.stored(1); ++j)
      for (int i = 0; i < g.stored(0); ++i) {
        const double x = g.coord(0, i);
        const double y = g.dim() == 2 ? g.coord(1, j) : 0.0;
        if (s.profile == "paraboloid")
          u.at(i, j) = 0.5 * s.profile_lambda * (x * x + y * y);
        else if (s.profile == "grim-reaper")
          u.at(i, j) = grim_reaper(x);
        else
          u.at(i, j) = g.dim() == 2
                           ? s.profile_eps * std::sin(x) * std::sin(y)
                           : s.profile_eps * std::sin(x);
      }
  } else if (s.profile == "bowl") {
    const double reach = std::max({std::fabs(s.x_min), std::fabs(s.x_max),
                                   std::fabs(s.y_min), std::fabs(s.y_max)});
    const double r_need = std::hypot(reach, reach) * 1.01;
    u = lift_radial(bowl_profile(2, std::max(r_need, 21 * 1e-3), 1e-3), g);
  } else if (s.profile == "snapshot") {
    u = load_snapshot(s.snapshot_path);
    if (!(u.grid() == g))
      throw InvalidInputError("snapshot grid does not match the spec grid");
  }
  if (s.perturb > 0.0) {
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> dist(-s.perturb, s.perturb);
    for (int j = 0; j < g.stored(1); ++j)
      for (int i = 0; i < g.stored(0); ++i) {
        const double noise = dist(rng);  // drawn per node, boundary discarded
        if (!g.is_boundary(i, j)) u.at(i, j) += noise;
      }
  }
  return u;
}

CurveState build_curve(const RunSpec& s) {
  CurveState c;
  c.V = {s.vx, s.vy};
  const std::size_t n = static_cast<std::size_t>(s.vertices);
  c.points.resize(n);
  if (s.curve == "grim-reaper") {
    c.closed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -s.half_width +
                       2.0 * s.half_width * static_cast<double>(i) /
                           static_cast<double>(n - 1);
      c.points[i] = {x, -std::log(std::cos(x))};
    }
  } else {
    c.closed = true;
    const double a = s.curve == "circle" ? s.radius : s.ellipse_a;
    const double b = s.curve == "circle" ? s.radius : s.ellipse_b;
    for (std::size_t i = 0; i < n; ++i) {
      const double th = 2.0 * M_PI * static_cast<double>(i) /
                        static_cast<double>(n);
      c.points[i] = {a * std::cos(th), b * std::sin(th)};
    }
  }
  return c;
}

std::string snapshot_string(const ScalarField& u) {
  std::ostringstream os;
  write_snapshot(os, u);
  return os.str();
}

std::string curve_string(const CurveState& c) {
  std::ostringstream os;
  write_curve_csv(os, c);
  return os.str();
}

std::string flow_status_name(FlowStatus status) {
  return status == FlowStatus::converged ? "converged" : "t_end_reached";
}

int run_graph(const RunSpec& s, const ExecuteOptions& opt, OutputDir& out,
              const std::chrono::steady_clock::time_point& t0) {
  StructuredGrid g = build_grid(s);
  ScalarField u0 = build_profile(s, g);

  FlowRunSpec run_spec(u0);
  run_spec.dt = s.dt_policy == "fixed" ? s.dt : 0.0;
  run_spec.cfl_fraction = s.cfl_fraction;
  run_spec.scheme = s.scheme == "semi-implicit" ? TimeStepping::semi_implicit
                                                : TimeStepping::explicit_euler;
  run_spec.t_end = s.t_end;
  run_spec.tol_stationary = s.tol_stationary;
  run_spec.record_interval = s.record_interval;
  run_spec.beta = s.beta;
  run_spec.store_snapshots = s.store_snapshots;

  std::string status;
  json results;
  int exit_code = 0;
  try {
    FlowRunResult res = run(run_spec);
    std::ostringstream diag;
    write_diagnostics_csv(diag, res.records);
    out.write("diagnostics.csv", diag.str());
    out.write("final.snapshot", snapshot_string(res.final_u));
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "snapshot_%04zu.snapshot", k);
      out.write(name, snapshot_string(res.snapshots[k]));
    }
    status = flow_status_name(res.status);
    PinchMonitors pm1 = pinch_monitors(res.final_u, s.beta1);
    results = {{"final_t", res.final_t},
               {"steps", res.steps},
               {"final_sup_dtu", res.records.back().sup_dtu},
               {"max_step_energy_increase", res.max_step_energy_increase},
               {"final_min_beta1Vnu_minus_H", pm1.min_beta_vnu_minus_h}};
  } catch (const BlowUpError& e) {
    status = "blow_up";
    results = {{"blow_up_node", e.node}, {"blow_up_t", e.t}};
    exit_code = 1;
  }
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  json manifest = base_manifest(s, opt, wall, status);
  manifest["results"] = results;
  out.write_manifest(manifest);
  return exit_code;
}

int run_curve(const RunSpec& s, const ExecuteOptions& opt, OutputDir& out,
              const std::chrono::steady_clock::time_point& t0) {
  CurveRunSpec run_spec(build_curve(s));
  run_spec.dt = s.dt_policy == "fixed" ? s.dt : 0.0;
  run_spec.step.cfl = 0.25 * s.cfl_fraction;
  run_spec.step.redistribute = s.redistribute;
  run_spec.t_end = s.t_end;
  run_spec.record_interval = s.record_interval;
  run_spec.beta = s.beta;
  run_spec.lambda = s.lambda;
  run_spec.store_snapshots = s.store_snapshots;

  std::string status;
  json results;
  int exit_code = 0;
  try {
    CurveRunResult res = curve_run(run_spec);
    std::ostringstream diag;
    write_curve_records_csv(diag, res.records);
    out.write("diagnostics.csv", diag.str());
    out.write("final_curve.csv", curve_string(res.final_state));
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "curve_%04zu.csv", k);
      out.write(name, curve_string(res.snapshots[k]));
    }
    status = res.status == CurveStatus::completed ? "t_end_reached"
                                                  : "self_intersected";
    if (res.status != CurveStatus::completed) exit_code = 1;
    results = {{"final_t", res.final_state.t},
               {"steps", res.steps},
               {"final_F", res.records.back().F}};
  } catch (const BlowUpError& e) {
    status = "blow_up";
    results = {{"blow_up_node", e.node}, {"blow_up_t", e.t}};
    exit_code = 1;
  }
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  json manifest = base_manifest(s, opt, wall, status);
  manifest["results"] = results;
  out.write_manifest(manifest);
  return exit_code;
}

int run_bowl(const RunSpec& s, const ExecuteOptions& opt, OutputDir& out,
             const std::chrono::steady_clock::time_point& t0) {
  SolitonProfile profile = bowl_profile(s.n, s.r_max, s.h);
  std::ostringstream csv;
  write_profile_csv(csv, profile);
  out.write("profile.csv", csv.str());
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  json manifest = base_manifest(s, opt, wall, "converged");
  manifest["results"] = {
      {"phi2_at_zero", profile.fitted_second_derivative_at_zero()},
      {"max_equation_residual", profile.max_equation_residual()}};
  out.write_manifest(manifest);
  return 0;
}

int run_stationary(const RunSpec& s, const ExecuteOptions& opt, OutputDir& out,
                   const std::chrono::steady_clock::time_point& t0) {
  StructuredGrid g = build_grid(s);
  ScalarField u0 = build_profile(s, g);
  StationaryOptions nopt;
  nopt.tol = s.tol_newton;
  StationaryResult res = stationary_solve(u0, std::nullopt, nopt);
  out.write("solution.snapshot", snapshot_string(res.u));
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  json manifest = base_manifest(s, opt, wall, "converged");
  manifest["results"] = {{"iterations", res.iterations},
                         {"residual", res.residual}};
  out.write_manifest(manifest);
  return 0;
}

// ---------------------------------------------------------------------------
// invariant suite

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<std::function<InvariantResult()>> invariant_checks() {
  auto make = [](std::string name, std::function<std::string()> body) {
    return [name = std::move(name),
            body = std::move(body)]() -> InvariantResult {
      try {
        return {name, true, body()};
      } catch (const std::exception& e) {
        return {name, false, e.what()};
      }
    };
  };
  auto expect = [](bool ok, const std::string& detail) {
    if (!ok) throw Error("failed: " + detail);
    return detail;
  };

  std::vector<std::function<InvariantResult()>> checks;

  checks.push_back(make("grim-reaper-stationary", [expect] {
    auto g = StructuredGrid::line(-1.3, 1.3, 261);
    ScalarField u(g);
    for (int i = 0; i < 261; ++i) u.at(i) = grim_reaper(g.coord(0, i));
    const double sup = tmcf_rhs(u).max_abs();
    return expect(sup < 5e-3, "sup|rhs| = " + std::to_string(sup));
  }));

  checks.push_back(make("cfl-guard", [expect] {
    auto g = StructuredGrid::line(-1, 1, 101);
    GraphFlowState s{ScalarField(g, 0.0), 0.0, 1.0, ScalarField(g, 0.0)};
    try {
      step(s);
    } catch (const CflError&) {
      return expect(true, "oversized dt rejected");
    }
    return expect(false, "oversized dt accepted");
  }));

  checks.push_back(make("comparison-principle", [expect] {
    auto g = StructuredGrid::line(-1, 1, 81);
    ScalarField lo(g, 0.0), hi(g, 0.0);
    for (int i = 1; i < 80; ++i) {
      const double x = g.coord(0, i);
      lo.at(i) = 0.4 * std::sin(M_PI * x);
      hi.at(i) = lo.at(i) + 0.2 * (1.0 - x * x);
    }
    const double dt = 0.9 * cfl_limit(g);
    GraphFlowState a{lo, 0.0, dt, ScalarField(g, 0.0)};
    GraphFlowState b{hi, 0.0, dt, ScalarField(g, 0.0)};
    for (int k = 0; k < 50; ++k) {
      a = step(a);
      b = step(b);
      for (std::size_t p = 0; p < g.size(); ++p)
        if (a.u[p] > b.u[p] + 1e-14)
          return expect(false, "ordering violated at step " +
                                   std::to_string(k));
    }
    return expect(true, "ordering preserved for 50 steps");
  }));

  checks.push_back(make("energy-monotone", [expect] {
    auto g = StructuredGrid::line(-1, 1, 81);
    ScalarField u0(g, 0.0);
    for (int i = 1; i < 80; ++i)
      u0.at(i) = 0.3 * std::sin(M_PI * g.coord(0, i));
    FlowRunSpec spec(u0);
    spec.t_end = 0.05;
    spec.record_interval = 0.01;
    FlowRunResult res = run(spec);
    return expect(res.max_step_energy_increase < 1e-8,
                  "max step increase = " +
                      std::to_string(res.max_step_energy_increase));
  }));

  checks.push_back(make("dissipation-bound", [expect] {
    auto g = StructuredGrid::line(-1, 1, 81);
    ScalarField u0(g, 0.0);
    for (int i = 1; i < 80; ++i)
      u0.at(i) = 0.3 * std::sin(M_PI * g.coord(0, i));
    FlowRunSpec spec(u0);
    spec.t_end = 5.0;
    spec.record_interval = 0.5;
    FlowRunResult res = run(spec);
    const double cum = res.records.back().cumulative_dissipation;
    const double f0 = res.records.front().F;
    return expect(cum <= f0 * 1.01, "cumulative D = " + std::to_string(cum) +
                                        " vs F(0) = " + std::to_string(f0));
  }));

  checks.push_back(make("paraboloid-sign", [expect] {
    auto g = StructuredGrid::rectangle(-2, 2, 41, -2, 2, 41);
    for (double lambda : {1.0, 0.1}) {
      ScalarField u(g);
      for (int j = 0; j < 41; ++j)
        for (int i = 0; i < 41; ++i) {
          const double x = g.coord(0, i), y = g.coord(1, j);
          u.at(i, j) = 0.5 * lambda * (x * x + y * y);
        }
      GraphGeometry geo = graph_geometry(u);
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double q = geo.H[p] - geo.Vnu[p];
        if (lambda == 1.0 && q >= 0.0)
          return expect(false, "lambda=1 sign wrong");
        if (lambda == 0.1 && q <= 0.0)
          return expect(false, "lambda=0.1 sign wrong");
      }
    }
    return expect(true, "H - <V,nu> signs match the closed form");
  }));

  checks.push_back(make("shrinking-circle", [expect] {
    CurveState c;
    c.points.resize(256);
    for (std::size_t i = 0; i < 256; ++i) {
      const double th = 2.0 * M_PI * static_cast<double>(i) / 256;
      c.points[i] = {std::cos(th), std::sin(th)};
    }
    CurveRunSpec spec(c);
    spec.t_end = 0.3;
    spec.record_interval = 0.1;
    CurveRunResult res = curve_run(spec);
    const double want = std::sqrt(1.0 - 0.6);
    double err = 0.0;
    for (const auto& p : res.final_state.points)
      err = std::max(err, std::fabs(p.norm() - want));
    return expect(err < 5e-3, "radius error = " + std::to_string(err));
  }));

  checks.push_back(make("curve-dissipation-exact", [expect] {
    CurveState c;
    c.points.resize(256);
    for (std::size_t i = 0; i < 256; ++i) {
      const double th = 2.0 * M_PI * static_cast<double>(i) / 256;
      c.points[i] = {std::cos(th), std::sin(th)};
    }
    CurveRunSpec spec(c);
    spec.t_end = 0.2;
    spec.record_interval = 0.05;
    CurveRunResult res = curve_run(spec);
    const double drop = res.records.front().F - res.records.back().F;
    const double cum = res.records.back().cumulative_dissipation;
    return expect(std::fabs(cum - drop) < 0.01 * drop,
                  "F drop " + std::to_string(drop) + " vs integral D " +
                      std::to_string(cum));
  }));

  checks.push_back(make("bowl-series", [expect] {
    SolitonProfile p = bowl_profile(2, 1.0, 1e-3);
    const double fitted = p.fitted_second_derivative_at_zero();
    return expect(std::fabs(fitted - 0.5) < 1e-6,
                  "phi''(0) = " + std::to_string(fitted));
  }));

  checks.push_back(make("snapshot-roundtrip", [expect] {
    auto g = StructuredGrid::rectangle(-1.25, 3.5, 7, 0.1, 0.9, 5);
    ScalarField u(g);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (std::size_t p = 0; p < u.size(); ++p) u[p] = dist(rng);
    std::ostringstream os;
    write_snapshot(os, u);
    std::istringstream is(os.str());
    ScalarField back = read_snapshot(is);
    std::ostringstream os2;
    write_snapshot(os2, back);
    return expect(os.str() == os2.str(), "serialization is bit-exact");
  }));

  return checks;
}

unsigned fanout_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FLOWLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw InvalidInputError("FLOWLAB_THREADS must be a positive integer");
    cap = static_cast<unsigned>(v);
  }
  return cap;
}

int run_invariants(const RunSpec& s, const ExecuteOptions& opt, OutputDir& out,
                   const std::chrono::steady_clock::time_point& t0) {
  auto checks = invariant_checks();
  std::vector<InvariantResult> results(checks.size());

  // fan out independent checks; results land in fixed slots so the report
  // order is deterministic regardless of scheduling
  const unsigned cap =
      std::min<unsigned>(fanout_cap(), static_cast<unsigned>(checks.size()));
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= checks.size()) return;
      results[k] = checks[k]();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < cap; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << "name,pass,detail\n";
  bool all_pass = true;
  for (const auto& r : results) {
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    csv << r.name << ',' << (r.pass ? "pass" : "fail") << ',' << detail
        << '\n';
    all_pass = all_pass && r.pass;
  }
  out.write("invariants.csv", csv.str());

  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  json manifest =
      base_manifest(s, opt, wall, all_pass ? "converged" : "failed");
  manifest["results"] = {{"checks", results.size()},
                         {"passed", static_cast<std::size_t>(std::count_if(
                                        results.begin(), results.end(),
                                        [](const InvariantResult& r) {
                                          return r.pass;
                                        }))}};
  out.write_manifest(manifest);
  return all_pass ? 0 : 1;
}

}  // namespace

int execute(const RunSpec& spec, const ExecuteOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputDir out(options.out_dir, options.quiet);
  switch (spec.mode) {
    case Mode::graph_run: return run_graph(spec, options, out, t0);
    case Mode::curve_run: return run_curve(spec, options, out, t0);
    case Mode::bowl: return run_bowl(spec, options, out, t0);
    case Mode::stationary: return run_stationary(spec, options, out, t0);
    case Mode::check_invariants:
      return run_invariants(spec, options, out, t0);
  }
  throw Error("unreachable mode");
}

}  // namespace flowlab::cli

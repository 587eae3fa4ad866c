#include "flowlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flowlab/errors.hpp"

namespace flowlab {

StructuredGrid::StructuredGrid(int dim, std::array<double, 2> lo,
                               std::array<double, 2> hi,
                               std::array<int, 2> nodes, BoundaryKind bc)
    : dim_(dim), lo_(lo), hi_(hi), nodes_(nodes), bc_(bc) {
  if (dim != 1 && dim != 2)
    throw InvalidInputError("grid dimension must be 1 or 2");
  for (int k = 0; k < dim_; ++k) {
    if (nodes_[k] < 3)
      throw InvalidInputError("need at least 3 nodes per axis");
    if (!(hi_[k] > lo_[k]))
      throw InvalidInputError("empty extent on axis " + std::to_string(k));
    h_[k] = (hi_[k] - lo_[k]) / (nodes_[k] - 1);
    stored_[k] = bc == BoundaryKind::periodic ? nodes_[k] - 1 : nodes_[k];
  }
  for (int k = dim_; k < 2; ++k) {
    lo_[k] = 0.0;
    hi_[k] = 0.0;
    nodes_[k] = 1;
    stored_[k] = 1;
    h_[k] = 1.0;
  }
}

StructuredGrid StructuredGrid::line(double a, double b, int n,
                                    BoundaryKind bc) {
  return StructuredGrid(1, {a, 0.0}, {b, 0.0}, {n, 1}, bc);
}

StructuredGrid StructuredGrid::rectangle(double ax, double bx, int nx,
                                         double ay, double by, int ny,
                                         BoundaryKind bc) {
  return StructuredGrid(2, {ax, ay}, {bx, by}, {nx, ny}, bc);
}

double StructuredGrid::min_spacing() const {
  double h = h_[0];
  for (int k = 1; k < dim_; ++k) h = std::min(h, h_[k]);
  return h;
}

std::size_t StructuredGrid::size() const {
  std::size_t s = 1;
  for (int k = 0; k < dim_; ++k) s *= static_cast<std::size_t>(stored_[k]);
  return s;
}

bool StructuredGrid::is_boundary(int i, int j) const {
  if (bc_ == BoundaryKind::periodic) return false;
  if (i == 0 || i == stored_[0] - 1) return true;
  if (dim_ == 2 && (j == 0 || j == stored_[1] - 1)) return true;
  return false;
}

ScalarField::ScalarField(StructuredGrid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.size(), fill) {}

ScalarField::ScalarField(StructuredGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidInputError("value count does not match grid node count");
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

VectorField::VectorField(StructuredGrid grid)
    : grid_(std::move(grid)), values_(grid_.size() * grid_.dim(), 0.0) {}

double VectorField::norm(std::size_t node) const {
  double s = 0.0;
  for (int k = 0; k < grid_.dim(); ++k) s += comp(node, k) * comp(node, k);
  return std::sqrt(s);
}

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t p = 0; p < grid_.size(); ++p) m = std::max(m, norm(p));
  return m;
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_snapshot(std::ostream& os, const ScalarField& f) {
  const StructuredGrid& g = f.grid();
  os << "flowlab-grid 1\n";
  os << "dim " << g.dim() << "\n";
  for (int k = 0; k < g.dim(); ++k)
    os << "axis " << k << " " << fmt_double(g.lo(k)) << " "
       << fmt_double(g.hi(k)) << " " << g.nodes(k) << "\n";
  os << "boundary "
     << (g.boundary() == BoundaryKind::periodic ? "periodic" : "dirichlet")
     << "\n";
  os << "values\n";
  for (int j = 0; j < g.stored(1); ++j) {
    for (int i = 0; i < g.stored(0); ++i) {
      if (i) os << " ";
      os << fmt_double(f.at(i, j));
    }
    os << "\n";
  }
}

ScalarField read_snapshot(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "flowlab-grid" || version != 1)
    throw InvalidInputError("not a flowlab grid snapshot");
  std::string key;
  int dim = 0;
  is >> key >> dim;
  if (key != "dim") throw InvalidInputError("snapshot: expected 'dim'");
  std::array<double, 2> lo{0.0, 0.0}, hi{0.0, 0.0};
  std::array<int, 2> nodes{1, 1};
  for (int k = 0; k < dim; ++k) {
    int axis;
    is >> key >> axis;
    if (key != "axis" || axis != k)
      throw InvalidInputError("snapshot: expected 'axis " + std::to_string(k) +
                              "'");
    is >> lo[k] >> hi[k] >> nodes[k];
  }
  std::string bcname;
  is >> key >> bcname;
  if (key != "boundary") throw InvalidInputError("snapshot: expected 'boundary'");
  BoundaryKind bc = bcname == "periodic" ? BoundaryKind::periodic
                                         : BoundaryKind::dirichlet;
  is >> key;
  if (key != "values") throw InvalidInputError("snapshot: expected 'values'");
  StructuredGrid grid(dim, lo, hi, nodes, bc);
  std::vector<double> vals(grid.size());
  for (double& v : vals)
    if (!(is >> v)) throw InvalidInputError("snapshot: truncated values");
  return ScalarField(std::move(grid), std::move(vals));
}

void save_snapshot(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_snapshot(os, f);
}

ScalarField load_snapshot(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace flowlab

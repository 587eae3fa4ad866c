#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace flowlab {

enum class BoundaryKind { dirichlet, periodic };

/// Axis-aligned structured grid on a product of closed intervals, 1D or 2D.
///
/// Nominal node counts N_k include both endpoints; spacing h_k =
/// (b_k - a_k)/(N_k - 1). On periodic grids the node at b_k is identified
/// with the one at a_k, so only N_k - 1 nodes per axis are stored.
class StructuredGrid {
public:
  StructuredGrid(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                 std::array<int, 2> nodes, BoundaryKind bc);

  static StructuredGrid line(double a, double b, int n,
                             BoundaryKind bc = BoundaryKind::dirichlet);
  static StructuredGrid rectangle(double ax, double bx, int nx, double ay,
                                  double by, int ny,
                                  BoundaryKind bc = BoundaryKind::dirichlet);

  int dim() const { return dim_; }
  BoundaryKind boundary() const { return bc_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  /// Nominal per-axis node count N_k (endpoints included).
  int nodes(int axis) const { return nodes_[axis]; }
  /// Stored per-axis node count: N_k (dirichlet) or N_k - 1 (periodic).
  int stored(int axis) const { return stored_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const;
  /// Total number of stored nodes.
  std::size_t size() const;

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * stored_[0] + i;
  }
  double coord(int axis, int i) const { return lo_[axis] + i * h_[axis]; }
  /// True for dirichlet boundary nodes; always false on periodic grids.
  bool is_boundary(int i, int j = 0) const;

  bool operator==(const StructuredGrid&) const = default;

private:
  int dim_;
  std::array<double, 2> lo_, hi_;
  std::array<int, 2> nodes_;
  std::array<int, 2> stored_;
  std::array<double, 2> h_;
  BoundaryKind bc_;
};

/// Nodal scalar values on a StructuredGrid. Value-semantic.
class ScalarField {
public:
  explicit ScalarField(StructuredGrid grid, double fill = 0.0);
  ScalarField(StructuredGrid grid, std::vector<double> values);

  const StructuredGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j = 0) { return values_[grid_.index(i, j)]; }
  double at(int i, int j = 0) const { return values_[grid_.index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double max_abs() const;
  bool all_finite() const;

private:
  StructuredGrid grid_;
  std::vector<double> values_;
};

/// One n-vector per node, n = grid dimension.
class VectorField {
public:
  explicit VectorField(StructuredGrid grid);

  const StructuredGrid& grid() const { return grid_; }
  double& comp(std::size_t node, int axis) {
    return values_[node * grid_.dim() + axis];
  }
  double comp(std::size_t node, int axis) const {
    return values_[node * grid_.dim() + axis];
  }
  double& comp(int i, int j, int axis) {
    return comp(grid_.index(i, j), axis);
  }
  double comp(int i, int j, int axis) const {
    return comp(grid_.index(i, j), axis);
  }
  /// Euclidean norm of the vector at a node.
  double norm(std::size_t node) const;
  double max_norm() const;

private:
  StructuredGrid grid_;
  std::vector<double> values_;
};

/// Plain-text snapshot: header (dim, extents, nodes, boundary_kind) followed
/// by row-major node values. Round-trips bit-exactly.
void write_snapshot(std::ostream& os, const ScalarField& f);
ScalarField read_snapshot(std::istream& is);
void save_snapshot(const std::string& path, const ScalarField& f);
ScalarField load_snapshot(const std::string& path);

}  // namespace flowlab

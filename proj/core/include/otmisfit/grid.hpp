#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace otm {

/// Node index on a grid. Zero-based: node (i, j) sits at
/// (x1_min + i*dx, x2_min + j*dx).
struct NodeIndex {
  int i = 0;
  int j = 0;
  bool operator==(const NodeIndex&) const = default;
};

/// Uniform grid with square cells.
struct Grid2D {
  int n1 = 0;
  int n2 = 0;
  double x1_min = 0.0;
  double x1_max = 0.0;
  double x2_min = 0.0;
  double x2_max = 0.0;
  double dx = 0.0;

  /// Validates n1, n2 >= 3 and that both axes share one spacing
  /// (1e-12 relative).
  static Grid2D from_extents(int n1, int n2, double x1_min, double x1_max, double x2_min,
                             double x2_max);
  static Grid2D from_spacing(int n1, int n2, double x1_min, double x2_min, double dx);

  double x1(int i) const { return x1_min + i * dx; }
  double x2(int j) const { return x2_min + j * dx; }
  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(i);
  }
  bool contains(int i, int j) const { return i >= 0 && i < n1 && j >= 0 && j < n2; }
  bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1; }

  /// Same node count and coordinates within 1e-12 relative.
  bool matches(const Grid2D& other) const;
};

/// Axis-aligned rectangle of grid nodes, inclusive on both ends.
struct IndexBox {
  int i_lo = 0;
  int i_hi = -1;
  int j_lo = 0;
  int j_hi = -1;

  bool empty() const { return i_hi < i_lo || j_hi < j_lo; }
  int width() const { return i_hi - i_lo + 1; }
  int height() const { return j_hi - j_lo + 1; }
  bool contains(int i, int j) const { return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi; }
  bool contains(const IndexBox& other) const {
    return other.empty() ||
           (other.i_lo >= i_lo && other.i_hi <= i_hi && other.j_lo >= j_lo && other.j_hi <= j_hi);
  }
  bool operator==(const IndexBox&) const = default;
};

/// Physical extents of a node box.
struct Rect {
  double x1_lo = 0.0;
  double x1_hi = 0.0;
  double x2_lo = 0.0;
  double x2_hi = 0.0;

  double width() const { return x1_hi - x1_lo; }
  double height() const { return x2_hi - x2_lo; }
};

Rect to_rect(const Grid2D& grid, const IndexBox& box);

/// Sub-grid spanned by a node box; its coordinates match the parent grid.
Grid2D sub_grid(const Grid2D& grid, const IndexBox& box);

/// Scalar field sampled at the nodes of a Grid2D.
class GridField {
 public:
  GridField() = default;
  explicit GridField(const Grid2D& grid, double fill = 0.0);
  GridField(const Grid2D& grid, std::vector<double> values);

  template <class Fn>
  static GridField sample(const Grid2D& grid, Fn&& fn) {
    GridField out(grid);
    for (int j = 0; j < grid.n2; ++j)
      for (int i = 0; i < grid.n1; ++i) out(i, j) = fn(grid.x1(i), grid.x2(j));
    return out;
  }

  const Grid2D& grid() const { return grid_; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double at(int i, int j) const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Node-sum quadrature, weight dx^2 at every node.
  double mass() const;
  double max() const;
  double min() const;
  double max_abs() const;

  GridField& operator*=(double s);
  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

GridField operator-(GridField a, const GridField& b);
GridField operator+(GridField a, const GridField& b);
GridField operator*(GridField a, double s);

/// Copy of the nodes inside box, on the corresponding sub-grid.
GridField restrict_to(const GridField& field, const IndexBox& box);

/// Discrete L2^2 difference with node-sum quadrature. Throws GridMismatch.
double l2_squared(const GridField& a, const GridField& b);

}  // namespace otm

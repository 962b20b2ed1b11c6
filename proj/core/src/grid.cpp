#include "otmisfit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "otmisfit/errors.hpp"

namespace otm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::MassMismatchUnresolvable: return "MassMismatchUnresolvable";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EventOutsideWindow: return "EventOutsideWindow";
  }
  return "Unknown";
}

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

Grid2D Grid2D::from_extents(int n1, int n2, double x1_min, double x1_max, double x2_min,
                            double x2_max) {
  if (n1 < 3 || n2 < 3) {
    std::ostringstream msg;
    msg << "grid needs at least 3 nodes per axis, got " << n1 << "x" << n2;
    throw Error(ErrorCode::InvalidGrid, msg.str());
  }
  if (!(x1_max > x1_min) || !(x2_max > x2_min)) {
    throw Error(ErrorCode::InvalidGrid, "grid extents must be increasing");
  }
  const double dx1 = (x1_max - x1_min) / (n1 - 1);
  const double dx2 = (x2_max - x2_min) / (n2 - 1);
  if (std::abs(dx1 - dx2) > 1e-12 * std::max(dx1, dx2)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "cells must be square: dx1=" << dx1 << " dx2=" << dx2;
    throw Error(ErrorCode::InvalidGrid, msg.str());
  }
  return Grid2D{n1, n2, x1_min, x1_max, x2_min, x2_max, dx1};
}

Grid2D Grid2D::from_spacing(int n1, int n2, double x1_min, double x2_min, double dx) {
  if (!(dx > 0.0)) throw Error(ErrorCode::InvalidGrid, "spacing must be positive");
  if (n1 < 3 || n2 < 3) throw Error(ErrorCode::InvalidGrid, "grid needs at least 3 nodes per axis");
  return Grid2D{n1, n2, x1_min, x1_min + (n1 - 1) * dx, x2_min, x2_min + (n2 - 1) * dx, dx};
}

bool Grid2D::matches(const Grid2D& other) const {
  return n1 == other.n1 && n2 == other.n2 && close_rel(x1_min, other.x1_min, 1e-12) &&
         close_rel(x1_max, other.x1_max, 1e-12) && close_rel(x2_min, other.x2_min, 1e-12) &&
         close_rel(x2_max, other.x2_max, 1e-12);
}

Rect to_rect(const Grid2D& grid, const IndexBox& box) {
  return Rect{grid.x1(box.i_lo), grid.x1(box.i_hi), grid.x2(box.j_lo), grid.x2(box.j_hi)};
}

Grid2D sub_grid(const Grid2D& grid, const IndexBox& box) {
  if (box.empty() || box.i_lo < 0 || box.j_lo < 0 || box.i_hi >= grid.n1 || box.j_hi >= grid.n2) {
    throw Error(ErrorCode::InvalidArgument, "box outside grid");
  }
  // Built from the spacing so sub-grid nodes coincide with parent nodes exactly.
  Grid2D out = Grid2D::from_spacing(box.width(), box.height(), grid.x1(box.i_lo),
                                    grid.x2(box.j_lo), grid.dx);
  return out;
}

GridField::GridField(const Grid2D& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

GridField::GridField(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidArgument, "value count does not match grid size");
  }
}

double GridField::at(int i, int j) const {
  if (!grid_.contains(i, j)) throw std::out_of_range("node outside grid");
  return (*this)(i, j);
}

double GridField::mass() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * grid_.dx * grid_.dx;
}

double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField& GridField::operator+=(const GridField& other) {
  if (!grid_.matches(other.grid_)) throw Error(ErrorCode::GridMismatch, "field grids differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  if (!grid_.matches(other.grid_)) throw Error(ErrorCode::GridMismatch, "field grids differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator*(GridField a, double s) { return a *= s; }

GridField restrict_to(const GridField& field, const IndexBox& box) {
  GridField out(sub_grid(field.grid(), box));
  for (int j = 0; j < box.height(); ++j)
    for (int i = 0; i < box.width(); ++i) out(i, j) = field(box.i_lo + i, box.j_lo + j);
  return out;
}

double l2_squared(const GridField& a, const GridField& b) {
  if (!a.grid().matches(b.grid())) throw Error(ErrorCode::GridMismatch, "field grids differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    const double d = a.values()[k] - b.values()[k];
    sum += d * d;
  }
  return sum * a.grid().dx * a.grid().dx;
}

}  // namespace otm

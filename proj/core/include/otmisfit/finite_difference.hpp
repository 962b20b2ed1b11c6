#pragma once

#include <array>

#include "otmisfit/grid.hpp"

// Compact 9-point finite-difference operators. The diagonal operators use the
// orthonormal pair v = (1,1)/sqrt(2), v' = (1,-1)/sqrt(2).
namespace otm::fd {

enum class Op {
  x1x1,  ///< (u[i+1,j] + u[i-1,j] - 2u[i,j]) / dx^2
  x2x2,  ///< (u[i,j+1] + u[i,j-1] - 2u[i,j]) / dx^2
  x1,    ///< (u[i+1,j] - u[i-1,j]) / (2dx)
  x2,    ///< (u[i,j+1] - u[i,j-1]) / (2dx)
  vv,    ///< (u[i+1,j+1] + u[i-1,j-1] - 2u[i,j]) / (2dx^2)
  pp,    ///< (u[i+1,j-1] + u[i-1,j+1] - 2u[i,j]) / (2dx^2)
  v,     ///< (u[i+1,j+1] - u[i-1,j-1]) / (2 sqrt(2) dx)
  p,     ///< (u[i+1,j-1] - u[i-1,j+1]) / (2 sqrt(2) dx)
};

inline constexpr std::array<Op, 8> kAllOps{Op::x1x1, Op::x2x2, Op::x1, Op::x2,
                                           Op::vv,   Op::pp,   Op::v,  Op::p};

struct Tap {
  int di = 0;
  int dj = 0;
  double weight = 0.0;
};

/// Taps of an operator, weights already divided by the dx scale.
struct Stencil {
  std::array<Tap, 3> taps{};
  int size = 0;

  auto begin() const { return taps.begin(); }
  auto end() const { return taps.begin() + size; }
};

Stencil stencil(Op op, double dx);

/// Evaluates op at node (i, j). Throws std::out_of_range if any tap falls
/// outside the grid.
double apply(Op op, const GridField& u, int i, int j);

inline double d_x1x1(const GridField& u, int i, int j) { return apply(Op::x1x1, u, i, j); }
inline double d_x2x2(const GridField& u, int i, int j) { return apply(Op::x2x2, u, i, j); }
inline double d_x1(const GridField& u, int i, int j) { return apply(Op::x1, u, i, j); }
inline double d_x2(const GridField& u, int i, int j) { return apply(Op::x2, u, i, j); }
inline double d_vv(const GridField& u, int i, int j) { return apply(Op::vv, u, i, j); }
inline double d_vpvp(const GridField& u, int i, int j) { return apply(Op::pp, u, i, j); }
inline double d_v(const GridField& u, int i, int j) { return apply(Op::v, u, i, j); }
inline double d_vp(const GridField& u, int i, int j) { return apply(Op::p, u, i, j); }

/// Centred mixed derivative (u[i+1,j+1] + u[i-1,j-1] - u[i+1,j-1] - u[i-1,j+1]) / (4dx^2).
double d_x1x2(const GridField& u, int i, int j);

}  // namespace otm::fd

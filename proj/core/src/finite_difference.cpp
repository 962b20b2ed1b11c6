#include "otmisfit/finite_difference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace otm::fd {

Stencil stencil(Op op, double dx) {
  const double h2 = dx * dx;
  const double diag1 = 1.0 / (2.0 * std::numbers::sqrt2 * dx);
  switch (op) {
    case Op::x1x1: return {{{{1, 0, 1.0 / h2}, {-1, 0, 1.0 / h2}, {0, 0, -2.0 / h2}}}, 3};
    case Op::x2x2: return {{{{0, 1, 1.0 / h2}, {0, -1, 1.0 / h2}, {0, 0, -2.0 / h2}}}, 3};
    case Op::x1: return {{{{1, 0, 0.5 / dx}, {-1, 0, -0.5 / dx}}}, 2};
    case Op::x2: return {{{{0, 1, 0.5 / dx}, {0, -1, -0.5 / dx}}}, 2};
    case Op::vv: return {{{{1, 1, 0.5 / h2}, {-1, -1, 0.5 / h2}, {0, 0, -1.0 / h2}}}, 3};
    case Op::pp: return {{{{1, -1, 0.5 / h2}, {-1, 1, 0.5 / h2}, {0, 0, -1.0 / h2}}}, 3};
    case Op::v: return {{{{1, 1, diag1}, {-1, -1, -diag1}}}, 2};
    case Op::p: return {{{{1, -1, diag1}, {-1, 1, -diag1}}}, 2};
  }
  throw std::invalid_argument("unknown finite-difference operator");
}

double apply(Op op, const GridField& u, int i, int j) {
  const Grid2D& g = u.grid();
  double sum = 0.0;
  for (const Tap& t : stencil(op, g.dx)) {
    if (!g.contains(i + t.di, j + t.dj)) {
      throw std::out_of_range("stencil at (" + std::to_string(i) + "," + std::to_string(j) +
                              ") leaves the grid");
    }
    sum += t.weight * u(i + t.di, j + t.dj);
  }
  return sum;
}

double d_x1x2(const GridField& u, int i, int j) {
  const Grid2D& g = u.grid();
  if (i < 1 || j < 1 || i > g.n1 - 2 || j > g.n2 - 2) {
    throw std::out_of_range("mixed-derivative stencil leaves the grid");
  }
  return (u(i + 1, j + 1) + u(i - 1, j - 1) - u(i + 1, j - 1) - u(i - 1, j + 1)) /
         (4.0 * g.dx * g.dx);
}

}  // namespace otm::fd

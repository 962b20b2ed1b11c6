#include "otmisfit/transport_2d.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "otmisfit/finite_difference.hpp"

namespace otm {

namespace {

double edge_derivative(const GridField& u, int i, int j, int si, int sj, bool second_order) {
  // Derivative along the axis of (si, sj), taken inward from (i, j); si/sj is
  // +1 on the low edge and -1 on the high edge. The first-order difference is
  // shifted by half a cell, matching the Neumann discretisation.
  const double dx = u.grid().dx;
  const double sign = static_cast<double>(si + sj);
  if (!second_order) return sign * ((u(i + si, j + sj) - u(i, j)) / dx - 0.5 * dx);
  return sign * (-3.0 * u(i, j) + 4.0 * u(i + si, j + sj) - u(i + 2 * si, j + 2 * sj)) / (2.0 * dx);
}

}  // namespace

std::array<double, 2> potential_gradient(const Potential& pot, int i, int j) {
  const GridField& u = pot.u;
  const Grid2D& g = u.grid();
  const bool second = pot.scheme == Scheme::filtered;
  double g1 = 0.0, g2 = 0.0;
  if (i == 0) g1 = edge_derivative(u, i, j, 1, 0, second);
  else if (i == g.n1 - 1) g1 = edge_derivative(u, i, j, -1, 0, second);
  else g1 = fd::d_x1(u, i, j);
  if (j == 0) g2 = edge_derivative(u, i, j, 0, 1, second);
  else if (j == g.n2 - 1) g2 = edge_derivative(u, i, j, 0, -1, second);
  else g2 = fd::d_x2(u, i, j);
  return {g1, g2};
}

double w2_from_potential(const Potential& pot, const DensityPair& pair) {
  const Grid2D& g = pot.u.grid();
  double sum = 0.0;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const auto grad = potential_gradient(pot, i, j);
      const double e1 = g.x1(i) - grad[0];
      const double e2 = g.x2(j) - grad[1];
      sum += (e1 * e1 + e2 * e2) * pair.f(pair.X.i_lo + i, pair.X.j_lo + j);
    }
  }
  return sum * g.dx * g.dx;
}

TransportResult displacement_field(const Potential& pot, const DensityPair& pair, bool threshold_layer) {
  const Grid2D& g = pot.u.grid();
  TransportResult out;
  out.d1 = GridField(g);
  out.d2 = GridField(g);
  out.thresholded = threshold_layer;
  const double cut = 0.5 * pair.theta_f;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      if (threshold_layer && pair.f_unpadded(pair.X.i_lo + i, pair.X.j_lo + j) < cut) continue;
      const auto grad = potential_gradient(pot, i, j);
      out.d1(i, j) = grad[0] - g.x1(i);
      out.d2(i, j) = grad[1] - g.x2(j);
    }
  }
  out.w2_squared = w2_from_potential(pot, pair);
  return out;
}

GridField registered_amplitude(const Potential& pot) {
  const GridField& u = pot.u;
  const Grid2D& g = u.grid();
  GridField det(g);
  for (int j = 1; j < g.n2 - 1; ++j) {
    for (int i = 1; i < g.n1 - 1; ++i) {
      const double uxy = fd::d_x1x2(u, i, j);
      det(i, j) = fd::d_x1x1(u, i, j) * fd::d_x2x2(u, i, j) - uxy * uxy;
    }
  }
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      if (!g.is_boundary(i, j)) continue;
      det(i, j) = det(std::clamp(i, 1, g.n1 - 2), std::clamp(j, 1, g.n2 - 2));
    }
  }
  return det;
}

void write_displacement_csv(std::ostream& out, const TransportResult& result, const DensityPair& pair) {
  const Grid2D& g = result.d1.grid();
  out << "x1,x2,d1,d2,f_value\n" << std::setprecision(17);
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      out << g.x1(i) << ',' << g.x2(j) << ',' << result.d1(i, j) << ',' << result.d2(i, j) << ','
          << pair.f(pair.X.i_lo + i, pair.X.j_lo + j) << '\n';
    }
  }
}

SignedTransport signed_w2(const GridField& f, const GridField& g, const PreprocessOptions& popts,
                          const SolverConfig& scfg) {
  SignedPairs pairs = prepare_signed(f, g, popts);
  SignedTransport out;
  const auto run = [&](std::optional<DensityPair>& pair) -> std::optional<ComponentSolve> {
    if (!pair) return std::nullopt;
    ComponentSolve c{std::move(*pair), {}, 0.0};
    c.solve = solve_monge_ampere(c.pair, scfg);
    c.w2_squared = w2_from_potential(c.solve.potential, c.pair);
    return c;
  };
  out.positive = run(pairs.positive);
  out.negative = run(pairs.negative);
  if (out.positive) out.w2_squared += out.positive->w2_squared;
  if (out.negative) out.w2_squared += out.negative->w2_squared;
  return out;
}

}  // namespace otm

#include "otmisfit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otmisfit/errors.hpp"

namespace otm {

PreprocessOptions PreprocessOptions::from_config(const KeyValueConfig& cfg) {
  PreprocessOptions opts;
  if (auto v = cfg.get_double("theta_rel")) opts.theta_rel = *v;
  if (auto v = cfg.get_double("sigma_rel")) opts.sigma_rel = *v;
  if (auto v = cfg.get_int("margin_cells")) opts.margin_cells = *v;
  if (auto v = cfg.get_double("support_tol")) opts.support_tol = *v;
  if (!(opts.theta_rel > 0.0)) throw Error(ErrorCode::InvalidConfig, "theta_rel must be positive");
  if (opts.sigma_rel < 0.0) throw Error(ErrorCode::InvalidConfig, "sigma_rel must be >= 0");
  if (opts.margin_cells < 0) throw Error(ErrorCode::InvalidConfig, "margin_cells must be >= 0");
  return opts;
}

SignParts split_signs(const GridField& signal) {
  SignParts parts{GridField(signal.grid()), GridField(signal.grid())};
  const auto in = signal.values();
  auto plus = parts.plus.values();
  auto minus = parts.minus.values();
  for (std::size_t k = 0; k < in.size(); ++k) {
    plus[k] = std::max(in[k], 0.0);
    minus[k] = std::max(-in[k], 0.0);
  }
  return parts;
}

std::pair<GridField, GridField> normalize_mass(const GridField& f, const GridField& g) {
  const double mf = f.mass();
  const double mg = g.mass();
  if (!(mf > 0.0)) throw Error(ErrorCode::ZeroMass, "source field has no positive mass");
  if (!(mg > 0.0)) throw Error(ErrorCode::ZeroMass, "target field has no positive mass");
  return {f * (1.0 / mf), g * (1.0 / mg)};
}

Point2 centre_of_mass(const GridField& field) {
  const Grid2D& grid = field.grid();
  double m = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      const double v = field(i, j);
      m += v;
      s1 += v * grid.x1(i);
      s2 += v * grid.x2(j);
    }
  }
  if (!(m > 0.0)) throw Error(ErrorCode::ZeroMass, "centre of mass of a massless field");
  return {s1 / m, s2 / m};
}

IndexBox support_box(const GridField& field, double rel_tol) {
  const Grid2D& grid = field.grid();
  const double peak = field.max();
  IndexBox box{grid.n1, -1, grid.n2, -1};
  if (!(peak > 0.0)) return box;
  const double cut = rel_tol * peak;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      if (field(i, j) > cut) {
        box.i_lo = std::min(box.i_lo, i);
        box.i_hi = std::max(box.i_hi, i);
        box.j_lo = std::min(box.j_lo, j);
        box.j_hi = std::max(box.j_hi, j);
      }
    }
  }
  return box;
}

namespace {

struct AxisPlacement {
  int lo;
  int hi;
};

// Places a window of `half` nodes each side of `centre` inside [0, n).
AxisPlacement place_axis(int centre, int half, int n) {
  if (2 * half + 1 >= n) return {0, n - 1};
  int lo = centre - half;
  int hi = centre + half;
  if (lo < 0) {
    hi -= lo;
    lo = 0;
  }
  if (hi > n - 1) {
    lo -= hi - (n - 1);
    hi = n - 1;
  }
  return {lo, hi};
}

GridField pad_inside(const GridField& field, const IndexBox& box, double theta) {
  GridField out(field.grid());
  for (int j = box.j_lo; j <= box.j_hi; ++j)
    for (int i = box.i_lo; i <= box.i_hi; ++i) out(i, j) = field(i, j) + theta;
  return out;
}

GridField mask_outside(const GridField& field, const IndexBox& box) {
  GridField out(field.grid());
  for (int j = box.j_lo; j <= box.j_hi; ++j)
    for (int i = box.i_lo; i <= box.i_hi; ++i) out(i, j) = field(i, j);
  return out;
}

}  // namespace

DensityPair convexify(const GridField& f, const GridField& g, double theta, int margin_cells,
                      double support_tol) {
  if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
  if (!f.grid().matches(g.grid())) throw Error(ErrorCode::GridMismatch, "f and g grids differ");
  if (f.min() < 0.0 || g.min() < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "convexify needs nonnegative fields");
  }
  const Grid2D& grid = f.grid();
  const Point2 cf = centre_of_mass(f);
  const Point2 cg = centre_of_mass(g);
  const IndexBox sf = support_box(f, support_tol);
  const IndexBox sg = support_box(g, support_tol);

  const auto node1 = [&](double x) { return static_cast<int>(std::lround((x - grid.x1_min) / grid.dx)); };
  const auto node2 = [&](double x) { return static_cast<int>(std::lround((x - grid.x2_min) / grid.dx)); };
  const int cf1 = node1(cf.x1), cf2 = node2(cf.x2);
  const int cg1 = node1(cg.x1), cg2 = node2(cg.x2);

  const int half1 = std::max({cf1 - sf.i_lo, sf.i_hi - cf1, cg1 - sg.i_lo, sg.i_hi - cg1}) + margin_cells;
  const int half2 = std::max({cf2 - sf.j_lo, sf.j_hi - cf2, cg2 - sg.j_lo, sg.j_hi - cg2}) + margin_cells;

  const AxisPlacement fx = place_axis(cf1, half1, grid.n1);
  const AxisPlacement fy = place_axis(cf2, half2, grid.n2);
  const AxisPlacement gx = place_axis(cg1, half1, grid.n1);
  const AxisPlacement gy = place_axis(cg2, half2, grid.n2);
  const IndexBox X{fx.lo, fx.hi, fy.lo, fy.hi};
  const IndexBox Y{gx.lo, gx.hi, gy.lo, gy.hi};
  if (!X.contains(sf) || !Y.contains(sg)) {
    throw Error(ErrorCode::SupportTooLarge,
                "common rectangle centred at the centres of mass does not fit the grid");
  }

  const GridField f_in = mask_outside(f, X);
  const GridField g_in = mask_outside(g, Y);
  GridField f_pad = pad_inside(f_in, X, theta);
  GridField g_pad = pad_inside(g_in, Y, theta);
  const double sf_scale = 1.0 / f_pad.mass();
  const double sg_scale = 1.0 / g_pad.mass();
  f_pad *= sf_scale;
  g_pad *= sg_scale;

  DensityPair pair;
  pair.f = std::move(f_pad);
  pair.g = std::move(g_pad);
  pair.f_unpadded = f_in * sf_scale;
  pair.X = X;
  pair.Y = Y;
  pair.theta = theta * sg_scale;
  pair.theta_f = theta * sf_scale;
  pair.total_mass = 1.0;
  return pair;
}

namespace {

int reflect(int idx, int n) {
  const int period = 2 * n;
  int m = idx % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<double> gaussian_kernel(double sigma, double dx) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma / dx - 1e-12));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double x = k * dx;
    w[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += w[static_cast<std::size_t>(k + radius)];
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

GridField smooth(const GridField& field, double sigma) {
  if (sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (sigma == 0.0) return field;
  const Grid2D& grid = field.grid();
  const std::vector<double> w = gaussian_kernel(sigma, grid.dx);
  const int radius = static_cast<int>(w.size() / 2);

  GridField tmp(grid);
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += w[static_cast<std::size_t>(k + radius)] * field(reflect(i + k, grid.n1), j);
      }
      tmp(i, j) = acc;
    }
  }
  GridField out(grid);
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += w[static_cast<std::size_t>(k + radius)] * tmp(i, reflect(j + k, grid.n2));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

double lipschitz_bound(const DensityPair& pair) {
  const GridField& g = pair.g;
  const Grid2D& grid = g.grid();
  const IndexBox& Y = pair.Y;
  double max_grad = 0.0;
  double min_g = std::numeric_limits<double>::infinity();
  for (int j = Y.j_lo; j <= Y.j_hi; ++j) {
    for (int i = Y.i_lo; i <= Y.i_hi; ++i) {
      min_g = std::min(min_g, g(i, j));
      const int il = std::max(i - 1, Y.i_lo), ir = std::min(i + 1, Y.i_hi);
      const int jl = std::max(j - 1, Y.j_lo), jr = std::min(j + 1, Y.j_hi);
      const double g1 = ir > il ? (g(ir, j) - g(il, j)) / ((ir - il) * grid.dx) : 0.0;
      const double g2 = jr > jl ? (g(i, jr) - g(i, jl)) / ((jr - jl) * grid.dx) : 0.0;
      max_grad = std::max(max_grad, std::hypot(g1, g2));
    }
  }
  if (!(min_g > 0.0)) throw Error(ErrorCode::InvalidArgument, "target density vanishes on Y");
  return pair.f.max() * max_grad / (min_g * min_g);
}

void rescale_components(const GridField& f, GridField& g, const std::vector<GridField>& masks) {
  for (const GridField& mask : masks) {
    if (!mask.grid().matches(g.grid())) throw Error(ErrorCode::GridMismatch, "mask grid differs");
    double mf = 0.0;
    double mg = 0.0;
    for (std::size_t k = 0; k < mask.values().size(); ++k) {
      if (mask.values()[k] > 0.5) {
        mf += f.values()[k];
        mg += g.values()[k];
      }
    }
    if (mf > 0.0 && mg > 0.0) {
      const double s = mf / mg;
      for (std::size_t k = 0; k < mask.values().size(); ++k)
        if (mask.values()[k] > 0.5) g.values()[k] *= s;
    }
  }
}

DensityPair prepare_pair(const GridField& f, const GridField& g, const PreprocessOptions& opts) {
  if (!f.grid().matches(g.grid())) throw Error(ErrorCode::GridMismatch, "f and g grids differ");
  if (f.min() < 0.0 || g.min() < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "densities must be nonnegative; split signs first");
  }
  const double sigma = opts.sigma_rel * f.grid().dx;
  GridField fs = smooth(f, sigma);
  GridField gs = smooth(g, sigma);
  if (!opts.component_masks.empty()) rescale_components(fs, gs, opts.component_masks);
  auto [fn, gn] = normalize_mass(fs, gs);
  const double theta = opts.theta_rel * gn.max();
  return convexify(fn, gn, theta, opts.margin_cells, opts.support_tol);
}

SignedPairs prepare_signed(const GridField& f, const GridField& g, const PreprocessOptions& opts) {
  const SignParts fp = split_signs(f);
  const SignParts gp = split_signs(g);
  SignedPairs out;
  const auto build = [&](const GridField& a, const GridField& b, const char* name) -> std::optional<DensityPair> {
    const bool za = !(a.max() > 0.0);
    const bool zb = !(b.max() > 0.0);
    if (za && zb) return std::nullopt;
    if (za != zb) {
      throw Error(ErrorCode::MassMismatchUnresolvable,
                  std::string(name) + " part has mass in only one of the two signals");
    }
    return prepare_pair(a, b, opts);
  };
  out.positive = build(fp.plus, gp.plus, "positive");
  out.negative = build(fp.minus, gp.minus, "negative");
  return out;
}

}  // namespace otm

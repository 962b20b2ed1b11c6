#include "otmisfit/ma_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "otmisfit/errors.hpp"
#include "otmisfit/finite_difference.hpp"

namespace otm {

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::monotone ? "monotone" : "filtered";
}

std::string_view to_string(Interpolation interp) {
  return interp == Interpolation::bilinear ? "bilinear" : "cubic";
}

Interpolation parse_interpolation(std::string_view name) {
  if (name == "bilinear") return Interpolation::bilinear;
  if (name == "cubic") return Interpolation::cubic;
  throw Error(ErrorCode::ParseError, "interpolation must be 'bilinear' or 'cubic', got '" + std::string(name) + "'");
}

SolverConfig SolverConfig::from_config(const KeyValueConfig& cfg) {
  SolverConfig out;
  if (auto v = cfg.get_double("delta")) out.delta = *v;
  if (auto v = cfg.get_double("epsilon")) out.epsilon = *v;
  if (auto v = cfg.get_double("tol")) out.newton_tol = *v;
  if (auto v = cfg.get_int("max_iters")) out.max_newton_iters = *v;
  if (auto v = cfg.get_bool("filtered")) out.use_filtered = *v;
  if (auto v = cfg.get("interpolation")) out.interpolation = parse_interpolation(*v);
  if (auto v = cfg.get("fixed_node")) {
    const auto comma = v->find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::ParseError, "fixed_node must be \"i,j\", got '" + *v + "'");
    }
    KeyValueConfig tmp;
    tmp.set("i", v->substr(0, comma));
    tmp.set("j", v->substr(comma + 1));
    out.fixed_node = NodeIndex{*tmp.get_int("i"), *tmp.get_int("j")};
  }
  return out;
}

double filter_s(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return x;
  if (a >= 2.0) return 0.0;
  return x > 0.0 ? 2.0 - x : -x - 2.0;
}

namespace {

double filter_slope(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return -1.0;
}

// Catmull-Rom weights and their derivatives for the nodes -1, 0, 1, 2.
void catmull_rom(double x, std::array<double, 4>& w, std::array<double, 4>& dw) {
  const double x2 = x * x, x3 = x2 * x;
  w = {-0.5 * x3 + x2 - 0.5 * x, 1.5 * x3 - 2.5 * x2 + 1.0, -1.5 * x3 + 2.0 * x2 + 0.5 * x, 0.5 * x3 - 0.5 * x2};
  dw = {-1.5 * x2 + 2.0 * x - 0.5, 4.5 * x2 - 5.0 * x, -4.5 * x2 + 4.0 * x + 0.5, 1.5 * x2 - x};
}

double op_value(fd::Op op, const GridField& u, int i, int j, double dx) {
  double value = 0.0;
  for (const fd::Tap& t : fd::stencil(op, dx)) value += t.weight * u(i + t.di, j + t.dj);
  return value;
}

void add_op(fd::Op op, double dx, Linearization& lin, double scale) {
  for (const fd::Tap& t : fd::stencil(op, dx)) lin.at(t.di, t.dj) += scale * t.weight;
}

Linearization combine_filtered(const Linearization& fm, const Linearization& fa, double eps) {
  const double z = (fa.value - fm.value) / eps;
  const double slope = filter_slope(z);
  Linearization out = fm;
  out.value = fm.value + eps * filter_s(z);
  for (std::size_t k = 0; k < out.d.size(); ++k) out.d[k] += slope * (fa.d[k] - fm.d[k]);
  out.d_shift += slope * (fa.d_shift - fm.d_shift);
  return out;
}

}  // namespace

MongeAmpereOperator::MongeAmpereOperator(const DensityPair& pair, const SolverConfig& cfg)
    : pair_(pair),
      grid_(sub_grid(pair.grid(), pair.X)),
      target_rect_(pair.target_rect()),
      interpolation_(cfg.interpolation) {
  if (grid_.n1 < 3 || grid_.n2 < 3 || pair.Y.width() < 2 || pair.Y.height() < 2) {
    throw Error(ErrorCode::InvalidConfig, "source and target rectangles are too small");
  }
  if (!(cfg.newton_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "newton_tol must be positive");
  if (cfg.max_newton_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_newton_iters must be >= 1");

  lipschitz_ = lipschitz_bound(pair);
  const double floor = lipschitz_ * grid_.dx / 2.0;
  delta_ = cfg.delta > 0.0 ? cfg.delta : std::max(1e-3, 1.01 * floor);
  if (!(delta_ > floor)) {
    std::ostringstream msg;
    msg << "delta=" << delta_ << " must exceed K*dx/2=" << floor;
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }
  epsilon_ = cfg.epsilon > 0.0 ? cfg.epsilon : std::sqrt(grid_.dx);
  fixed_ = cfg.fixed_node.value_or(NodeIndex{grid_.n1 / 2, grid_.n2 / 2});
  if (!grid_.contains(fixed_.i, fixed_.j)) {
    throw Error(ErrorCode::InvalidConfig, "fixed_node lies outside the source rectangle");
  }
}

double MongeAmpereOperator::source(int i, int j) const {
  return pair_.f(pair_.X.i_lo + i, pair_.X.j_lo + j);
}

MongeAmpereOperator::TargetSample MongeAmpereOperator::target(double y1, double y2) const {
  const Grid2D& g = pair_.grid();
  const IndexBox& Y = pair_.Y;
  const Rect& r = target_rect_;
  TargetSample out;
  const double tol = 2.0 * g.dx;
  out.violated = y1 < r.x1_lo - tol || y1 > r.x1_hi + tol || y2 < r.x2_lo - tol || y2 > r.x2_hi + tol;
  const bool clamp1 = y1 < r.x1_lo || y1 > r.x1_hi;
  const bool clamp2 = y2 < r.x2_lo || y2 > r.x2_hi;
  const double c1 = std::clamp(y1, r.x1_lo, r.x1_hi);
  const double c2 = std::clamp(y2, r.x2_lo, r.x2_hi);
  int i = static_cast<int>(std::floor((c1 - g.x1_min) / g.dx));
  int j = static_cast<int>(std::floor((c2 - g.x2_min) / g.dx));
  i = std::clamp(i, Y.i_lo, Y.i_hi - 1);
  j = std::clamp(j, Y.j_lo, Y.j_hi - 1);
  const double t = (c1 - g.x1(i)) / g.dx;
  const double s = (c2 - g.x2(j)) / g.dx;
  const GridField& gf = pair_.g;
  if (interpolation_ == Interpolation::cubic) {
    std::array<double, 4> wt{}, dwt{}, ws{}, dws{};
    catmull_rom(t, wt, dwt);
    catmull_rom(s, ws, dws);
    double v = 0.0, a1 = 0.0, a2 = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int jj = std::clamp(j - 1 + b, Y.j_lo, Y.j_hi);
      for (int a = 0; a < 4; ++a) {
        const int ii = std::clamp(i - 1 + a, Y.i_lo, Y.i_hi);
        const double gv = gf(ii, jj);
        v += wt[a] * ws[b] * gv;
        a1 += dwt[a] * ws[b] * gv;
        a2 += wt[a] * dws[b] * gv;
      }
    }
    const double lo = std::min({gf(i, j), gf(i + 1, j), gf(i, j + 1), gf(i + 1, j + 1)});
    if (v >= 0.5 * lo) {
      out.value = v;
      out.d1 = clamp1 ? 0.0 : a1 / g.dx;
      out.d2 = clamp2 ? 0.0 : a2 / g.dx;
      return out;
    }
  }
  const double g00 = gf(i, j), g10 = gf(i + 1, j), g01 = gf(i, j + 1), g11 = gf(i + 1, j + 1);
  out.value = (1 - t) * (1 - s) * g00 + t * (1 - s) * g10 + (1 - t) * s * g01 + t * s * g11;
  out.d1 = clamp1 ? 0.0 : ((1 - s) * (g10 - g00) + s * (g11 - g01)) / g.dx;
  out.d2 = clamp2 ? 0.0 : ((1 - t) * (g01 - g00) + t * (g11 - g10)) / g.dx;
  return out;
}

Linearization MongeAmpereOperator::ma_branch(const Potential& pot, int i, int j, bool diagonal) const {
  const GridField& u = pot.u;
  const double dx = grid_.dx;
  if (i < 1 || j < 1 || i > grid_.n1 - 2 || j > grid_.n2 - 2) {
    throw std::out_of_range("Monge-Ampere residual requested at a boundary node");
  }
  const fd::Op opa = diagonal ? fd::Op::vv : fd::Op::x1x1;
  const fd::Op opb = diagonal ? fd::Op::pp : fd::Op::x2x2;
  const double da = op_value(opa, u, i, j, dx);
  const double db = op_value(opb, u, i, j, dx);
  const double delta = delta_;

  Linearization lin;
  const double ma = std::max(da, delta), mb = std::max(db, delta);
  lin.value = ma * mb + std::min(da, delta) + std::min(db, delta);
  add_op(opa, dx, lin, da > delta ? mb : 1.0);
  add_op(opb, dx, lin, db > delta ? ma : 1.0);

  double y1 = 0.0, y2 = 0.0;
  if (!diagonal) {
    y1 = op_value(fd::Op::x1, u, i, j, dx);
    y2 = op_value(fd::Op::x2, u, i, j, dx);
  } else {
    const double dv = op_value(fd::Op::v, u, i, j, dx);
    const double dp = op_value(fd::Op::p, u, i, j, dx);
    y1 = (dv + dp) / std::numbers::sqrt2;
    y2 = (dv - dp) / std::numbers::sqrt2;
  }
  const TargetSample gs = target(y1, y2);
  const double fx = source(i, j);
  const double ratio = fx / gs.value;
  lin.value -= ratio + pot.shift;
  lin.d_shift = -1.0;

  // d(-f/g)/dy_k = f * g_k / g^2
  const double c1 = fx * gs.d1 / (gs.value * gs.value);
  const double c2 = fx * gs.d2 / (gs.value * gs.value);
  if (!diagonal) {
    add_op(fd::Op::x1, dx, lin, c1);
    add_op(fd::Op::x2, dx, lin, c2);
  } else {
    const double r = 1.0 / std::numbers::sqrt2;
    add_op(fd::Op::v, dx, lin, r * (c1 + c2));
    add_op(fd::Op::p, dx, lin, r * (c1 - c2));
  }
  return lin;
}

Linearization MongeAmpereOperator::ma1(const Potential& u, int i, int j) const {
  return ma_branch(u, i, j, false);
}

Linearization MongeAmpereOperator::ma2(const Potential& u, int i, int j) const {
  return ma_branch(u, i, j, true);
}

Linearization MongeAmpereOperator::compact(const Potential& u, int i, int j) const {
  const Linearization a = ma1(u, i, j);
  const Linearization b = ma2(u, i, j);
  Linearization out = a.value <= b.value ? a : b;
  out.value = -out.value;
  for (double& v : out.d) v = -v;
  out.d_shift = -out.d_shift;
  return out;
}

Linearization MongeAmpereOperator::accurate(const Potential& pot, int i, int j) const {
  const GridField& u = pot.u;
  const double dx = grid_.dx;
  if (i < 1 || j < 1 || i > grid_.n1 - 2 || j > grid_.n2 - 2) {
    throw std::out_of_range("accurate residual requested at a boundary node");
  }
  const double uxx = op_value(fd::Op::x1x1, u, i, j, dx);
  const double uyy = op_value(fd::Op::x2x2, u, i, j, dx);
  const double uxy = fd::d_x1x2(u, i, j);
  const double ux = op_value(fd::Op::x1, u, i, j, dx);
  const double uy = op_value(fd::Op::x2, u, i, j, dx);
  const TargetSample gs = target(ux, uy);
  const double fx = source(i, j);

  Linearization lin;
  const double a = uxx * uyy - uxy * uxy - fx / gs.value - pot.shift;
  lin.value = -a;
  add_op(fd::Op::x1x1, dx, lin, -uyy);
  add_op(fd::Op::x2x2, dx, lin, -uxx);
  const double w = 2.0 * uxy / (4.0 * dx * dx);
  lin.at(1, 1) += w;
  lin.at(-1, -1) += w;
  lin.at(1, -1) -= w;
  lin.at(-1, 1) -= w;
  const double g2 = gs.value * gs.value;
  add_op(fd::Op::x1, dx, lin, -fx * gs.d1 / g2);
  add_op(fd::Op::x2, dx, lin, -fx * gs.d2 / g2);
  lin.d_shift = 1.0;
  return lin;
}

Linearization MongeAmpereOperator::filtered(const Potential& u, int i, int j) const {
  return combine_filtered(compact(u, i, j), accurate(u, i, j), epsilon_);
}

namespace {

enum class Side { left, right, bottom, top };

// Adds w * (one-sided normal derivative - target) for one side.
void add_side(Linearization& lin, const GridField& u, int i, int j, Side side, double target,
              bool second_order, double w) {
  const double dx = u.grid().dx;
  // Inward step and sign of the outward derivative.
  int si = 0, sj = 0;
  double sign = 1.0;
  switch (side) {
    case Side::left: si = 1; sign = 1.0; break;
    case Side::right: si = -1; sign = -1.0; break;
    case Side::bottom: sj = 1; sign = 1.0; break;
    case Side::top: sj = -1; sign = -1.0; break;
  }
  double value = 0.0;
  if (!second_order) {
    // The two-point difference is centred half a cell inside the edge, so it
    // is compared with the target coordinate half a cell inside Y.
    const double c = sign / dx;
    value = c * (u(i + si, j + sj) - u(i, j)) - sign * 0.5 * dx;
    lin.at(si, sj) += w * c;
    lin.at(0, 0) -= w * c;
  } else {
    const double c = sign / (2.0 * dx);
    value = c * (-3.0 * u(i, j) + 4.0 * u(i + si, j + sj) - u(i + 2 * si, j + 2 * sj));
    lin.at(0, 0) += w * c * -3.0;
    lin.at(si, sj) += w * c * 4.0;
    lin.at(2 * si, 2 * sj) += w * c * -1.0;
  }
  lin.value += w * (value - target);
}

Linearization boundary_equation(const GridField& u, const Rect& y, int i, int j, bool second_order) {
  const Grid2D& g = u.grid();
  std::array<std::pair<Side, double>, 2> sides{};
  int count = 0;
  if (i == 0) sides[count++] = {Side::left, y.x1_lo};
  else if (i == g.n1 - 1) sides[count++] = {Side::right, y.x1_hi};
  if (j == 0) sides[count++] = {Side::bottom, y.x2_lo};
  else if (j == g.n2 - 1) sides[count++] = {Side::top, y.x2_hi};
  if (count == 0) throw std::out_of_range("Neumann condition requested at an interior node");
  Linearization lin;
  if (count == 1) {
    add_side(lin, u, i, j, sides[0].first, sides[0].second, second_order, 1.0);
    return lin;
  }
  // Corners average the two conditions in outward-normal form; averaging the
  // +axis forms would cancel the corner value on the mixed corners.
  for (int k = 0; k < count; ++k) {
    const bool low = sides[k].first == Side::left || sides[k].first == Side::bottom;
    add_side(lin, u, i, j, sides[k].first, sides[k].second, second_order, low ? -0.5 : 0.5);
  }
  return lin;
}

}  // namespace

Linearization MongeAmpereOperator::neumann(const Potential& u, int i, int j) const {
  return boundary_equation(u.u, target_rect_, i, j, false);
}

Linearization MongeAmpereOperator::neumann_accurate(const Potential& u, int i, int j) const {
  return boundary_equation(u.u, target_rect_, i, j, true);
}

Linearization MongeAmpereOperator::neumann_filtered(const Potential& u, int i, int j) const {
  return combine_filtered(neumann(u, i, j), neumann_accurate(u, i, j), epsilon_);
}

Linearization MongeAmpereOperator::equation(const Potential& u, int i, int j, Scheme scheme) const {
  const bool boundary = grid_.is_boundary(i, j);
  if (scheme == Scheme::monotone) return boundary ? neumann(u, i, j) : compact(u, i, j);
  return boundary ? neumann_filtered(u, i, j) : filtered(u, i, j);
}

std::vector<double> MongeAmpereOperator::residual(const Potential& u, Scheme scheme) const {
  std::vector<double> r(static_cast<std::size_t>(unknowns()));
  for (int j = 0; j < grid_.n2; ++j)
    for (int i = 0; i < grid_.n1; ++i) r[grid_.index(i, j)] = equation(u, i, j, scheme).value;
  r.back() = u.u(fixed_.i, fixed_.j);
  return r;
}

SparseSystem MongeAmpereOperator::assemble(const Potential& u, Scheme scheme) const {
  SparseSystem sys;
  sys.size = unknowns();
  sys.residual.resize(static_cast<std::size_t>(sys.size));
  sys.jacobian.reserve(grid_.size() * 10 + 1);
  const int shift_col = sys.size - 1;
  const int reach = scheme == Scheme::filtered ? 2 : 1;
  for (int j = 0; j < grid_.n2; ++j) {
    for (int i = 0; i < grid_.n1; ++i) {
      const int row = static_cast<int>(grid_.index(i, j));
      const Linearization lin = equation(u, i, j, scheme);
      sys.residual[static_cast<std::size_t>(row)] = lin.value;
      const auto push = [&](int di, int dj) {
        sys.jacobian.push_back({row, static_cast<int>(grid_.index(i + di, j + dj)), lin.at(di, dj)});
      };
      if (!grid_.is_boundary(i, j)) {
        // Full 3x3 pattern even where the active branch has zero weight, so
        // the sparsity pattern is fixed across Newton steps.
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) push(di, dj);
        sys.jacobian.push_back({row, shift_col, lin.d_shift});
      } else {
        const int ni = i == 0 ? 1 : (i == grid_.n1 - 1 ? -1 : 0);
        const int nj = j == 0 ? 1 : (j == grid_.n2 - 1 ? -1 : 0);
        push(0, 0);
        for (int k = 1; k <= reach; ++k) {
          if (ni != 0) push(k * ni, 0);
          if (nj != 0) push(0, k * nj);
        }
      }
    }
  }
  sys.residual.back() = u.u(fixed_.i, fixed_.j);
  sys.jacobian.push_back({shift_col, static_cast<int>(grid_.index(fixed_.i, fixed_.j)), 1.0});
  return sys;
}

Potential MongeAmpereOperator::initial_guess() const {
  const Rect x = to_rect(pair_.grid(), pair_.X);
  const Rect& y = target_rect_;
  const double cx1 = 0.5 * (x.x1_lo + x.x1_hi), cx2 = 0.5 * (x.x2_lo + x.x2_hi);
  const double cy1 = 0.5 * (y.x1_lo + y.x1_hi), cy2 = 0.5 * (y.x2_lo + y.x2_hi);
  Potential pot;
  pot.u = GridField::sample(grid_, [&](double a, double b) {
    const double p = a - cx1, q = b - cx2;
    return 0.5 * (p * p + q * q) + cy1 * p + cy2 * q;
  });
  const double pin = pot.u(fixed_.i, fixed_.j);
  for (double& v : pot.u.values()) v -= pin;
  pot.fixed_node = fixed_;

  double sum = 0.0;
  int count = 0;
  for (int j = 1; j < grid_.n2 - 1; ++j) {
    for (int i = 1; i < grid_.n1 - 1; ++i) {
      sum += std::min(ma1(pot, i, j).value, ma2(pot, i, j).value);
      ++count;
    }
  }
  pot.shift = sum / count;
  return pot;
}

int MongeAmpereOperator::count_boundary_violations(const Potential& pot) const {
  int count = 0;
  const double dx = grid_.dx;
  for (int j = 1; j < grid_.n2 - 1; ++j) {
    for (int i = 1; i < grid_.n1 - 1; ++i) {
      const double y1 = op_value(fd::Op::x1, pot.u, i, j, dx);
      const double y2 = op_value(fd::Op::x2, pot.u, i, j, dx);
      if (target(y1, y2).violated) ++count;
    }
  }
  return count;
}

double ma1_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j) {
  return MongeAmpereOperator(pair, cfg).ma1(u, i, j).value;
}

double ma2_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j) {
  return MongeAmpereOperator(pair, cfg).ma2(u, i, j).value;
}

double compact_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j) {
  return MongeAmpereOperator(pair, cfg).compact(u, i, j).value;
}

double filtered_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j) {
  return MongeAmpereOperator(pair, cfg).filtered(u, i, j).value;
}

double neumann_residual(const Potential& u, const DensityPair& pair, int i, int j) {
  return boundary_equation(u.u, pair.target_rect(), i, j, false).value;
}

SparseSystem assemble_system(const Potential& u, const DensityPair& pair, const SolverConfig& cfg) {
  return MongeAmpereOperator(pair, cfg).assemble(u, cfg.use_filtered ? Scheme::filtered : Scheme::monotone);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double max_norm(const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

SpMat to_matrix(const SparseSystem& sys) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(sys.jacobian.size());
  for (const MatrixEntry& e : sys.jacobian) triplets.emplace_back(e.row, e.col, e.value);
  SpMat m(sys.size, sys.size);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

Potential step(const Potential& base, const Eigen::VectorXd& delta, double t) {
  Potential out = base;
  auto vals = out.u.values();
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] += t * delta[static_cast<Eigen::Index>(k)];
  out.shift += t * delta[delta.size() - 1];
  return out;
}

// Runs Newton on one scheme; returns the number of steps taken.
int newton_phase(const MongeAmpereOperator& op, Potential& pot, Scheme scheme, const SolverConfig& cfg,
                 std::vector<double>& history) {
  std::vector<double> r = op.residual(pot, scheme);
  double norm = max_norm(r);
  history.push_back(norm);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analysed = false;
  int steps = 0;
  while (norm > cfg.newton_tol) {
    if (steps >= cfg.max_newton_iters) {
      std::ostringstream msg;
      msg << to_string(scheme) << " Newton did not reach tol=" << cfg.newton_tol << " in "
          << cfg.max_newton_iters << " iterations (residual " << norm << ")";
      throw Error(ErrorCode::NoConvergence, msg.str());
    }
    const SparseSystem sys = op.assemble(pot, scheme);
    const SpMat jac = to_matrix(sys);
    if (!analysed) {
      lu.analyzePattern(jac);
      analysed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularSystem,
                  "Newton Jacobian is singular (delta too small or degenerate densities): " +
                      lu.lastErrorMessage());
    }
    Eigen::VectorXd rhs(sys.size);
    for (int k = 0; k < sys.size; ++k) rhs[k] = -sys.residual[static_cast<std::size_t>(k)];
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (!delta.allFinite()) throw Error(ErrorCode::SingularSystem, "Newton step is not finite");

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_step_halvings; ++h, t *= 0.5) {
      Potential trial = step(pot, delta, t);
      std::vector<double> rt = op.residual(trial, scheme);
      const double nt = max_norm(rt);
      if (nt < norm) {
        pot = std::move(trial);
        norm = nt;
        accepted = true;
        break;
      }
    }
    ++steps;
    if (!accepted) {
      std::ostringstream msg;
      msg << to_string(scheme) << " Newton step rejected after " << cfg.max_step_halvings
          << " halvings (residual " << norm << ")";
      throw Error(ErrorCode::NoConvergence, msg.str());
    }
    history.push_back(norm);
  }
  return steps;
}

}  // namespace

SolveResult solve_monge_ampere(const DensityPair& pair, const SolverConfig& cfg) {
  const MongeAmpereOperator op(pair, cfg);
  SolveResult result;
  SolverReport& report = result.report;
  report.delta = op.delta();
  report.epsilon = op.epsilon();
  report.lipschitz = op.lipschitz();

  Potential pot = op.initial_guess();
  std::vector<double> history;
  report.monotone_iterations = newton_phase(op, pot, Scheme::monotone, cfg, history);
  report.iterations = report.monotone_iterations;
  report.scheme = Scheme::monotone;
  if (cfg.use_filtered) {
    history.clear();
    pot.scheme = Scheme::filtered;
    report.iterations = newton_phase(op, pot, Scheme::filtered, cfg, history);
    report.scheme = Scheme::filtered;
  }
  report.residual_history = std::move(history);
  report.converged = true;
  report.boundary_violations = op.count_boundary_violations(pot);
  result.potential = std::move(pot);
  return result;
}

}  // namespace otm

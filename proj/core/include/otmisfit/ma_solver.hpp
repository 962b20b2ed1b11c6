#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "otmisfit/grid.hpp"
#include "otmisfit/key_value.hpp"
#include "otmisfit/preprocess.hpp"

namespace otm {

enum class Scheme { monotone, filtered };

std::string_view to_string(Scheme scheme);

/// How g is evaluated between nodes.
enum class Interpolation {
  bilinear,  ///< continuous, piecewise-bilinear
  cubic,     ///< Catmull-Rom, continuously differentiable
};

std::string_view to_string(Interpolation interp);
/// Accepts "bilinear" or "cubic". Throws ParseError otherwise.
Interpolation parse_interpolation(std::string_view name);

/// Parameters of the Monge-Ampere solve.
struct SolverConfig {
  /// Floor on the second differences. Values <= 0 select the default
  /// max(1e-3, 1.01 * K * dx / 2) with K from lipschitz_bound().
  double delta = 0.0;
  /// Filter scale of the filtered scheme. Values <= 0 select sqrt(dx).
  double epsilon = 0.0;
  double newton_tol = 1e-8;
  int max_newton_iters = 50;
  int max_step_halvings = 20;
  bool use_filtered = false;
  Interpolation interpolation = Interpolation::bilinear;
  /// Node (local to the source rectangle) where u is pinned to 0. Defaults to
  /// the rectangle centre.
  std::optional<NodeIndex> fixed_node;

  /// Reads delta, epsilon, tol, max_iters, filtered, interpolation and
  /// fixed_node ("i,j").
  static SolverConfig from_config(const KeyValueConfig& cfg);
};

struct SolverReport {
  int iterations = 0;                   ///< Newton steps of the final phase
  int monotone_iterations = 0;          ///< Newton steps of the monotone phase
  std::vector<double> residual_history; ///< max-norm residual, one entry per iterate
  bool converged = false;
  Scheme scheme = Scheme::monotone;
  double delta = 0.0;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  int boundary_violations = 0;          ///< nodes whose gradient left Y by more than 2dx
};

/// Discrete convex potential on the source rectangle. The scheme's additive
/// constant (the solvability shift) is carried separately so that u is pinned
/// to zero at fixed_node.
struct Potential {
  GridField u;                       ///< values on the source sub-grid
  NodeIndex fixed_node;              ///< local index with u == 0
  double shift = 0.0;                ///< constant subtracted in every interior equation
  Scheme scheme = Scheme::monotone;  ///< decides the boundary gradient stencil
};

/// Value and derivatives of one residual equation with respect to the nodes
/// within two cells of the equation's node and the shift unknown.
struct Linearization {
  double value = 0.0;
  std::array<double, 25> d{};  ///< index (dj + 2) * 5 + (di + 2)
  double d_shift = 0.0;

  double& at(int di, int dj) { return d[static_cast<std::size_t>((dj + 2) * 5 + (di + 2))]; }
  double at(int di, int dj) const { return d[static_cast<std::size_t>((dj + 2) * 5 + (di + 2))]; }
};

struct MatrixEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Residual and Jacobian of the full system. Unknowns are the source nodes
/// (index j*m1 + i) followed by the shift; rows are the node equations
/// followed by the pinning equation.
struct SparseSystem {
  int size = 0;
  std::vector<double> residual;
  std::vector<MatrixEntry> jacobian;
};

/// Discretisation of the transport problem on a DensityPair: compact monotone
/// scheme in the interior, one-sided Neumann conditions on the edges of the
/// source rectangle, optional filtered combination with a centred
/// second-order scheme.
class MongeAmpereOperator {
 public:
  /// Resolves the default delta and epsilon. Throws InvalidConfig if delta is
  /// not above K*dx/2 or the tolerances are not positive.
  MongeAmpereOperator(const DensityPair& pair, const SolverConfig& cfg);

  const Grid2D& grid() const { return grid_; }
  const DensityPair& pair() const { return pair_; }
  double delta() const { return delta_; }
  double epsilon() const { return epsilon_; }
  double lipschitz() const { return lipschitz_; }
  NodeIndex fixed_node() const { return fixed_; }
  int unknowns() const { return static_cast<int>(grid_.size()) + 1; }

  /// Interpolated g, with y clamped to the target rectangle. Gradient
  /// components are zero along clamped axes. The cubic interpolant falls back
  /// to bilinear where it undershoots half the smallest surrounding node value.
  struct TargetSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    bool violated = false;  ///< y was outside Y by more than 2dx
  };
  TargetSample target(double y1, double y2) const;

  Linearization ma1(const Potential& u, int i, int j) const;
  Linearization ma2(const Potential& u, int i, int j) const;
  /// -min(MA1, MA2); ties select MA1.
  Linearization compact(const Potential& u, int i, int j) const;
  /// -(u_x1x1 u_x2x2 - u_x1x2^2 - f/g(grad u) - shift) with centred differences.
  Linearization accurate(const Potential& u, int i, int j) const;
  /// F_M + eps * S((F_A - F_M) / eps).
  Linearization filtered(const Potential& u, int i, int j) const;

  /// First-order one-sided Neumann condition. The two-point difference is
  /// matched to the target coordinate half a cell inside Y (y_min + dx/2,
  /// y_max - dx/2). Corners average their two sides in outward-normal form.
  Linearization neumann(const Potential& u, int i, int j) const;
  /// Second-order one-sided Neumann condition.
  Linearization neumann_accurate(const Potential& u, int i, int j) const;
  /// Filtered combination of the two boundary discretisations.
  Linearization neumann_filtered(const Potential& u, int i, int j) const;

  /// Equation used at node (i, j) by the given scheme.
  Linearization equation(const Potential& u, int i, int j, Scheme scheme) const;

  SparseSystem assemble(const Potential& u, Scheme scheme) const;
  std::vector<double> residual(const Potential& u, Scheme scheme) const;

  /// |x - cX|^2 / 2 + cY . (x - cX), pinned at the fixed node, with the shift
  /// set to the mean interior defect.
  Potential initial_guess() const;

  int count_boundary_violations(const Potential& u) const;

 private:
  Linearization ma_branch(const Potential& u, int i, int j, bool diagonal) const;
  double source(int i, int j) const;

  const DensityPair& pair_;
  Grid2D grid_;
  Rect target_rect_;
  Interpolation interpolation_ = Interpolation::bilinear;
  double delta_ = 0.0;
  double epsilon_ = 0.0;
  double lipschitz_ = 0.0;
  NodeIndex fixed_;
};

/// The bounded filter S: identity on [-1, 1], ramps to zero on 1 < |x| < 2.
double filter_s(double x);

// Single-node residuals. (i, j) are local to the source rectangle.
double ma1_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j);
double ma2_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j);
double compact_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j);
double filtered_residual(const Potential& u, const DensityPair& pair, const SolverConfig& cfg, int i, int j);
double neumann_residual(const Potential& u, const DensityPair& pair, int i, int j);
SparseSystem assemble_system(const Potential& u, const DensityPair& pair, const SolverConfig& cfg);

struct SolveResult {
  Potential potential;
  SolverReport report;
};

/// Damped Newton iteration with a direct sparse solve per step. With
/// cfg.use_filtered the monotone solution seeds a second Newton phase on the
/// filtered scheme. Throws NoConvergence or SingularSystem.
SolveResult solve_monge_ampere(const DensityPair& pair, const SolverConfig& cfg);

}  // namespace otm

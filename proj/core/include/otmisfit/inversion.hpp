#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otmisfit/grid.hpp"
#include "otmisfit/ma_solver.hpp"
#include "otmisfit/preprocess.hpp"
#include "otmisfit/seismic_model.hpp"

namespace otm::inversion {

enum class Param { d1, d2, v1, v2 };

std::string_view to_string(Param p);
/// Accepts "d1", "d2", "v1", "v2". Throws InvalidArgument otherwise.
Param parse_param(std::string_view name);
double get(const seismic::LayerModel& m, Param p);
void set(seismic::LayerModel& m, Param p, double value);

struct MisfitConfig {
  seismic::AcquisitionGeometry geometry;
  PreprocessOptions preprocess;
  SolverConfig solver;
};

/// Settings of the shipped seismic experiments: a [0, 6] time window (193
/// samples, so every model of the scan ranges fits), theta_rel = 0.3,
/// sigma_rel = 3 and the cubic target interpolant.
MisfitConfig experiment_config();

struct MisfitValue {
  double w2_squared = 0.0;  ///< W2^2(f+, g+) + W2^2(f-, g-)
  double l2_squared = 0.0;
};

/// Compares the panel synthesised for `trial` with `reference_panel`. Solver
/// and synthesis errors are rethrown with the trial parameters in the message.
MisfitValue misfit(const seismic::LayerModel& trial, const GridField& reference_panel, const MisfitConfig& cfg);

struct Axis {
  Param param = Param::d1;
  seismic::UniformRange range;
};

/// Misfit on a tensor grid of two parameters; cell (a, b) is stored at
/// b * axis1.range.count + a. Failed cells hold NaN.
struct MisfitSurface {
  Axis axis1;
  Axis axis2;
  seismic::LayerModel fixed;
  std::vector<double> l2_values;
  std::vector<double> w2_values;
  int failures = 0;

  std::size_t index(int a, int b) const { return static_cast<std::size_t>(b * axis1.range.count + a); }
  double w2(int a, int b) const { return w2_values[index(a, b)]; }
  double l2(int a, int b) const { return l2_values[index(a, b)]; }
  /// Cell of the smallest finite W2 value.
  std::pair<int, int> w2_argmin() const;
};

/// Cells are independent and run on `jobs` threads.
MisfitSurface scan_surface(const Axis& axis1, const Axis& axis2, const seismic::LayerModel& fixed,
                           const GridField& reference_panel, const MisfitConfig& cfg, int jobs = 1);

/// Header `p1,p2,l2_sq,w2_sq`; rows ordered with axis1 fastest.
void write_surface_csv(std::ostream& out, const MisfitSurface& surface);

struct NelderMeadOptions {
  double xtol = 1e-3;          ///< simplex diameter (max-norm) threshold
  double ftol = 1e-6;          ///< spread of simplex values threshold
  int max_evals = 500;
  double initial_step_rel = 0.05;
};

struct NelderMeadResult {
  std::vector<double> x_min;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Standard simplex method: reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5. The initial simplex perturbs each coordinate by
/// initial_step_rel of its value. Non-finite objective values rank worst.
NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> x0, const NelderMeadOptions& opts = {});

/// Minimises the W2 misfit over (d1, d2, v1, v2). Trials that cannot be
/// synthesised or solved count as +infinity.
NelderMeadResult invert(const seismic::LayerModel& start, const GridField& reference_panel,
                        const MisfitConfig& cfg, const NelderMeadOptions& opts = {});

}  // namespace otm::inversion

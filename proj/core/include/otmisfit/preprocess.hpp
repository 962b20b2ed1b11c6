#pragma once

#include <optional>
#include <vector>

#include "otmisfit/grid.hpp"
#include "otmisfit/key_value.hpp"

namespace otm {

/// Parameters of the density preprocessing pipeline.
struct PreprocessOptions {
  /// Padding level relative to max(g) after unit-mass scaling.
  double theta_rel = 0.01;
  /// Gaussian smoothing width in units of dx; 0 disables smoothing.
  double sigma_rel = 2.0;
  /// Extra nodes added on every side of the common rectangle.
  int margin_cells = 2;
  /// Values <= support_tol * max are outside the support.
  double support_tol = 1e-6;
  /// Optional indicator masks (values 0/1) whose components are rescaled
  /// separately before the global mass normalisation. Empty by default.
  std::vector<GridField> component_masks;

  /// Reads theta_rel, sigma_rel, margin_cells, support_tol; missing keys keep
  /// their defaults.
  static PreprocessOptions from_config(const KeyValueConfig& cfg);
};

/// Preprocessed source/target densities ready for the Monge-Ampere solver.
struct DensityPair {
  GridField f;           ///< source density, unit mass, >= 0, zero outside X
  GridField g;           ///< target density, unit mass, >= theta on Y, zero outside Y
  GridField f_unpadded;  ///< f before the theta layer was added, same scaling as f
  IndexBox X;            ///< source rectangle (nodes)
  IndexBox Y;            ///< target rectangle (nodes), same node counts as X
  double theta = 0.0;    ///< padding level of g after normalisation
  double theta_f = 0.0;  ///< padding level of f after normalisation
  double total_mass = 1.0;

  const Grid2D& grid() const { return f.grid(); }
  Rect source_rect() const { return to_rect(grid(), X); }
  Rect target_rect() const { return to_rect(grid(), Y); }
};

struct SignParts {
  GridField plus;
  GridField minus;
};

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// plus = max(s, 0), minus = max(-s, 0); s == plus - minus exactly.
SignParts split_signs(const GridField& signal);

/// Scales both fields to unit mass. Throws ZeroMass if either has mass <= 0.
std::pair<GridField, GridField> normalize_mass(const GridField& f, const GridField& g);

/// Centre of mass with node-sum quadrature. Throws ZeroMass.
Point2 centre_of_mass(const GridField& field);

/// Tight node box around values > rel_tol * max. Empty box for a zero field.
IndexBox support_box(const GridField& field, double rel_tol = 1e-6);

/// Builds equal-sized rectangles centred at each field's centre of mass that
/// cover both supports, zeroes values outside them, adds theta inside and
/// renormalises to unit mass.
///
/// The common half-size per axis is the larger of the two distances from a
/// centre to the far edge of its support, plus margin_cells. A rectangle
/// wider than the grid is clipped to the full axis (for both fields); one that
/// overhangs an edge is shifted inward. Throws SupportTooLarge if the shifted
/// rectangle no longer covers the support.
DensityPair convexify(const GridField& f, const GridField& g, double theta, int margin_cells = 2,
                      double support_tol = 1e-6);

/// Truncated Gaussian convolution (radius 3 sigma, kernel sums to 1), with
/// half-sample symmetric reflection at the grid edges. Preserves constants
/// and discrete mass. sigma == 0 returns the input.
GridField smooth(const GridField& field, double sigma);

/// K = max(f) * max |grad g| over Y / (min_Y g)^2, with centred differences
/// inside Y (one-sided on its edges).
double lipschitz_bound(const DensityPair& pair);

/// Scales each masked component of g so that its mass matches the same
/// component of f. Masks are 0/1 indicator fields on the common grid.
void rescale_components(const GridField& f, GridField& g, const std::vector<GridField>& masks);

/// smooth -> optional component rescale -> unit mass -> theta layer. Both inputs
/// must be nonnegative with positive mass.
DensityPair prepare_pair(const GridField& f, const GridField& g, const PreprocessOptions& opts);

/// Density pairs for the positive and negative parts of two signed signals.
/// A part with zero mass in both signals is absent (contributes nothing); a
/// part with zero mass in exactly one signal throws MassMismatchUnresolvable.
struct SignedPairs {
  std::optional<DensityPair> positive;
  std::optional<DensityPair> negative;
};
SignedPairs prepare_signed(const GridField& f, const GridField& g, const PreprocessOptions& opts);

}  // namespace otm

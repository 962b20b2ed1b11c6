#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "otmisfit/grid.hpp"
#include "otmisfit/transport_1d.hpp"

// Synthetic offset-time panels for a two-layer earth. This is a convolutional
// stand-in (straight-ray / RMS-velocity moveout, Ricker source), not a wave
// equation solver.
namespace otm::seismic {

/// Two-layer earth: layer thicknesses and wave speeds.
struct LayerModel {
  double d1 = 1.0;
  double d2 = 0.5;
  double v1 = 1.0;
  double v2 = 1.5;

  static LayerModel reference() { return {}; }
  /// Throws InvalidArgument unless all parameters are positive.
  void validate() const;
  std::array<double, 4> to_array() const { return {d1, d2, v1, v2}; }
  static LayerModel from_array(const std::array<double, 4>& p) { return {p[0], p[1], p[2], p[3]}; }
};

struct UniformRange {
  double min = 0.0;
  double max = 1.0;
  int count = 2;

  double step() const { return count > 1 ? (max - min) / (count - 1) : 0.0; }
  double at(int k) const { return count > 1 ? min + k * step() : min; }
};

/// Offsets run along x1, times along x2. Both axes must share one spacing.
struct AcquisitionGeometry {
  UniformRange offsets{0.0, 2.0, 65};
  UniformRange times{0.0, 4.0, 129};
  double wavelet_peak_freq = 2.0;

  void validate() const;
  Grid2D grid() const;
};

struct Traveltimes {
  double t1 = 0.0;  ///< first reflector, straight ray
  double t2 = 0.0;  ///< second reflector, hyperbolic with RMS velocity
};

Traveltimes traveltimes(const LayerModel& model, double offset);

/// (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2)
double ricker(double t, double peak_freq);

struct Reflectivity {
  double r1 = 0.0;  ///< (v2 - v1) / (v2 + v1)
  double r2 = 0.0;  ///< 0.5 (1 - r1^2)
};

Reflectivity reflection_coefficients(const LayerModel& model);

/// Each offset column is r1 ricker(t - t1) + r2 ricker(t - t2). Throws
/// EventOutsideWindow if an arrival time leaves the time range.
GridField synthesize_panel(const LayerModel& model, const AcquisitionGeometry& geom);

/// Ricker profile sampled on n points of [x_min, x_max], centred at `centre`.
Signal1D wavelet_profile(int n, double x_min, double x_max, double peak_freq, double centre = 0.0);

/// Adds i.i.d. uniform noise on [-amplitude, amplitude]. Reproducible for a
/// given seed on every platform (64-bit Mersenne twister, 53-bit mantissa
/// mapping).
GridField add_noise(const GridField& field, double amplitude, std::uint64_t seed);
Signal1D add_noise(const Signal1D& signal, double amplitude, std::uint64_t seed);

enum class NoiseTarget { none, source, both };

/// Shift sweep of a Ricker profile: f(x) against f(x - s).
struct SweepOptions {
  int n = 801;
  double x_min = -4.0;
  double x_max = 4.0;
  double peak_freq = 1.0;
  double s_min = -2.0;
  double s_max = 2.0;
  int s_count = 81;
  NoiseTarget noise = NoiseTarget::none;
  double noise_rel = 0.1;  ///< amplitude relative to max |f|
  std::uint64_t seed = 42;
};

struct SweepRow {
  double s = 0.0;
  double l2_squared = 0.0;
  double w2_squared = 0.0;  ///< W2^2(f+, g+) + W2^2(f-, g-)
};

/// One noise realisation is drawn for f (seed) and one for g (seed + 1) and
/// reused for every shift.
std::vector<SweepRow> wavelet_sweep(const SweepOptions& opts);

}  // namespace otm::seismic

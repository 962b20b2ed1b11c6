#include "otmisfit/seismic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "otmisfit/errors.hpp"

namespace otm::seismic {

void LayerModel::validate() const {
  if (!(d1 > 0.0 && d2 > 0.0 && v1 > 0.0 && v2 > 0.0)) {
    std::ostringstream msg;
    msg << "layer parameters must be positive (d1=" << d1 << ", d2=" << d2 << ", v1=" << v1
        << ", v2=" << v2 << ")";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

void AcquisitionGeometry::validate() const {
  if (offsets.count < 16 || times.count < 16) {
    throw Error(ErrorCode::InvalidArgument, "acquisition needs at least 16 offsets and 16 times");
  }
  if (!(wavelet_peak_freq > 0.0)) throw Error(ErrorCode::InvalidArgument, "peak frequency must be positive");
  (void)grid();
}

Grid2D AcquisitionGeometry::grid() const {
  return Grid2D::from_extents(offsets.count, times.count, offsets.min, offsets.max, times.min, times.max);
}

Traveltimes traveltimes(const LayerModel& model, double offset) {
  if (offset < 0.0) throw Error(ErrorCode::InvalidArgument, "offset must be >= 0");
  const double half = 0.5 * offset;
  const double t1 = 2.0 * std::sqrt(model.d1 * model.d1 + half * half) / model.v1;
  const double tau1 = 2.0 * model.d1 / model.v1;
  const double tau2 = 2.0 * model.d2 / model.v2;
  const double t0 = tau1 + tau2;
  const double vrms2 = (model.v1 * model.v1 * tau1 + model.v2 * model.v2 * tau2) / t0;
  const double t2 = std::sqrt(t0 * t0 + offset * offset / vrms2);
  return {t1, t2};
}

double ricker(double t, double peak_freq) {
  const double a = std::numbers::pi * std::numbers::pi * peak_freq * peak_freq * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

Reflectivity reflection_coefficients(const LayerModel& model) {
  const double r1 = (model.v2 - model.v1) / (model.v2 + model.v1);
  return {r1, 0.5 * (1.0 - r1 * r1)};
}

GridField synthesize_panel(const LayerModel& model, const AcquisitionGeometry& geom) {
  model.validate();
  geom.validate();
  const Grid2D grid = geom.grid();
  const Reflectivity r = reflection_coefficients(model);
  GridField panel(grid);
  for (int i = 0; i < grid.n1; ++i) {
    const double offset = grid.x1(i);
    const Traveltimes tt = traveltimes(model, offset);
    for (const double t : {tt.t1, tt.t2}) {
      if (t < grid.x2_min || t > grid.x2_max) {
        std::ostringstream msg;
        msg << "arrival at t=" << t << " (offset " << offset << ") outside time window [" << grid.x2_min
            << ", " << grid.x2_max << "]";
        throw Error(ErrorCode::EventOutsideWindow, msg.str());
      }
    }
    for (int j = 0; j < grid.n2; ++j) {
      const double t = grid.x2(j);
      panel(i, j) = r.r1 * ricker(t - tt.t1, geom.wavelet_peak_freq) +
                    r.r2 * ricker(t - tt.t2, geom.wavelet_peak_freq);
    }
  }
  return panel;
}

Signal1D wavelet_profile(int n, double x_min, double x_max, double peak_freq, double centre) {
  return Signal1D::sample(n, x_min, x_max, [&](double x) { return ricker(x - centre, peak_freq); });
}

namespace {

class UniformNoise {
 public:
  UniformNoise(double amplitude, std::uint64_t seed) : amplitude_(amplitude), gen_(seed) {}
  double operator()() {
    const double unit = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return amplitude_ * (2.0 * unit - 1.0);
  }

 private:
  double amplitude_;
  std::mt19937_64 gen_;
};

}  // namespace

GridField add_noise(const GridField& field, double amplitude, std::uint64_t seed) {
  if (amplitude < 0.0) throw Error(ErrorCode::InvalidArgument, "noise amplitude must be >= 0");
  if (amplitude == 0.0) return field;
  GridField out = field;
  UniformNoise noise(amplitude, seed);
  for (double& v : out.values()) v += noise();
  return out;
}

Signal1D add_noise(const Signal1D& signal, double amplitude, std::uint64_t seed) {
  if (amplitude < 0.0) throw Error(ErrorCode::InvalidArgument, "noise amplitude must be >= 0");
  if (amplitude == 0.0) return signal;
  Signal1D out = signal;
  UniformNoise noise(amplitude, seed);
  for (double& v : out.values) v += noise();
  return out;
}

std::vector<SweepRow> wavelet_sweep(const SweepOptions& opts) {
  if (opts.s_count < 1) throw Error(ErrorCode::InvalidArgument, "s_count must be >= 1");
  const Signal1D clean = wavelet_profile(opts.n, opts.x_min, opts.x_max, opts.peak_freq);
  double peak = 0.0;
  for (double v : clean.values) peak = std::max(peak, std::abs(v));
  const double amp = opts.noise_rel * peak;
  const bool noisy_f = opts.noise != NoiseTarget::none;
  const bool noisy_g = opts.noise == NoiseTarget::both;
  const Signal1D f = noisy_f ? add_noise(clean, amp, opts.seed) : clean;

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(opts.s_count));
  for (int k = 0; k < opts.s_count; ++k) {
    const double s = opts.s_count > 1 ? opts.s_min + k * (opts.s_max - opts.s_min) / (opts.s_count - 1)
                                      : opts.s_min;
    Signal1D g = wavelet_profile(opts.n, opts.x_min, opts.x_max, opts.peak_freq, s);
    if (noisy_g) g = add_noise(g, amp, opts.seed + 1);
    rows.push_back({s, l2_1d(f, g), signed_w2_1d(f, g)});
  }
  return rows;
}

}  // namespace otm::seismic

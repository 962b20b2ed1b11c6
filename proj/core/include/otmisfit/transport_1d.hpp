#pragma once

#include <vector>

namespace otm {

/// Uniformly sampled 1D signal on [x_min, x_max].
struct Signal1D {
  double x_min = 0.0;
  double x_max = 1.0;
  std::vector<double> values;

  Signal1D() = default;
  /// Throws InvalidGrid for fewer than two samples or a non-increasing range.
  Signal1D(double x_min, double x_max, std::vector<double> values);

  template <class Fn>
  static Signal1D sample(int n, double x_min, double x_max, Fn&& fn) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double h = (x_max - x_min) / (n - 1);
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = fn(x_min + k * h);
    return Signal1D(x_min, x_max, std::move(v));
  }

  int size() const { return static_cast<int>(values.size()); }
  double dx() const { return (x_max - x_min) / (size() - 1); }
  double x(int k) const { return x_min + k * dx(); }
  /// Node-sum quadrature.
  double mass() const;
  bool same_grid(const Signal1D& other) const;
};

/// Exact 1D optimal transport cost between nonnegative signals, each
/// normalised to unit mass: integral over t in (0,1) of (F^-1(t) - G^-1(t))^2.
/// Each sample is treated as a uniform density over its cell; the quantile
/// integral uses a midpoint rule with 10 * max(n_f, n_g) points.
/// Throws ZeroMass or InvalidArgument (negative values).
double w2_1d(const Signal1D& f, const Signal1D& g);

/// Node-sum quadrature of (f - g)^2. Throws GridMismatch.
double l2_1d(const Signal1D& f, const Signal1D& g);

/// w2_1d(f+, g+) + w2_1d(f-, g-). A part with no mass in either signal
/// contributes 0; a part with mass in only one throws MassMismatchUnresolvable.
double signed_w2_1d(const Signal1D& f, const Signal1D& g);

}  // namespace otm

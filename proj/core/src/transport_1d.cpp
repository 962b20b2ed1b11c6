#include "otmisfit/transport_1d.hpp"

#include <algorithm>
#include <cmath>

#include "otmisfit/errors.hpp"

namespace otm {

Signal1D::Signal1D(double lo, double hi, std::vector<double> v) : x_min(lo), x_max(hi), values(std::move(v)) {
  if (values.size() < 2) throw Error(ErrorCode::InvalidGrid, "a 1D signal needs at least two samples");
  if (!(x_max > x_min)) throw Error(ErrorCode::InvalidGrid, "1D signal range must be increasing");
}

double Signal1D::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * dx();
}

bool Signal1D::same_grid(const Signal1D& other) const {
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  return size() == other.size() && close(x_min, other.x_min) && close(x_max, other.x_max);
}

namespace {

// Cumulative distribution at the cell edges x_k -/+ dx/2, normalised to 1.
std::vector<double> edge_cdf(const Signal1D& s) {
  std::vector<double> c(s.values.size() + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (s.values[k] < 0.0) throw Error(ErrorCode::InvalidArgument, "w2_1d needs nonnegative signals");
    total += s.values[k];
    c[k + 1] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "signal has no mass");
  for (double& v : c) v /= total;
  c.back() = 1.0;
  return c;
}

// Quantile evaluator for increasing t.
class QuantileSweep {
 public:
  QuantileSweep(const Signal1D& s) : s_(s), cdf_(edge_cdf(s)) {}

  double operator()(double t) {
    while (cell_ + 1 < s_.size() && cdf_[static_cast<std::size_t>(cell_ + 1)] < t) ++cell_;
    const double lo = cdf_[static_cast<std::size_t>(cell_)];
    const double hi = cdf_[static_cast<std::size_t>(cell_ + 1)];
    const double frac = hi > lo ? (t - lo) / (hi - lo) : 0.5;
    return s_.x(cell_) - 0.5 * s_.dx() + frac * s_.dx();
  }

 private:
  const Signal1D& s_;
  std::vector<double> cdf_;
  int cell_ = 0;
};

}  // namespace

double w2_1d(const Signal1D& f, const Signal1D& g) {
  QuantileSweep qf(f);
  QuantileSweep qg(g);
  const int q = 10 * std::max(f.size(), g.size());
  double sum = 0.0;
  for (int k = 0; k < q; ++k) {
    const double t = (k + 0.5) / q;
    const double d = qf(t) - qg(t);
    sum += d * d;
  }
  return sum / q;
}

double l2_1d(const Signal1D& f, const Signal1D& g) {
  if (!f.same_grid(g)) throw Error(ErrorCode::GridMismatch, "1D signals are sampled on different grids");
  double sum = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const double d = f.values[k] - g.values[k];
    sum += d * d;
  }
  return sum * f.dx();
}

double signed_w2_1d(const Signal1D& f, const Signal1D& g) {
  const auto part = [](const Signal1D& s, double sign) {
    Signal1D out = s;
    for (double& v : out.values) v = std::max(sign * v, 0.0);
    return out;
  };
  const auto has_mass = [](const Signal1D& s) {
    return std::any_of(s.values.begin(), s.values.end(), [](double v) { return v > 0.0; });
  };
  double total = 0.0;
  for (const double sign : {1.0, -1.0}) {
    const Signal1D a = part(f, sign);
    const Signal1D b = part(g, sign);
    const bool ma = has_mass(a), mb = has_mass(b);
    if (!ma && !mb) continue;
    if (ma != mb) {
      throw Error(ErrorCode::MassMismatchUnresolvable,
                  sign > 0 ? "positive part present in only one signal" : "negative part present in only one signal");
    }
    total += w2_1d(a, b);
  }
  return total;
}

}  // namespace otm

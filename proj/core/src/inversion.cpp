#include "otmisfit/inversion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "otmisfit/errors.hpp"
#include "otmisfit/transport_2d.hpp"

namespace otm::inversion {

std::string_view to_string(Param p) {
  switch (p) {
    case Param::d1: return "d1";
    case Param::d2: return "d2";
    case Param::v1: return "v1";
    case Param::v2: return "v2";
  }
  return "?";
}

Param parse_param(std::string_view name) {
  if (name == "d1") return Param::d1;
  if (name == "d2") return Param::d2;
  if (name == "v1") return Param::v1;
  if (name == "v2") return Param::v2;
  throw Error(ErrorCode::InvalidArgument, "unknown layer parameter '" + std::string(name) + "'");
}

double get(const seismic::LayerModel& m, Param p) {
  switch (p) {
    case Param::d1: return m.d1;
    case Param::d2: return m.d2;
    case Param::v1: return m.v1;
    case Param::v2: return m.v2;
  }
  return 0.0;
}

void set(seismic::LayerModel& m, Param p, double value) {
  switch (p) {
    case Param::d1: m.d1 = value; break;
    case Param::d2: m.d2 = value; break;
    case Param::v1: m.v1 = value; break;
    case Param::v2: m.v2 = value; break;
  }
}

MisfitConfig experiment_config() {
  MisfitConfig cfg;
  cfg.geometry.times = {0.0, 6.0, 193};
  cfg.preprocess.theta_rel = 0.3;
  cfg.preprocess.sigma_rel = 3.0;
  cfg.solver.interpolation = Interpolation::cubic;
  return cfg;
}

MisfitValue misfit(const seismic::LayerModel& trial, const GridField& reference_panel, const MisfitConfig& cfg) {
  try {
    const GridField panel = seismic::synthesize_panel(trial, cfg.geometry);
    MisfitValue out;
    out.l2_squared = l2_squared(panel, reference_panel);
    out.w2_squared = signed_w2(panel, reference_panel, cfg.preprocess, cfg.solver).w2_squared;
    return out;
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << e.what() << " [trial d1=" << trial.d1 << " d2=" << trial.d2 << " v1=" << trial.v1
        << " v2=" << trial.v2 << "]";
    throw Error(e.code(), msg.str());
  }
}

std::pair<int, int> MisfitSurface::w2_argmin() const {
  int best_a = -1, best_b = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < axis2.range.count; ++b) {
    for (int a = 0; a < axis1.range.count; ++a) {
      const double v = w2(a, b);
      if (std::isfinite(v) && v < best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  return {best_a, best_b};
}

MisfitSurface scan_surface(const Axis& axis1, const Axis& axis2, const seismic::LayerModel& fixed,
                           const GridField& reference_panel, const MisfitConfig& cfg, int jobs) {
  if (axis1.param == axis2.param) throw Error(ErrorCode::InvalidArgument, "scan axes must differ");
  if (axis1.range.count < 1 || axis2.range.count < 1) {
    throw Error(ErrorCode::InvalidArgument, "scan ranges need at least one sample");
  }
  MisfitSurface surface{axis1, axis2, fixed, {}, {}, 0};
  const int cells = axis1.range.count * axis2.range.count;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  surface.l2_values.assign(static_cast<std::size_t>(cells), nan);
  surface.w2_values.assign(static_cast<std::size_t>(cells), nan);

  std::atomic<int> next{0};
  std::atomic<int> failures{0};
  const auto worker = [&] {
    for (int k = next++; k < cells; k = next++) {
      const int a = k % axis1.range.count;
      const int b = k / axis1.range.count;
      seismic::LayerModel trial = fixed;
      set(trial, axis1.param, axis1.range.at(a));
      set(trial, axis2.param, axis2.range.at(b));
      try {
        const MisfitValue v = misfit(trial, reference_panel, cfg);
        surface.l2_values[static_cast<std::size_t>(k)] = v.l2_squared;
        surface.w2_values[static_cast<std::size_t>(k)] = v.w2_squared;
      } catch (const Error&) {
        ++failures;
      }
    }
  };
  const int threads = std::clamp(jobs, 1, cells);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  surface.failures = failures.load();
  return surface;
}

void write_surface_csv(std::ostream& out, const MisfitSurface& s) {
  out << "p1,p2,l2_sq,w2_sq\n" << std::setprecision(17);
  for (int b = 0; b < s.axis2.range.count; ++b)
    for (int a = 0; a < s.axis1.range.count; ++a)
      out << s.axis1.range.at(a) << ',' << s.axis2.range.at(b) << ',' << s.l2(a, b) << ',' << s.w2(a, b) << '\n';
}

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

bool better(double a, double b) {
  // NaN and +inf rank last.
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return a < b;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Nelder-Mead needs at least one parameter");
  int evals = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Vertex> simplex;
  simplex.push_back({x0, eval(x0)});
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> x = x0;
    x[k] = x0[k] != 0.0 ? x0[k] * (1.0 + opts.initial_step_rel) : 0.00025;
    simplex.push_back({x, eval(x)});
  }

  const auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return better(a.f, b.f); });
  };
  const auto lerp = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };

  bool converged = false;
  while (true) {
    order();
    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(simplex[v].x[k] - simplex[0].x[k]));
    const double spread = simplex[n].f - simplex[0].f;
    if (diameter < opts.xtol || (std::isfinite(spread) && spread < opts.ftol)) {
      converged = true;
      break;
    }
    if (evals + 2 > opts.max_evals) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[v].x[k] / static_cast<double>(n);
    const Vertex& worst = simplex[n];

    // x_r = c + (c - x_worst)
    const std::vector<double> xr = lerp(centroid, worst.x, -1.0);
    const double fr = eval(xr);
    if (!better(fr, simplex[0].f) && better(fr, simplex[n - 1].f)) {
      simplex[n] = {xr, fr};
      continue;
    }
    if (better(fr, simplex[0].f)) {
      const std::vector<double> xe = lerp(centroid, worst.x, -2.0);
      const double fe = eval(xe);
      simplex[n] = better(fe, fr) ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (better(fr, worst.f)) {
      const std::vector<double> xc = lerp(centroid, xr, 0.5);
      const double fc = eval(xc);
      if (!better(fr, fc)) {
        simplex[n] = {xc, fc};
        continue;
      }
    } else {
      const std::vector<double> xcc = lerp(centroid, worst.x, 0.5);
      const double fcc = eval(xcc);
      if (better(fcc, worst.f)) {
        simplex[n] = {xcc, fcc};
        continue;
      }
    }
    if (evals + static_cast<int>(n) > opts.max_evals) break;
    for (std::size_t v = 1; v <= n; ++v) {
      simplex[v].x = lerp(simplex[0].x, simplex[v].x, 0.5);
      simplex[v].f = eval(simplex[v].x);
    }
  }
  order();
  return {simplex[0].x, simplex[0].f, evals, converged};
}

NelderMeadResult invert(const seismic::LayerModel& start, const GridField& reference_panel,
                        const MisfitConfig& cfg, const NelderMeadOptions& opts) {
  const Objective objective = [&](std::span<const double> p) {
    const seismic::LayerModel trial{p[0], p[1], p[2], p[3]};
    try {
      return misfit(trial, reference_panel, cfg).w2_squared;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const auto a = start.to_array();
  return nelder_mead(objective, std::vector<double>(a.begin(), a.end()), opts);
}

}  // namespace otm::inversion

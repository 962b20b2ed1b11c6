#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "otmisfit/errors.hpp"
#include "otmisfit/inversion.hpp"

namespace {

using otm::Error;
using otm::ErrorCode;
using otm::GridField;
namespace inv = otm::inversion;
namespace sm = otm::seismic;

const inv::MisfitConfig& config() {
  static const inv::MisfitConfig cfg = inv::experiment_config();
  return cfg;
}

const GridField& reference_panel() {
  static const GridField panel = sm::synthesize_panel(sm::LayerModel::reference(), config().geometry);
  return panel;
}

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Params, ParseAndAccess) {
  sm::LayerModel m;
  for (auto p : {inv::Param::d1, inv::Param::d2, inv::Param::v1, inv::Param::v2}) {
    EXPECT_EQ(inv::parse_param(inv::to_string(p)), p);
    inv::set(m, p, 7.5);
    EXPECT_EQ(inv::get(m, p), 7.5);
  }
  expect_code(ErrorCode::InvalidArgument, [] { inv::parse_param("v3"); });
}

TEST(Misfit, TruthIsZero) {
  const auto v = inv::misfit(sm::LayerModel::reference(), reference_panel(), config());
  EXPECT_LE(v.w2_squared, 1e-4);
  EXPECT_EQ(v.l2_squared, 0.0);
}

TEST(Misfit, PerturbedVelocityIsLarger) {
  sm::LayerModel m = sm::LayerModel::reference();
  const double at_truth = inv::misfit(m, reference_panel(), config()).w2_squared;
  m.v1 += 0.2;
  EXPECT_GT(inv::misfit(m, reference_panel(), config()).w2_squared, at_truth);
}

TEST(Misfit, ErrorsNameTheTrial) {
  try {
    inv::misfit({5.0, 0.5, 1.0, 1.5}, reference_panel(), config());
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EventOutsideWindow);
    EXPECT_NE(std::string(e.what()).find("d1=5"), std::string::npos) << e.what();
  }
}

TEST(Misfit, FiniteAcrossScanRange) {
  const inv::Axis a{inv::Param::d1, {0.6, 1.4, 5}};
  const inv::Axis b{inv::Param::v1, {0.7, 1.3, 5}};
  const auto s = inv::scan_surface(a, b, sm::LayerModel::reference(), reference_panel(), config());
  EXPECT_EQ(s.failures, 0);
  for (double v : s.w2_values) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
  for (double v : s.l2_values) EXPECT_GE(v, 0.0);
  EXPECT_EQ(s.w2_argmin(), std::make_pair(2, 2));
}

TEST(ScanSurface, SmallScanFindsTruth) {
  const inv::Axis a{inv::Param::d1, {1.0, 1.1, 2}};
  const inv::Axis b{inv::Param::v1, {0.9, 1.0, 2}};
  const auto s = inv::scan_surface(a, b, sm::LayerModel::reference(), reference_panel(), config(), 2);
  EXPECT_EQ(s.w2_argmin(), std::make_pair(0, 1));
}

TEST(ScanSurface, SinglePointMatchesMisfit) {
  const inv::Axis a{inv::Param::d2, {0.55, 0.55, 1}};
  const inv::Axis b{inv::Param::v2, {1.45, 1.45, 1}};
  const auto s = inv::scan_surface(a, b, sm::LayerModel::reference(), reference_panel(), config());
  ASSERT_EQ(s.w2_values.size(), 1u);
  const auto v = inv::misfit({1.0, 0.55, 1.0, 1.45}, reference_panel(), config());
  EXPECT_EQ(s.w2_values[0], v.w2_squared);
  EXPECT_EQ(s.l2_values[0], v.l2_squared);
}

TEST(ScanSurface, SwappingAxesTransposes) {
  const inv::Axis a{inv::Param::d1, {0.9, 1.1, 3}};
  const inv::Axis b{inv::Param::d2, {0.45, 0.55, 2}};
  const auto ab = inv::scan_surface(a, b, sm::LayerModel::reference(), reference_panel(), config(), 2);
  const auto ba = inv::scan_surface(b, a, sm::LayerModel::reference(), reference_panel(), config(), 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(ab.w2(i, j), ba.w2(j, i));
      EXPECT_EQ(ab.l2(i, j), ba.l2(j, i));
    }
  }
}

TEST(ScanSurface, FailedCellsAreNaN) {
  const inv::Axis a{inv::Param::d1, {1.0, 3.0, 2}};
  const inv::Axis b{inv::Param::v1, {1.0, 1.0, 1}};
  const auto s = inv::scan_surface(a, b, sm::LayerModel::reference(), reference_panel(), config());
  EXPECT_EQ(s.failures, 1);
  EXPECT_TRUE(std::isnan(s.w2(1, 0)));
  EXPECT_EQ(s.w2_argmin(), std::make_pair(0, 0));
}

TEST(ScanSurface, SameAxisTwiceIsRejected) {
  const inv::Axis a{inv::Param::d1, {1.0, 1.1, 2}};
  expect_code(ErrorCode::InvalidArgument,
              [&] { inv::scan_surface(a, a, sm::LayerModel::reference(), reference_panel(), config()); });
}

TEST(SurfaceCsv, Layout) {
  inv::MisfitSurface s;
  s.axis1 = {inv::Param::d1, {0.0, 1.0, 2}};
  s.axis2 = {inv::Param::v1, {2.0, 2.0, 1}};
  s.l2_values = {1.0, 2.0};
  s.w2_values = {0.5, 0.25};
  std::ostringstream out;
  inv::write_surface_csv(out, s);
  EXPECT_EQ(out.str(), "p1,p2,l2_sq,w2_sq\n0,2,1,0.5\n1,2,2,0.25\n");
}

TEST(NelderMead, Quadratic) {
  const std::vector<double> a{1.5, -0.7, 3.0};
  const auto obj = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - a[k]) * (x[k] - a[k]);
    return s;
  };
  inv::NelderMeadOptions opts;
  opts.xtol = 1e-5;
  opts.ftol = 1e-12;
  opts.max_evals = 2000;
  const auto r = inv::nelder_mead(obj, {0.2, 0.3, 0.4}, opts);
  EXPECT_TRUE(r.converged);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(r.x_min[k], a[k], 1e-3);
}

TEST(NelderMead, Rosenbrock) {
  const auto obj = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  inv::NelderMeadOptions opts;
  opts.xtol = 1e-6;
  opts.ftol = 1e-14;
  opts.max_evals = 5000;
  const auto r = inv::nelder_mead(obj, {-1.2, 1.0}, opts);
  EXPECT_NEAR(r.x_min[0], 1.0, 1e-2);
  EXPECT_NEAR(r.x_min[1], 1.0, 1e-2);
}

TEST(NelderMead, BudgetExhaustedIsUnconverged) {
  const auto obj = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  inv::NelderMeadOptions opts;
  opts.max_evals = 10;
  const auto r = inv::nelder_mead(obj, {3.0, 4.0}, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evals, 10);
  EXPECT_LT(r.value, 25.0);
}

TEST(NelderMead, NonFiniteValuesRankWorst) {
  const auto obj = [](std::span<const double> x) {
    if (x[0] > 2.05) return std::numeric_limits<double>::infinity();
    return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 1.0) * (x[1] - 1.0);
  };
  const auto r = inv::nelder_mead(obj, {2.0, 2.0});
  EXPECT_NEAR(r.x_min[0], 1.0, 1e-2);
  EXPECT_NEAR(r.x_min[1], 1.0, 1e-2);
}

TEST(InversionProperty, LandscapeContrastAlongDepth) {
  const inv::Axis a{inv::Param::d1, {0.6, 1.4, 17}};
  const inv::Axis b{inv::Param::v1, {1.0, 1.0, 1}};
  const auto s = inv::scan_surface(a, b, sm::LayerModel::reference(), reference_panel(), config());
  ASSERT_EQ(s.failures, 0);
  const int truth = 8;
  EXPECT_EQ(s.w2_argmin().first, truth);
  for (int k = 1; k <= truth; ++k) EXPECT_LT(s.w2(k, 0), s.w2(k - 1, 0)) << k;
  for (int k = truth + 1; k < 17; ++k) EXPECT_GT(s.w2(k, 0), s.w2(k - 1, 0)) << k;
  bool l2_concave_somewhere = false;
  for (int k = 1; k < 16; ++k) {
    EXPECT_GE(s.w2(k - 1, 0) - 2 * s.w2(k, 0) + s.w2(k + 1, 0), 0.0) << k;
    if (s.l2(k - 1, 0) - 2 * s.l2(k, 0) + s.l2(k + 1, 0) < 0.0) l2_concave_somewhere = true;
  }
  EXPECT_TRUE(l2_concave_somewhere);
}

}  // namespace

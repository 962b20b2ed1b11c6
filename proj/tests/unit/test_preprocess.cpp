#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "otmisfit/errors.hpp"
#include "otmisfit/preprocess.hpp"
#include "otmisfit/seismic_model.hpp"
#include "test_pairs.hpp"

namespace {

using otm::DensityPair;
using otm::Error;
using otm::ErrorCode;
using otm::Grid2D;
using otm::GridField;
using otm::IndexBox;
using otm::testing::blob;

GridField blob_field(const Grid2D& g, double c1, double c2, double r = 0.15) {
  return GridField::sample(g, [&](double x, double y) { return blob(x, y, c1, c2, r); });
}

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

void expect_pair_invariants(const DensityPair& p) {
  const GridField& f = p.f;
  const GridField& g = p.g;
  EXPECT_GE(f.min(), 0.0);
  EXPECT_NEAR(f.mass(), 1.0, 1e-10);
  EXPECT_NEAR(g.mass(), 1.0, 1e-10);
  EXPECT_EQ(p.X.width(), p.Y.width());
  EXPECT_EQ(p.X.height(), p.Y.height());
  const Grid2D& grid = p.grid();
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      if (p.Y.contains(i, j)) {
        EXPECT_GE(g(i, j), p.theta * (1 - 1e-12));
      } else {
        EXPECT_EQ(g(i, j), 0.0);
      }
      if (!p.X.contains(i, j)) EXPECT_EQ(f(i, j), 0.0);
    }
  }
}

TEST(SplitSigns, SmallExample) {
  const Grid2D g = Grid2D::from_extents(3, 3, 0, 2, 0, 2);
  GridField s(g);
  s(0, 0) = 1.0;
  s(1, 0) = -2.0;
  const auto parts = otm::split_signs(s);
  EXPECT_EQ(parts.plus(0, 0), 1.0);
  EXPECT_EQ(parts.plus(1, 0), 0.0);
  EXPECT_EQ(parts.minus(0, 0), 0.0);
  EXPECT_EQ(parts.minus(1, 0), 2.0);
  EXPECT_EQ(parts.plus(2, 0), 0.0);
  EXPECT_EQ(parts.minus(2, 0), 0.0);
}

TEST(SplitSigns, NonnegativeHasNoMinus) {
  const GridField f = blob_field(otm::testing::unit_grid(17), 0.5, 0.5, 0.3);
  EXPECT_EQ(otm::split_signs(f).minus.max_abs(), 0.0);
}

TEST(SplitSigns, RickerLobes) {
  const Grid2D g = Grid2D::from_extents(201, 3, -2.0, 2.0, 0.0, 0.04);
  const GridField s = GridField::sample(g, [](double t, double) { return otm::seismic::ricker(t, 1.0); });
  const auto parts = otm::split_signs(s);
  const double tz = 1.0 / (std::numbers::pi * std::sqrt(2.0));
  for (int i = 0; i < g.n1; ++i) {
    const double t = g.x1(i);
    if (std::abs(std::abs(t) - tz) < 1e-9) continue;
    const bool central = std::abs(t) < tz;
    EXPECT_EQ(parts.plus(i, 1) > 0.0, central) << t;
    EXPECT_EQ(parts.minus(i, 1) > 0.0, !central) << t;
  }
}

TEST(SplitSignsProperty, ReconstructsExactly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> val;
  GridField s(otm::testing::unit_grid(21));
  for (int trial = 0; trial < 10; ++trial) {
    for (double& v : s.values()) v = val(rng);
    const auto parts = otm::split_signs(s);
    const GridField back = parts.plus - parts.minus;
    for (std::size_t k = 0; k < s.values().size(); ++k) EXPECT_EQ(back.values()[k], s.values()[k]);
  }
}

TEST(NormalizeMass, ScalesToUnitMass) {
  const Grid2D g = otm::testing::unit_grid(17);
  GridField f = blob_field(g, 0.5, 0.5, 0.3);
  f *= 2.0 / f.mass();
  const auto [fn, gn] = otm::normalize_mass(f, f);
  EXPECT_NEAR(fn(8, 8) / f(8, 8), 0.5, 1e-15);
  EXPECT_NEAR(gn.mass(), 1.0, 1e-14);
}

TEST(NormalizeMass, UnitMassUnchanged) {
  GridField f = blob_field(otm::testing::unit_grid(17), 0.5, 0.5, 0.3);
  f *= 1.0 / f.mass();
  const auto [fn, gn] = otm::normalize_mass(f, f);
  for (std::size_t k = 0; k < f.values().size(); ++k) EXPECT_NEAR(fn.values()[k], f.values()[k], 1e-15 * f.values()[k] + 1e-300);
}

TEST(NormalizeMass, HatMassIsOne) {
  const Grid2D g = Grid2D::from_extents(401, 3, -2.0, 2.0, 0.0, 0.02);
  GridField f = GridField::sample(g, [](double x, double) { return std::max(1.0 - std::abs(x), 0.0); });
  const double line_mass = f.mass() / (3 * g.dx);
  EXPECT_NEAR(line_mass, 1.0, 1e-3);
}

TEST(NormalizeMass, ZeroMassThrows) {
  const GridField z(otm::testing::unit_grid(9));
  const GridField one(otm::testing::unit_grid(9), 1.0);
  expect_code(ErrorCode::ZeroMass, [&] { otm::normalize_mass(z, one); });
  expect_code(ErrorCode::ZeroMass, [&] { otm::normalize_mass(one, z); });
}

TEST(Convexify, IdenticalFields) {
  const GridField f = blob_field(otm::testing::unit_grid(), 0.5, 0.5);
  const DensityPair p = otm::convexify(f, f, 0.05);
  EXPECT_EQ(p.X, p.Y);
  for (std::size_t k = 0; k < f.values().size(); ++k) EXPECT_EQ(p.f.values()[k], p.g.values()[k]);
  expect_pair_invariants(p);
}

TEST(Convexify, TranslateShiftsRectangle) {
  const Grid2D g = otm::testing::unit_grid();
  const GridField f = blob_field(g, 0.3, 0.4);
  const GridField h = blob_field(g, 0.3 + 10 * g.dx, 0.4 + 6 * g.dx);
  const DensityPair p = otm::convexify(f, h, 0.05);
  EXPECT_EQ(p.Y.i_lo, p.X.i_lo + 10);
  EXPECT_EQ(p.Y.i_hi, p.X.i_hi + 10);
  EXPECT_EQ(p.Y.j_lo, p.X.j_lo + 6);
  EXPECT_EQ(p.Y.j_hi, p.X.j_hi + 6);
  expect_pair_invariants(p);
}

TEST(Convexify, PanelRectanglesCentredOnCentroids) {
  namespace sm = otm::seismic;
  const sm::AcquisitionGeometry geom;
  const GridField a = otm::split_signs(sm::synthesize_panel(sm::LayerModel::reference(), geom)).plus;
  const GridField b = otm::split_signs(sm::synthesize_panel({0.8, 0.6, 1.1, 1.4}, geom)).plus;
  const DensityPair p = otm::convexify(a, b, 0.01 * b.max());
  expect_pair_invariants(p);
  const Grid2D& grid = a.grid();
  const auto centroid_t = [&](const GridField& f) {
    double m = 0.0, s = 0.0;
    for (int j = 0; j < grid.n2; ++j)
      for (int i = 0; i < grid.n1; ++i) {
        m += f(i, j);
        s += f(i, j) * grid.x2(j);
      }
    return s / m;
  };
  const auto centre_t = [&](const IndexBox& box) { return 0.5 * (grid.x2(box.j_lo) + grid.x2(box.j_hi)); };
  EXPECT_NEAR(centre_t(p.X), centroid_t(a), 0.5 * grid.dx + 1e-12);
  EXPECT_NEAR(centre_t(p.Y), centroid_t(b), 0.5 * grid.dx + 1e-12);
  // The events span every offset, so the offset axis is clipped to the grid.
  EXPECT_EQ(p.X.i_lo, 0);
  EXPECT_EQ(p.X.i_hi, grid.n1 - 1);
}

TEST(Convexify, OverhangingRectangleShiftsInward) {
  const Grid2D g = otm::testing::unit_grid(33);
  const GridField f = blob_field(g, 0.2, 0.5, 0.15);
  const GridField h = blob_field(g, 0.6, 0.5, 0.38);
  const DensityPair p = otm::convexify(f, h, 0.01);
  EXPECT_EQ(p.X.i_lo, 0);
  EXPECT_EQ(p.Y.i_hi, g.n1 - 1);
  EXPECT_TRUE(p.X.contains(otm::support_box(f)));
  EXPECT_TRUE(p.Y.contains(otm::support_box(h)));
  expect_pair_invariants(p);
}

TEST(ConvexifyProperty, TranslationEquivariance) {
  const Grid2D g = otm::testing::unit_grid();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(0.35, 0.65), s(-0.12, 0.12);
  for (int trial = 0; trial < 10; ++trial) {
    const double c1 = c(rng), c2 = c(rng), s1 = s(rng), s2 = s(rng);
    const DensityPair p = otm::convexify(blob_field(g, c1, c2, 0.12), blob_field(g, c1 + s1, c2 + s2, 0.12), 0.02);
    EXPECT_NEAR(g.x1(p.Y.i_lo) - g.x1(p.X.i_lo), s1, g.dx + 1e-12);
    EXPECT_NEAR(g.x2(p.Y.j_lo) - g.x2(p.X.j_lo), s2, g.dx + 1e-12);
    expect_pair_invariants(p);
  }
}

TEST(Smooth, ZeroSigmaIsIdentity) {
  const GridField f = blob_field(otm::testing::unit_grid(17), 0.5, 0.5, 0.3);
  const GridField s = otm::smooth(f, 0.0);
  for (std::size_t k = 0; k < f.values().size(); ++k) EXPECT_EQ(s.values()[k], f.values()[k]);
}

TEST(Smooth, ConstantUnchanged) {
  const GridField f(otm::testing::unit_grid(17), 2.5);
  const GridField s = otm::smooth(f, 0.1);
  for (double v : s.values()) EXPECT_NEAR(v, 2.5, 1e-13);
}

TEST(Smooth, SpikeBecomesDiscreteGaussian) {
  const Grid2D g = otm::testing::unit_grid(41);
  GridField spike(g);
  spike(20, 20) = 1.0;
  const double sigma = 2 * g.dx;
  const GridField s = otm::smooth(spike, sigma);
  double norm = 0.0;
  for (int k = -6; k <= 6; ++k) norm += std::exp(-0.5 * k * k / 4.0);
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int di = i - 20, dj = j - 20;
      double expect = 0.0;
      if (std::abs(di) <= 6 && std::abs(dj) <= 6) {
        expect = std::exp(-0.5 * (di * di + dj * dj) / 4.0) / (norm * norm);
      }
      EXPECT_NEAR(s(i, j), expect, 1e-6);
    }
  }
}

TEST(SmoothProperty, MassAndSignPreserved) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  GridField f(Grid2D::from_extents(37, 23, 0.0, 3.6, 0.0, 2.2));
  for (int trial = 0; trial < 5; ++trial) {
    for (double& v : f.values()) v = val(rng) < 0.2 ? val(rng) : 0.0;
    for (double sigma : {0.05, 0.1, 0.3}) {
      const GridField s = otm::smooth(f, sigma);
      EXPECT_NEAR(s.mass(), f.mass(), 1e-12 * f.mass());
      EXPECT_GE(s.min(), 0.0);
    }
  }
}

TEST(LipschitzBound, ConstantTarget) {
  const Grid2D g = otm::testing::unit_grid(17);
  EXPECT_EQ(otm::lipschitz_bound(otm::testing::full_grid_pair(GridField(g, 1.0), GridField(g, 1.0))), 0.0);
}

TEST(LipschitzBound, LinearTarget) {
  const Grid2D g = otm::testing::unit_grid(33);
  const GridField target = GridField::sample(g, [](double x, double) { return 1.0 + 0.1 * x; });
  EXPECT_NEAR(otm::lipschitz_bound(otm::testing::full_grid_pair(GridField(g, 1.0), target)), 0.1, 0.005);
}

TEST(LipschitzBound, PanelsDecreaseWithTheta) {
  namespace sm = otm::seismic;
  const sm::AcquisitionGeometry geom;
  const auto a = otm::split_signs(sm::synthesize_panel(sm::LayerModel::reference(), geom)).plus;
  const auto b = otm::split_signs(sm::synthesize_panel({0.8, 0.6, 1.1, 1.4}, geom)).plus;
  double previous = std::numeric_limits<double>::infinity();
  for (double theta_rel : {0.01, 0.05, 0.1}) {
    otm::PreprocessOptions opts;
    opts.theta_rel = theta_rel;
    const DensityPair p = otm::prepare_pair(a, b, opts);
    expect_pair_invariants(p);
    const double k = otm::lipschitz_bound(p);
    EXPECT_TRUE(std::isfinite(k));
    EXPECT_LT(k, previous);
    previous = k;
  }
}

TEST(PrepareSigned, AbsentAndMismatchedParts) {
  const Grid2D g = otm::testing::unit_grid(33);
  const GridField pos = blob_field(g, 0.5, 0.5, 0.2);
  const GridField pos2 = blob_field(g, 0.45, 0.5, 0.2);
  const auto pairs = otm::prepare_signed(pos, pos2, {});
  EXPECT_TRUE(pairs.positive.has_value());
  EXPECT_FALSE(pairs.negative.has_value());
  expect_code(ErrorCode::MassMismatchUnresolvable, [&] { otm::prepare_signed(pos, pos2 * -1.0, {}); });
}

TEST(RescaleComponents, MatchesMaskedMass) {
  const Grid2D g = otm::testing::unit_grid(33);
  const GridField f = blob_field(g, 0.3, 0.5, 0.1) + blob_field(g, 0.7, 0.5, 0.1);
  GridField h = blob_field(g, 0.3, 0.5, 0.1) * 2.0 + blob_field(g, 0.7, 0.5, 0.1) * 0.5;
  const GridField left = GridField::sample(g, [](double x, double) { return x < 0.5 ? 1.0 : 0.0; });
  const GridField right = GridField::sample(g, [](double x, double) { return x >= 0.5 ? 1.0 : 0.0; });
  otm::rescale_components(f, h, {left, right});
  for (std::size_t k = 0; k < f.values().size(); ++k) EXPECT_NEAR(h.values()[k], f.values()[k], 1e-14);
}

TEST(PreprocessOptions, ConfigKeys) {
  otm::KeyValueConfig cfg;
  cfg.set("theta_rel", "0.3");
  cfg.set("sigma_rel", "0");
  cfg.set("margin_cells", "4");
  const auto opts = otm::PreprocessOptions::from_config(cfg);
  EXPECT_EQ(opts.theta_rel, 0.3);
  EXPECT_EQ(opts.sigma_rel, 0.0);
  EXPECT_EQ(opts.margin_cells, 4);
  cfg.set("theta_rel", "0");
  expect_code(ErrorCode::InvalidConfig, [&] { otm::PreprocessOptions::from_config(cfg); });
}

}  // namespace

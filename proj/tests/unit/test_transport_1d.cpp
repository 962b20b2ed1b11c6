#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "otmisfit/errors.hpp"
#include "otmisfit/field_io.hpp"
#include "otmisfit/seismic_model.hpp"
#include "otmisfit/transport_1d.hpp"
#include "otmisfit/transport_2d.hpp"
#include "test_pairs.hpp"

namespace {

using otm::Error;
using otm::ErrorCode;
using otm::Signal1D;

double hat(double x) { return std::max(1.0 - std::abs(x), 0.0); }

Signal1D hat_signal(double shift, int n = 4001) {
  return Signal1D::sample(n, -4.0, 4.0, [&](double x) { return hat(x - shift); });
}

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(W2_1d, HatShiftHalf) { EXPECT_NEAR(otm::w2_1d(hat_signal(0), hat_signal(0.5)), 0.25, 1e-4); }

TEST(W2_1d, HatShiftThree) { EXPECT_NEAR(otm::w2_1d(hat_signal(-1.5), hat_signal(1.5)), 9.0, 1e-3); }

TEST(W2_1d, IdenticalIsZero) { EXPECT_NEAR(otm::w2_1d(hat_signal(0.3), hat_signal(0.3)), 0.0, 1e-14); }

TEST(W2_1d, UnequalMassIsNormalised) {
  Signal1D g = hat_signal(0.5);
  for (double& v : g.values) v *= 3.0;
  EXPECT_NEAR(otm::w2_1d(hat_signal(0), g), 0.25, 1e-4);
}

TEST(W2_1d, Errors) {
  const Signal1D zero(-1.0, 1.0, std::vector<double>(11, 0.0));
  expect_code(ErrorCode::ZeroMass, [&] { otm::w2_1d(zero, hat_signal(0, 11)); });
  Signal1D neg = hat_signal(0, 11);
  neg.values[3] = -0.1;
  expect_code(ErrorCode::InvalidArgument, [&] { otm::w2_1d(neg, hat_signal(0, 11)); });
  expect_code(ErrorCode::InvalidGrid, [] { Signal1D(0.0, 1.0, {1.0}); });
  expect_code(ErrorCode::InvalidGrid, [] { Signal1D(1.0, 1.0, {1.0, 2.0}); });
}

TEST(W2_1d, DifferentGridsAreAllowed) {
  const Signal1D f = Signal1D::sample(2001, -2.0, 2.0, hat);
  const Signal1D g = Signal1D::sample(3001, -1.0, 5.0, [](double x) { return hat(x - 1.0); });
  EXPECT_NEAR(otm::w2_1d(f, g), 1.0, 1e-3);
}

TEST(L2_1d, SmallShift) {
  const double v = otm::l2_1d(hat_signal(0), hat_signal(0.1));
  EXPECT_GE(v, 0.018);
  EXPECT_LE(v, 0.022);
}

TEST(L2_1d, DisjointSupportsAdd) {
  const Signal1D f = hat_signal(-1.5), g = hat_signal(1.5);
  const double norms = otm::l2_1d(f, Signal1D(-4, 4, std::vector<double>(4001, 0.0))) +
                       otm::l2_1d(g, Signal1D(-4, 4, std::vector<double>(4001, 0.0)));
  EXPECT_NEAR(otm::l2_1d(f, g), norms, 1e-12);
  EXPECT_NEAR(norms, 4.0 / 3.0, 1e-5);
}

TEST(L2_1d, IdenticalAndMismatch) {
  EXPECT_EQ(otm::l2_1d(hat_signal(0.2), hat_signal(0.2)), 0.0);
  expect_code(ErrorCode::GridMismatch, [] { otm::l2_1d(hat_signal(0), hat_signal(0, 2001)); });
}

TEST(SignedW2_1d, WaveletCurveIsConvexWithMinimumAtZero) {
  const auto f = otm::seismic::wavelet_profile(801, -4.0, 4.0, 1.0, 0.0);
  std::vector<double> s, w;
  for (int k = 0; k <= 80; ++k) {
    s.push_back(-2.0 + 0.05 * k);
    w.push_back(otm::signed_w2_1d(f, otm::seismic::wavelet_profile(801, -4.0, 4.0, 1.0, s.back())));
  }
  EXPECT_NEAR(w[40], 0.0, 1e-12);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (k != 40) EXPECT_GT(w[k], 0.0);
  for (std::size_t k = 1; k + 1 < w.size(); ++k) EXPECT_GE(w[k - 1] - 2 * w[k] + w[k + 1], -1e-6) << s[k];
}

TEST(SignedW2_1d, NonnegativeReducesToW2) {
  EXPECT_DOUBLE_EQ(otm::signed_w2_1d(hat_signal(0), hat_signal(0.7)), otm::w2_1d(hat_signal(0), hat_signal(0.7)));
}

TEST(SignedW2_1d, AntisymmetricFlip) {
  const auto bump = [](double x) { return std::max(0.0, 1.0 - std::abs(x - 1.0) / 0.5); };
  const Signal1D f = Signal1D::sample(4001, -4, 4, [&](double x) { return bump(x) - bump(-x); });
  Signal1D g = f;
  for (double& v : g.values) v = -v;
  // Each part moves from +-1 to -+1.
  EXPECT_NEAR(otm::signed_w2_1d(f, g), 2 * 4.0, 1e-3);
}

TEST(SignedW2_1d, MassMismatch) {
  Signal1D neg = hat_signal(0, 101);
  for (double& v : neg.values) v = -v;
  expect_code(ErrorCode::MassMismatchUnresolvable, [&] { otm::signed_w2_1d(hat_signal(0, 101), neg); });
}

TEST(Transport1dProperty, TranslationExactness) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    // Random nonnegative profile: a few positive cos^2 bumps.
    const double c1 = -1 + u(rng), c2 = -1 + u(rng), a = 0.2 + u(rng), r = 0.2 + 0.5 * u(rng);
    const auto f = [&](double x) {
      return otm::testing::cos2_bump(std::abs(x - c1), r) + a * otm::testing::cos2_bump(std::abs(x - c2), 0.7);
    };
    const double s = -1.5 + 3 * u(rng);
    const Signal1D a0 = Signal1D::sample(4001, -4, 4, f);
    const Signal1D a1 = Signal1D::sample(4001, -4, 4, [&](double x) { return f(x - s); });
    EXPECT_NEAR(otm::w2_1d(a0, a1), s * s, 1e-4);
  }
}

TEST(Transport1dProperty, ScalingLaw) {
  const auto f = [](double x) { return otm::testing::cos2_bump(std::abs(x + 0.3), 0.6); };
  const auto g = [](double x) { return otm::testing::cos2_bump(std::abs(x - 0.4), 0.3); };
  const double base = otm::w2_1d(Signal1D::sample(4001, -2, 2, f), Signal1D::sample(4001, -2, 2, g));
  for (double lambda : {0.5, 2.0, 3.0}) {
    const Signal1D fs = Signal1D::sample(4001, -2 * lambda, 2 * lambda, [&](double x) { return f(x / lambda); });
    const Signal1D gs = Signal1D::sample(4001, -2 * lambda, 2 * lambda, [&](double x) { return g(x / lambda); });
    EXPECT_NEAR(otm::w2_1d(fs, gs), lambda * lambda * base, 1e-9 * lambda * lambda + 1e-6 * base);
  }
}

TEST(Transport1dProperty, SeparableOracleAgreement) {
  const auto sp = otm::testing::separable_pair();
  const auto pair = otm::prepare_pair(sp.f, sp.g, {});
  const auto res = otm::solve_monge_ampere(pair, {});
  const double w2d = otm::w2_from_potential(res.potential, pair);
  const double oracle = otm::w2_1d(Signal1D::sample(65, 0, 1, sp.f1), Signal1D::sample(65, 0, 1, sp.g1)) +
                        otm::w2_1d(Signal1D::sample(65, 0, 1, sp.f2), Signal1D::sample(65, 0, 1, sp.g2));
  EXPECT_NEAR(w2d, oracle, 0.1 * oracle);
}

TEST(SignalCsv, RoundTrip) {
  const Signal1D f = hat_signal(0.25, 41);
  std::stringstream ss;
  otm::io::write_signal_csv(ss, f);
  const Signal1D back = otm::io::read_signal_csv(ss);
  ASSERT_EQ(back.size(), f.size());
  EXPECT_EQ(back.x_min, f.x_min);
  EXPECT_EQ(back.x_max, f.x_max);
  for (int k = 0; k < f.size(); ++k) EXPECT_EQ(back.values[static_cast<std::size_t>(k)], f.values[static_cast<std::size_t>(k)]);
}

}  // namespace

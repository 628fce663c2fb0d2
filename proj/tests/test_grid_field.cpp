#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modspace/field.hpp"

using namespace modspace;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(make_grid(0, 1, 16), Error);
  EXPECT_THROW(make_grid(4, 1, 16), Error);
  EXPECT_THROW(make_grid(1, 0, 16), Error);
  EXPECT_THROW(make_grid(1, 1, 15), Error);
  EXPECT_THROW(make_grid(1, 1, 6), Error);
  EXPECT_THROW(make_grid(3, 1, 512, 1 << 20), Error);
  EXPECT_NO_THROW(make_grid(3, 1, 64));
}

TEST(Grid, LatticeAndSlots) {
  const GridSpec g = make_grid(1, 2, 16);
  EXPECT_EQ(g.lattice_index(0), 0);
  EXPECT_EQ(g.lattice_index(7), 7);
  EXPECT_EQ(g.lattice_index(8), -8);
  EXPECT_EQ(g.lattice_index(15), -1);
  for (int m = -8; m < 8; ++m) EXPECT_EQ(g.lattice_index(g.storage_slot(m)), m);
  EXPECT_EQ(g.max_box_radius(), 3);
  EXPECT_DOUBLE_EQ(g.period(), 4 * kPi);
}

TEST(Grid, FlatRoundTrip3d) {
  const GridSpec g = make_grid(3, 1, 8);
  for (std::size_t f = 0; f < g.size(); f += 7) EXPECT_EQ(g.flat(g.unflat(f)), f);
}

TEST(Field, SingleModeCoefficient) {
  const GridSpec g = make_grid(1, 1, 16);
  const Field f = Field::sample(g, [](const std::array<double, 3>& x) { return std::exp(cplx(0, 3 * x[0])); });
  const SpectralField c = fft_forward(f);
  for (int m = -8; m < 8; ++m) EXPECT_NEAR(std::abs(c.at({m, 0, 0}) - cplx(m == 3 ? 1.0 : 0.0)), 0.0, 1e-14);
}

TEST(Field, FftRoundTrip2d) {
  const GridSpec g = make_grid(2, 2, 32);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::vector<cplx> v(g.size());
  for (auto& z : v) z = {gauss(rng), gauss(rng)};
  const Field f(g, v);
  const Field back = fft_inverse(fft_forward(f));
  double err = 0;
  for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(back[i] - v[i]));
  EXPECT_LT(err, 1e-13);
}

TEST(Field, GaussianL2AgainstClosedForm) {
  // int exp(-2 (x - x0)^2) dx = sqrt(pi/2); the tails beyond |x - x0| = 4 pi are negligible.
  const GridSpec g = make_grid(1, 4, 256);
  const double x0 = g.period() / 2;
  const Field f = Field::sample(g, [&](const std::array<double, 3>& x) {
    return cplx(std::exp(-(x[0] - x0) * (x[0] - x0)));
  });
  EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(std::sqrt(kPi / 2)), 1e-12);
  EXPECT_NEAR(l2_norm(fft_forward(f)), lp_norm(f, 2.0), 1e-12);
  // int exp(-(x - x0)^2) dx = sqrt(pi)
  EXPECT_NEAR(lp_norm(f, 1.0), std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(lp_norm(f, kInf), 1.0, 1e-12);
}

TEST(Field, LpNormRejectsSubunitP) {
  const Field f = Field::zeros(make_grid(1, 1, 8));
  EXPECT_THROW(lp_norm(f, 0.5), Error);
  EXPECT_EQ(lp_norm(f, 3.0), 0.0);
}

TEST(Field, ArithmeticRequiresSameGrid) {
  const Field a = Field::zeros(make_grid(1, 1, 8));
  const Field b = Field::zeros(make_grid(1, 1, 16));
  try {
    (void)(a + b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}

TEST(Field, MultiplierSkipsZeros) {
  const GridSpec g = make_grid(1, 1, 16);
  const auto c = SpectralField::from_lattice(g, [](const Index3& m) { return m[0] == 2 ? 1.0 : 0.0; });
  const auto d = apply_multiplier(c, [](const std::array<double, 3>& xi) { return cplx(xi[0] * xi[0]); });
  EXPECT_NEAR(std::abs(d.at({2, 0, 0}) - cplx(4.0)), 0.0, 1e-15);
  EXPECT_EQ(d.at({0, 0, 0}), cplx{});
}

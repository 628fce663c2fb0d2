#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "modspace/probes.hpp"

using namespace modspace;

namespace {

std::vector<int> support(const SpectralField& c, double tol = 1e-12) {
  std::vector<int> out;
  for (int m = -c.grid().M / 2; m < c.grid().M / 2; ++m)
    if (std::abs(c.at({m, 0, 0})) > tol) out.push_back(m);
  return out;
}

}  // namespace

TEST(Inflation, CaseOneData) {
  InflationConfig cfg;
  const Field u0 = build_inflation_data(cfg, 8);
  EXPECT_EQ(support(fft_forward(u0)), (std::vector<int>{-9, -8, -7, 7, 8, 9}));
  for (const cplx& v : u0.samples()) EXPECT_LT(std::abs(v.imag()), 1e-12);
}

TEST(Inflation, CaseTwoData) {
  InflationConfig cfg;
  cfg.which = InflationCase::Two;
  const Field u0 = build_inflation_data(cfg, 4);
  std::vector<int> expected;
  for (int m = -36; m <= -28; ++m) expected.push_back(m);
  for (int m = 28; m <= 36; ++m) expected.push_back(m);
  EXPECT_EQ(support(fft_forward(u0)), expected);
  for (const cplx& v : u0.samples()) EXPECT_LT(std::abs(v.imag()), 1e-12);
}

TEST(Inflation, SquareSupportIsSumset) {
  InflationConfig cfg;
  const SpectralField sq = pow_dealiased(fft_forward(build_inflation_data(cfg, 8)), 2);
  std::vector<int> expected;
  for (int base : {-16, 0, 16})
    for (int d = -2; d <= 2; ++d) expected.push_back(base + d);
  EXPECT_EQ(support(sq), expected);
  // Near kN only chi_+ * chi_+ contributes: the triangle 1, 2, 3, 2, 1.
  const double tri[] = {1, 2, 3, 2, 1};
  for (int d = -2; d <= 2; ++d) EXPECT_NEAR(std::abs(sq.at({16 + d, 0, 0}) - tri[d + 2]), 0.0, 1e-12);
}

TEST(Inflation, WitnessIsFirstPicardCorrection) {
  InflationConfig cfg;
  const int N = 8;
  const double t = 1.0 / N;
  const Field u0 = build_inflation_data(cfg, N);
  const SpectralField witness = inflation_witness(fft_forward(u0), cfg, t);

  EvolveConfig ec;
  ec.power_k = cfg.k;
  ec.T = t;
  ec.time_nodes = 2;
  ec.quad_nodes = cfg.quad_nodes;
  const auto heat = PropagatorSpec::fractional_heat(cfg.alpha);
  const Trajectory one = picard_iterate(u0, heat, ec, 1);
  const SpectralField correction = fft_forward(one.states.back()) - propagate(fft_forward(u0), heat, t);
  double err = 0;
  for (std::size_t i = 0; i < witness.size(); ++i) err = std::max(err, std::abs(witness[i] - correction[i]));
  EXPECT_LT(err, 1e-10);
}

TEST(Inflation, CaseOneRates) {
  InflationConfig cfg;
  const ProbeReport rep = inflation_probe(cfg);
  EXPECT_EQ(rep.verdict, ProbeVerdict::Consistent);
  EXPECT_NEAR(rep.check("inflation_exponent").fit.slope, 0.5, 0.2);
  EXPECT_EQ(rep.rows.size(), cfg.N_list.size());
}

TEST(Inflation, Errors) {
  InflationConfig cfg;
  cfg.N_list = {8, 16};
  EXPECT_THROW(inflation_probe(cfg), Error);
  cfg.N_list = {8, 16, 1 << 22};  // needs 2^25 samples, above the grid cap
  try {
    inflation_probe(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
  cfg.N_list = {16, 8, 32};
  EXPECT_THROW(inflation_probe(cfg), Error);
}

TEST(Smoothing, NoSmoothingNeeded) {
  SmoothingConfig cfg;
  cfg.s1 = cfg.s2 = 0.5;
  cfg.N_min = 0;
  const ProbeReport rep = smoothing_probe(PropagatorSpec::fractional_heat(1), cfg);
  EXPECT_NEAR(rep.check("smoothing_slope").fit.slope, 0.0, 0.05);
  for (const auto& row : rep.rows) EXPECT_LE(row[1], 1.0 + 1e-12);
}

TEST(Smoothing, Errors) {
  SmoothingConfig cfg;
  cfg.s1 = 0;
  cfg.s2 = 1;
  EXPECT_THROW(smoothing_probe(PropagatorSpec::fractional_heat(1), cfg), Error);
  cfg = {};
  EXPECT_THROW(smoothing_probe(PropagatorSpec::schrodinger(), cfg), Error);
  cfg.t_list = {1e-6, 1e-3, 1e-1};
  EXPECT_THROW(smoothing_probe(PropagatorSpec::fractional_heat(1), cfg), Error);
  cfg = {};
  cfg.s1 = 2;
  cfg.N_max = 16;  // the maximiser near 2/t lies beyond the family at t = 0.05
  cfg.t_list = {0.05, 0.1, 0.2};
  try {
    smoothing_probe(PropagatorSpec::fractional_heat(1), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
}

TEST(Product, SingleModeRatio) {
  ProductConfig cfg;
  cfg.s = 0.5;
  const GridSpec g = product_grid(cfg, 16);
  const BoxTable table(g, make_window(cfg.window), g.max_box_radius());
  for (int m : {0, 3, 11}) {
    const auto u = SpectralField::from_lattice(g, [&](const Index3& j) { return j[0] == m ? 1.0 : 0.0; });
    const double expected =
        std::pow((1.0 + 4.0 * m * m) / (1.0 + m * m), 0.25) / std::sqrt(2 * std::numbers::pi);
    EXPECT_NEAR(product_ratio(u, cfg, table), expected, 1e-12);
  }
}

TEST(Product, RelationValidated) {
  ProductConfig cfg;
  cfg.q = 2;
  EXPECT_THROW(product_probe(cfg), Error);
  cfg = {};
  cfg.s = -0.5;
  EXPECT_THROW(product_probe(cfg), Error);
  cfg = {};
  cfg.form = ProductForm::Power;
  cfg.s1 = 0.5;
  cfg.s2 = 0.5;
  cfg.q1 = 2;
  cfg.q2 = 1;
  EXPECT_THROW(product_probe(cfg), Error);
}

TEST(Product, DeterministicAndBounded) {
  ProductConfig cfg;
  cfg.ensemble = 16;
  cfg.threads = 3;
  const ProbeReport a = product_probe(cfg);
  cfg.threads = 1;
  const ProbeReport b = product_probe(cfg);
  EXPECT_EQ(a.rows, b.rows);
  for (const auto& row : a.rows) {
    EXPECT_TRUE(std::isfinite(row[1]));
    EXPECT_LE(row[2], row[1]);
  }
  cfg.seed = 2;
  EXPECT_NE(product_probe(cfg).rows, b.rows);
}

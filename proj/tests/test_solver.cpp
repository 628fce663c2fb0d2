#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modspace/solver.hpp"

using namespace modspace;

namespace {

Field constant(const GridSpec& g, double c) {
  return Field::sample(g, [&](const std::array<double, 3>&) { return c; });
}

SpectralField random_coeffs(const GridSpec& g, int band, double amp, std::uint64_t seed, bool real_field = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto c = SpectralField::from_lattice(g, [&](const Index3& m) {
    for (int d = 0; d < g.n; ++d)
      if (std::abs(m[d]) > band * g.P) return cplx{};
    return amp * cplx(gauss(rng), gauss(rng));
  });
  if (!real_field) return c;
  const Field f = fft_inverse(c);
  std::vector<cplx> re(f.size());
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = f[i].real();
  return fft_forward(Field(g, re));
}

// Full linear convolution of coefficient sequences indexed -L..L (offset L).
std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double wiener(const Field& f) {
  double s = 0;
  for (const cplx& c : fft_forward(f).coeffs()) s += std::abs(c);
  return s;
}

}  // namespace

TEST(Dealias, SingleModeAndBinomial) {
  const GridSpec g = make_grid(1, 1, 32);
  const auto c3 = SpectralField::from_lattice(g, [](const Index3& m) { return m[0] == 3 ? 1.0 : 0.0; });
  const auto sq = pow_dealiased(c3, 2);
  for (int m = -16; m < 16; ++m) EXPECT_NEAR(std::abs(sq.at({m, 0, 0}) - cplx(m == 6 ? 1.0 : 0.0)), 0, 1e-15);

  const auto b = SpectralField::from_lattice(g, [](const Index3& m) { return m[0] == 0 || m[0] == 1 ? 1.0 : 0.0; });
  const auto b2 = pow_dealiased(b, 2);
  EXPECT_NEAR(std::abs(b2.at({0, 0, 0}) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(b2.at({1, 0, 0}) - 2.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(b2.at({2, 0, 0}) - 1.0), 0, 1e-15);
}

TEST(Dealias, MatchesBruteForceConvolution) {
  for (int k : {2, 3, 4}) {
    const GridSpec g = make_grid(1, 1, 64);
    const SpectralField c = random_coeffs(g, 31, 0.1, 40 + k);
    std::vector<cplx> seq(64);  // lattice -32..31 at offset 32
    for (int m = -32; m < 32; ++m) seq[m + 32] = c.at({m, 0, 0});
    std::vector<cplx> full = seq;
    for (int j = 1; j < k; ++j) full = convolve(full, seq);
    const int offset = 32 * k;
    const SpectralField got = pow_dealiased(c, k);
    double err = 0, scale = 0;
    for (int m = -32; m < 32; ++m) {
      err = std::max(err, std::abs(got.at({m, 0, 0}) - full[m + offset]));
      scale = std::max(scale, std::abs(full[m + offset]));
    }
    EXPECT_LT(err, 1e-12 * std::max(1.0, scale)) << "k=" << k;
  }
}

TEST(Dealias, TwoDimensionalSquare) {
  const GridSpec g = make_grid(2, 1, 16);
  const SpectralField c = random_coeffs(g, 7, 1.0, 9);
  const SpectralField got = pow_dealiased(c, 2);
  for (int a = -8; a < 8; a += 3)
    for (int b = -8; b < 8; b += 2) {
      cplx ref{};
      for (int i = -8; i < 8; ++i)
        for (int j = -8; j < 8; ++j) ref += c.at({i, j, 0}) * c.at({a - i, b - j, 0});
      EXPECT_LT(std::abs(got.at({a, b, 0}) - ref), 1e-12);
    }
}

TEST(Dealias, Headroom) {
  EXPECT_EQ(dealiased_size(64, 2, 0.0), 96);
  EXPECT_EQ(dealiased_size(64, 3, 0.0), 128);
  try {
    dealiased_size(64, 3, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Headroom);
  }
}

TEST(Duhamel, ClosedForms) {
  const GridSpec g = make_grid(1, 1, 16);
  const auto heat = PropagatorSpec::fractional_heat(1);
  const SpectralField zero = duhamel(heat, [&](double) { return SpectralField::zeros(g); }, 0.7, 8);
  for (const cplx& v : zero.coeffs()) EXPECT_EQ(v, cplx{});

  const cplx chat(0.3, -0.2);
  const auto forcing = SpectralField::from_lattice(g, [&](const Index3& m) {
    return m[0] == 3 || m[0] == 0 ? chat : cplx{};
  });
  for (double t : {0.1, 0.5, 2.0}) {
    const SpectralField r = duhamel(heat, [&](double) { return forcing; }, t, 16);
    EXPECT_LT(std::abs(r.at({3, 0, 0}) - chat * (1 - std::exp(-3 * t)) / 3.0), 1e-10);
    EXPECT_LT(std::abs(r.at({0, 0, 0}) - chat * t), 1e-14);
  }
  EXPECT_THROW(duhamel(heat, [&](double) { return forcing; }, 1.0, 0), Error);
  // Field-valued forcing goes through the same path.
  const SpectralField viaField = duhamel(heat, [&](double) { return fft_inverse(forcing); }, 0.5, 16);
  EXPECT_LT(std::abs(viaField.at({3, 0, 0}) - chat * (1 - std::exp(-1.5)) / 3.0), 1e-10);
}

TEST(Solver, ConfigValidation) {
  EvolveConfig c;
  c.quad_nodes = 3;
  EXPECT_THROW(validate(c), Error);
  c = {};
  c.T = 0;
  EXPECT_THROW(validate(c), Error);
  c = {};
  c.etd_order = 3;
  EXPECT_THROW(validate(c), Error);
  c = {};
  c.power_k = 3;
  c.dealias_factor = 1.5;
  EXPECT_THROW(validate(c), Error);
  EXPECT_EQ(parse_solver_mode("etd-step"), SolverMode::EtdStep);
  EXPECT_THROW(parse_solver_mode("rk4"), Error);
}

TEST(Solver, ZeroData) {
  const GridSpec g = make_grid(1, 1, 16);
  EvolveConfig cfg;
  const auto heat = PropagatorSpec::fractional_heat(1);
  const Trajectory t = picard_solve(Field::zeros(g), heat, cfg);
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iterations, 1);
  for (const auto& s : t.states) EXPECT_EQ(lp_norm(s, 2.0), 0.0);
  EXPECT_EQ(duhamel_residual(t, heat, cfg), 0.0);
}

TEST(Solver, RiccatiBothModes) {
  const GridSpec g = make_grid(1, 1, 16);
  for (double alpha : {0.5, 1.0, 2.0})
    for (SolverMode mode : {SolverMode::PicardGlobal, SolverMode::EtdStep}) {
      EvolveConfig cfg;
      cfg.mode = mode;
      const auto spec = PropagatorSpec::fractional_heat(alpha);
      const Trajectory t = evolve(constant(g, 0.1), spec, cfg);
      ASSERT_FALSE(t.blew_up);
      for (std::size_t j = 0; j < t.times.size(); ++j) {
        const double exact = 0.1 / (1 - 0.1 * t.times[j]);
        for (std::size_t i = 0; i < g.size(); i += 5) EXPECT_NEAR(t.states[j][i].real(), exact, 1e-6);
      }
      EXPECT_NEAR(t.states.back()[0].real(), 1.0 / 9.0, 1e-6);
      if (mode == SolverMode::PicardGlobal) { EXPECT_LE(duhamel_residual(t, spec, cfg), 10 * cfg.picard_tol); }
    }
}

TEST(Solver, CubicRiccati) {
  // u' = u^3: u = c / sqrt(1 - 2 c^2 t); (k-1) c^{k-1} T = 0.5
  const GridSpec g = make_grid(1, 1, 16);
  EvolveConfig cfg;
  cfg.power_k = 3;
  cfg.T = 1.0;
  const double c = 0.5;
  for (SolverMode mode : {SolverMode::PicardGlobal, SolverMode::EtdStep}) {
    cfg.mode = mode;
    const Trajectory t = evolve(constant(g, c), PropagatorSpec::fractional_heat(1), cfg);
    for (std::size_t j = 0; j < t.times.size(); ++j)
      EXPECT_NEAR(t.states[j][3].real(), c / std::sqrt(1 - 2 * c * c * t.times[j]), 1e-6);
  }
}

TEST(Solver, LinearEtdMatchesPropagate) {
  const GridSpec g = make_grid(1, 2, 32);
  const Field u0 = fft_inverse(random_coeffs(g, 6, 1.0, 7));
  EvolveConfig cfg;
  cfg.mode = SolverMode::EtdStep;
  cfg.linear = true;
  for (auto spec : {PropagatorSpec::fractional_heat(1.5), PropagatorSpec::schrodinger()}) {
    const Trajectory t = etd_solve(u0, spec, cfg);
    for (std::size_t j = 0; j < t.times.size(); ++j) {
      const Field ref = propagate(u0, spec, t.times[j]);
      EXPECT_LT(lp_norm(t.states[j] - ref, 2.0) / lp_norm(ref, 2.0), 1e-12);
    }
  }
}

TEST(Solver, EtdSelfConvergence) {
  const GridSpec g = make_grid(1, 1, 32);
  const Field u0 = fft_inverse(random_coeffs(g, 6, 0.15, 21, true));
  const auto spec = PropagatorSpec::fractional_heat(1);
  for (int order : {1, 2}) {
    EvolveConfig cfg;
    cfg.mode = SolverMode::EtdStep;
    cfg.etd_order = order;
    cfg.T = 0.5;
    cfg.time_nodes = 2;
    cfg.etd_substeps = 2048;
    const Field ref = etd_solve(u0, spec, cfg).states.back();
    std::vector<double> errs;
    for (int steps : {16, 32, 64}) {
      cfg.etd_substeps = steps;
      errs.push_back(lp_norm(etd_solve(u0, spec, cfg).states.back() - ref, 2.0));
    }
    const double target = std::pow(2.0, order);
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double r = errs[i - 1] / errs[i];
      EXPECT_GT(r, 0.8 * target) << "order " << order;
      EXPECT_LT(r, 1.2 * target) << "order " << order;
    }
  }
}

TEST(Solver, EtdBlowupStopsWithDiagnostic) {
  const GridSpec g = make_grid(1, 1, 16);
  EvolveConfig cfg;
  cfg.mode = SolverMode::EtdStep;
  cfg.T = 2.0;  // u' = u^2 from u = 1 blows up at t = 1
  const Trajectory t = etd_solve(constant(g, 1.0), PropagatorSpec::fractional_heat(1), cfg);
  EXPECT_TRUE(t.blew_up);
  EXPECT_FALSE(t.diagnostic.empty());
  EXPECT_LT(t.times.back(), 1.0 + 1e-9);
}

TEST(Solver, PicardDivergenceIsReported) {
  const GridSpec g = make_grid(1, 1, 16);
  EvolveConfig cfg;
  cfg.T = 2.0;
  try {
    picard_solve(constant(g, 1.0), PropagatorSpec::fractional_heat(1), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
  }
}

TEST(Solver, PicardContraction) {
  const GridSpec g = make_grid(1, 1, 32);
  const Field u0 = fft_inverse(random_coeffs(g, 6, 0.05, 5, true));
  const auto spec = PropagatorSpec::fractional_heat(1);
  EvolveConfig cfg;
  cfg.metric = {0.0, 2.0, 1.0};
  std::vector<double> factors;
  for (double T : {1.0, 0.5, 0.25}) {
    cfg.T = T;
    const Trajectory t = picard_solve(u0, spec, cfg);
    ASSERT_TRUE(t.converged);
    ASSERT_GE(t.iterate_differences.size(), 3u);
    for (std::size_t m = 1; m < t.iterate_differences.size(); ++m)
      EXPECT_LT(t.iterate_differences[m], t.iterate_differences[m - 1]);
    EXPECT_LT(t.contraction_factor(), 1.0);
    EXPECT_LE(duhamel_residual(t, spec, cfg), 10 * cfg.picard_tol);

    // Wiener-algebra estimate d_{m+1} <= k T C^{k-1} d_m, C the sup of the iterates'
    // Wiener norms (M^0_{2,1} is sqrt(2 pi) times that norm at P = 1).
    double C = 0;
    for (const auto& s : t.states) C = std::max(C, wiener(s));
    const double bound = cfg.power_k * T * std::pow(1.25 * C, cfg.power_k - 1);
    for (double r : t.contraction_ratios) EXPECT_LE(r, bound);
    factors.push_back(t.contraction_factor());
  }
  EXPECT_GT(factors[0], factors[1]);
  EXPECT_GT(factors[1], factors[2]);
}

TEST(Solver, ResidualDetectsCorruption) {
  const GridSpec g = make_grid(1, 1, 32);
  const Field u0 = fft_inverse(random_coeffs(g, 5, 0.1, 13, true));
  const auto spec = PropagatorSpec::fractional_heat(1);
  EvolveConfig cfg;
  Trajectory t = picard_solve(u0, spec, cfg);
  EXPECT_LE(duhamel_residual(t, spec, cfg), 10 * cfg.picard_tol);
  for (auto& s : t.states) s = 2.0 * s;
  for (auto& seg : t.segments)
    for (auto& s : seg.states) s = 2.0 * s;
  EXPECT_GT(duhamel_residual(t, spec, cfg), 1e3 * cfg.picard_tol);
}

TEST(Solver, DenseOutputHitsNodes) {
  const GridSpec g = make_grid(1, 1, 16);
  EvolveConfig cfg;
  const Trajectory t = picard_solve(constant(g, 0.1), PropagatorSpec::fractional_heat(1), cfg);
  for (std::size_t j = 0; j < t.times.size(); ++j)
    EXPECT_NEAR(t.spectral_at(t.times[j]).at({0, 0, 0}).real(), t.states[j][0].real(), 1e-13);
  EXPECT_NEAR(t.spectral_at(0.3).at({0, 0, 0}).real(), 0.1 / 0.97, 1e-8);
}

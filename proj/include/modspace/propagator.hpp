#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "modspace/error.hpp"
#include "modspace/field.hpp"
#include "modspace/modulation.hpp"

namespace modspace {

enum class PropagatorKind { FractionalHeat, Schrodinger, KgCos, KgSinc };

inline std::string_view to_string(PropagatorKind k) {
  switch (k) {
    case PropagatorKind::FractionalHeat: return "fractional-heat";
    case PropagatorKind::Schrodinger: return "schrodinger";
    case PropagatorKind::KgCos: return "kg-cos";
    case PropagatorKind::KgSinc: return "kg-sinc";
  }
  return "unknown";
}

/// Fourier multiplier U(t) = F^{-1} m_t(xi) F.
///
/// fractional-heat: exp(-t |xi|^alpha), smoothing index 1/alpha.
/// schrodinger:     exp(-i t |xi|^2), unitary.
/// kg-cos:          cos(t <xi>),          <xi> = sqrt(1 + |xi|^2).
/// kg-sinc:         sin(t <xi>) / <xi>.
struct PropagatorSpec {
  PropagatorKind kind = PropagatorKind::FractionalHeat;
  double alpha = 1.0;

  static PropagatorSpec fractional_heat(double alpha) {
    require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgument,
            "fractional heat requires alpha > 0");
    return {PropagatorKind::FractionalHeat, alpha};
  }
  static PropagatorSpec schrodinger() { return {PropagatorKind::Schrodinger, 2.0}; }
  static PropagatorSpec kg_cos() { return {PropagatorKind::KgCos, 2.0}; }
  static PropagatorSpec kg_sinc() { return {PropagatorKind::KgSinc, 2.0}; }

  bool dissipative() const { return kind == PropagatorKind::FractionalHeat; }

  double theta() const { return kind == PropagatorKind::FractionalHeat ? 1.0 / alpha : 0.0; }

  /// Generator p(|xi|) for the semigroup kinds, U(t) = exp(t p).
  cplx generator(double r) const {
    switch (kind) {
      case PropagatorKind::FractionalHeat: return {r == 0.0 ? 0.0 : -std::pow(r, alpha), 0.0};
      case PropagatorKind::Schrodinger: return {0.0, -r * r};
      default: break;
    }
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(kind)) + " is not a semigroup and has no generator");
  }

  bool has_generator() const {
    return kind == PropagatorKind::FractionalHeat || kind == PropagatorKind::Schrodinger;
  }

  cplx multiplier(double r, double t) const {
    switch (kind) {
      case PropagatorKind::FractionalHeat:
        return {r == 0.0 ? 1.0 : std::exp(-t * std::pow(r, alpha)), 0.0};
      case PropagatorKind::Schrodinger: return std::polar(1.0, -t * r * r);
      case PropagatorKind::KgCos: return {std::cos(t * std::sqrt(1.0 + r * r)), 0.0};
      case PropagatorKind::KgSinc: {
        const double w = std::sqrt(1.0 + r * r);
        return {std::sin(t * w) / w, 0.0};
      }
    }
    return {};
  }
};

inline void check_time(const PropagatorSpec& spec, double t) {
  require(std::isfinite(t), ErrorKind::InvalidArgument, "time must be finite");
  require(!(spec.dissipative() && t < 0.0), ErrorKind::InvalidArgument,
          "fractional heat propagator requires t >= 0");
}

inline SpectralField propagate(const SpectralField& c, const PropagatorSpec& spec, double t) {
  check_time(spec, t);
  return apply_multiplier(c, [&](const std::array<double, 3>& xi) { return spec.multiplier(norm2(xi), t); });
}

inline Field propagate(const Field& f, const PropagatorSpec& spec, double t) {
  return fft_inverse(propagate(fft_forward(f), spec, t));
}

/// Free Klein-Gordon evolution cos(t w^{1/2}) u0 + sin(t w^{1/2}) w^{-1/2} u1, w = I - Laplacian.
inline Field kg_free_evolution(const Field& u0, const Field& u1, double t) {
  require_same_grid(u0.grid(), u1.grid());
  return fft_inverse(propagate(fft_forward(u0), PropagatorSpec::kg_cos(), t) +
                     propagate(fft_forward(u1), PropagatorSpec::kg_sinc(), t));
}

struct DecayCheck {
  double bound = 0.0;
  double measured = 0.0;
};

struct DecayCheckOptions {
  int P = 4;                 // lattice refinement; P > 1 puts points inside each box
  int ensemble = 16;
  std::uint64_t seed = 1;
  WindowKind window = WindowKind::RaisedCosine;
};

/// Compares max_f ||box_k U(t) f||_2 / ||box_k f||_2 over random fields
/// against exp(-t (|k| - sqrt(n))^alpha).
///
/// Every lattice point of supp phi_k has |xi| >= |k| - sqrt(n), so for p = 2
/// the ratio cannot exceed the bound.
inline DecayCheck box_decay_check(const PropagatorSpec& spec, const Index3& k, int n, double t,
                                  const DecayCheckOptions& opt = {}) {
  require(spec.kind == PropagatorKind::FractionalHeat, ErrorKind::InvalidArgument,
          "box decay check applies to the fractional heat semigroup");
  require(n >= 1 && n <= 3, ErrorKind::InvalidArgument, "dimension must be in [1,3]");
  const int ksup = sup_norm(k, n);
  require(ksup != 0, ErrorKind::InvalidArgument, "box k = 0 is rejected");
  require(ksup >= 2, ErrorKind::OutOfRange, "box decay check requires |k|_inf >= 2");
  check_time(spec, t);

  const GridSpec grid = make_grid(n, opt.P, next_pow2(2L * opt.P * (ksup + 2)));
  const BoxTable table(grid, make_window(opt.window), ksup);

  double kn = 0.0;
  for (int d = 0; d < n; ++d) kn += static_cast<double>(k[d]) * k[d];
  DecayCheck out;
  out.bound = std::exp(-t * std::pow(std::sqrt(kn) - std::sqrt(static_cast<double>(n)), spec.alpha));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> piece;
  std::vector<cplx> evolved;
  for (int e = 0; e < opt.ensemble; ++e) {
    piece.clear();
    evolved.clear();
    table.for_each_tap(k, [&](std::size_t flat, double w) {
      const cplx a(gauss(rng), gauss(rng));
      const double r = norm2(frequency(grid, grid.unflat(flat)));
      piece.push_back(w * a);
      evolved.push_back(w * a * spec.multiplier(r, t));
    });
    const double den = lp_sum_root(piece, 2.0);
    if (den == 0.0) continue;
    out.measured = std::max(out.measured, lp_sum_root(evolved, 2.0) / den);
  }
  return out;
}

}  // namespace modspace

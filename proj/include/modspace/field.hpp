#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "modspace/error.hpp"
#include "modspace/fft.hpp"
#include "modspace/grid.hpp"

namespace modspace {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Complex samples f(x_j) at x_j = j*h, row-major over axes.
class Field {
 public:
  Field(GridSpec grid, std::vector<cplx> samples) : grid_(grid), samples_(std::move(samples)) {
    require(samples_.size() == grid_.size(), ErrorKind::InvalidArgument,
            "field sample count does not match M^n");
  }

  static Field zeros(const GridSpec& grid) { return Field(grid, std::vector<cplx>(grid.size())); }

  /// Samples f at every grid point; f receives the point's coordinates.
  template <class F>
  static Field sample(const GridSpec& grid, F&& f) {
    std::vector<cplx> values(grid.size());
    const double h = grid.spacing();
    for_each_point(grid, [&](std::size_t flat, const Index3& slots) {
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int d = 0; d < grid.n; ++d) x[d] = slots[d] * h;
      values[flat] = cplx(f(x));
    });
    return Field(grid, std::move(values));
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> samples() const { return samples_; }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }

 private:
  GridSpec grid_;
  std::vector<cplx> samples_;
};

/// Fourier coefficients c_m with f(x_j) = sum_m c_m exp(i xi_m . x_j), FFT order.
class SpectralField {
 public:
  SpectralField(GridSpec grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    require(coeffs_.size() == grid_.size(), ErrorKind::InvalidArgument,
            "spectral coefficient count does not match M^n");
  }

  static SpectralField zeros(const GridSpec& grid) {
    return SpectralField(grid, std::vector<cplx>(grid.size()));
  }

  /// Builds coefficients from c(m) evaluated at every lattice index m.
  template <class F>
  static SpectralField from_lattice(const GridSpec& grid, F&& c) {
    std::vector<cplx> values(grid.size());
    for_each_point(grid, [&](std::size_t flat, const Index3& slots) {
      Index3 m{0, 0, 0};
      for (int d = 0; d < grid.n; ++d) m[d] = grid.lattice_index(slots[d]);
      values[flat] = cplx(c(m));
    });
    return SpectralField(grid, std::move(values));
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient at lattice index m (frequency m/P); zero outside the band.
  cplx at(const Index3& m) const {
    Index3 slots{0, 0, 0};
    for (int d = 0; d < grid_.n; ++d) {
      if (!grid_.in_band(m[d])) return {};
      slots[d] = grid_.storage_slot(m[d]);
    }
    return coeffs_[grid_.flat(slots)];
  }

 private:
  GridSpec grid_;
  std::vector<cplx> coeffs_;
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
  require(a == b, ErrorKind::GridMismatch, "operands live on different grids");
}

inline SpectralField fft_forward(const Field& f) {
  const auto& g = f.grid();
  std::vector<cplx> out(g.size());
  fft::transform(f.samples(), out, g.n, g.M, fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out) c *= scale;
  return SpectralField(g, std::move(out));
}

inline Field fft_inverse(const SpectralField& c) {
  const auto& g = c.grid();
  std::vector<cplx> out(g.size());
  fft::transform(c.coeffs(), out, g.n, g.M, fft::Direction::Backward);
  return Field(g, std::move(out));
}

/// Multiplies every coefficient by symbol(xi), xi the frequency vector.
template <class Symbol>
SpectralField apply_multiplier(const SpectralField& c, Symbol&& symbol) {
  const auto& g = c.grid();
  std::vector<cplx> out(c.coeffs().begin(), c.coeffs().end());
  for_each_point(g, [&](std::size_t flat, const Index3& slots) {
    if (out[flat] != cplx{}) out[flat] *= symbol(frequency(g, slots));
  });
  return SpectralField(g, std::move(out));
}

namespace detail {

template <class T, class Op>
std::vector<cplx> zip(std::span<const cplx> a, std::span<const cplx> b, Op op) {
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return out;
}

}  // namespace detail

inline Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  return Field(a.grid(), detail::zip<Field>(a.samples(), b.samples(), std::plus<>{}));
}
inline Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  return Field(a.grid(), detail::zip<Field>(a.samples(), b.samples(), std::minus<>{}));
}
inline Field operator*(cplx lambda, const Field& a) {
  std::vector<cplx> out(a.samples().begin(), a.samples().end());
  for (auto& v : out) v *= lambda;
  return Field(a.grid(), std::move(out));
}
inline SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid());
  return SpectralField(a.grid(), detail::zip<SpectralField>(a.coeffs(), b.coeffs(), std::plus<>{}));
}
inline SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid());
  return SpectralField(a.grid(), detail::zip<SpectralField>(a.coeffs(), b.coeffs(), std::minus<>{}));
}
inline SpectralField operator*(cplx lambda, const SpectralField& a) {
  std::vector<cplx> out(a.coeffs().begin(), a.coeffs().end());
  for (auto& v : out) v *= lambda;
  return SpectralField(a.grid(), std::move(out));
}

/// Scale-safe (sum |v|^p)^(1/p) for p in [1, inf).
inline double lp_sum_root(std::span<const cplx> values, double p) {
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0 || std::isinf(p)) return peak;
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& v : values) acc += std::norm(v / peak);
  } else {
    for (const auto& v : values) acc += std::pow(std::abs(v) / peak, p);
  }
  return peak * std::pow(acc, 1.0 / p);
}

/// Quadrature L^p norm (h^n sum_j |f(x_j)|^p)^(1/p); p = inf gives max_j |f(x_j)|.
inline double lp_norm(const Field& f, double p) {
  require(p >= 1.0, ErrorKind::InvalidArgument, "L^p exponent must satisfy p >= 1");
  const double root = lp_sum_root(f.samples(), p);
  if (std::isinf(p)) return root;
  const double cell = std::pow(f.grid().spacing(), f.grid().n);
  return root * std::pow(cell, 1.0 / p);
}

/// L^2 norm computed from coefficients: (L^n sum |c_m|^2)^(1/2).
inline double l2_norm(const SpectralField& c) {
  const auto& g = c.grid();
  return lp_sum_root(c.coeffs(), 2.0) * std::pow(g.period(), 0.5 * g.n);
}

}  // namespace modspace

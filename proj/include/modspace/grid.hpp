#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <string>

#include "modspace/error.hpp"

namespace modspace {

/// Integer multi-index; only the first `n` components are meaningful.
using Index3 = std::array<int, 3>;

/// Default ceiling on M^n, the number of samples of one field.
inline constexpr std::size_t kDefaultSampleCap = std::size_t{1} << 24;

/// Periodized grid on [0, 2*pi*P)^n with M samples per axis.
///
/// The frequency lattice per axis is {m/P : m in [-M/2, M/2)}. Spectral data
/// is stored in FFT order: storage slot i holds lattice index i for i < M/2
/// and i - M otherwise.
struct GridSpec {
  int n = 1;
  int P = 1;
  int M = 16;

  std::size_t size() const {
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(M);
    return total;
  }
  double period() const { return 2.0 * std::numbers::pi * P; }
  double spacing() const { return period() / M; }
  double freq_step() const { return 1.0 / P; }
  /// Largest |xi| per axis, attained at m = -M/2.
  double max_freq() const { return static_cast<double>(M) / (2.0 * P); }
  /// Largest admissible active-box radius: K_max + 1 <= M/(2P).
  int max_box_radius() const { return M / (2 * P) - 1; }

  int lattice_index(int slot) const { return slot < M / 2 ? slot : slot - M; }
  int storage_slot(int m) const { return m >= 0 ? m : m + M; }
  bool in_band(int m) const { return m >= -M / 2 && m < M / 2; }

  std::size_t flat(const Index3& slots) const {
    std::size_t f = 0;
    for (int d = 0; d < n; ++d) f = f * static_cast<std::size_t>(M) + static_cast<std::size_t>(slots[d]);
    return f;
  }
  Index3 unflat(std::size_t f) const {
    Index3 slots{0, 0, 0};
    for (int d = n - 1; d >= 0; --d) {
      slots[d] = static_cast<int>(f % static_cast<std::size_t>(M));
      f /= static_cast<std::size_t>(M);
    }
    return slots;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec make_grid(int n, int P, int M, std::size_t sample_cap = kDefaultSampleCap) {
  require(n >= 1 && n <= 3, ErrorKind::InvalidArgument,
          "dimension n must be in [1,3], got " + std::to_string(n));
  require(P >= 1, ErrorKind::InvalidArgument, "period multiplier P must be >= 1");
  require(M % 2 == 0, ErrorKind::InvalidArgument,
          "samples per axis M must be even, got " + std::to_string(M));
  require(M >= 8, ErrorKind::InvalidArgument, "samples per axis M must be >= 8");
  double total = std::pow(static_cast<double>(M), n);
  require(total <= static_cast<double>(sample_cap), ErrorKind::InvalidArgument,
          "grid of " + std::to_string(M) + "^" + std::to_string(n) +
              " samples exceeds the memory cap");
  return GridSpec{n, P, M};
}

/// Smallest power of two >= value (and >= 8).
inline int next_pow2(long value) {
  int m = 8;
  while (m < value) m *= 2;
  return m;
}

/// Calls f(flat, slots) for every grid point in row-major order.
template <class F>
void for_each_point(const GridSpec& grid, F&& f) {
  const std::size_t total = grid.size();
  Index3 slots{0, 0, 0};
  for (std::size_t flat = 0; flat < total; ++flat) {
    f(flat, slots);
    for (int d = grid.n - 1; d >= 0; --d) {
      if (++slots[d] < grid.M) break;
      slots[d] = 0;
    }
  }
}

/// Frequency vector of a storage slot triple.
inline std::array<double, 3> frequency(const GridSpec& grid, const Index3& slots) {
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.n; ++d) xi[d] = static_cast<double>(grid.lattice_index(slots[d])) / grid.P;
  return xi;
}

inline double norm2(const std::array<double, 3>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline int sup_norm(const Index3& k, int n) {
  int r = 0;
  for (int d = 0; d < n; ++d) r = std::max(r, std::abs(k[d]));
  return r;
}

/// <k> = sqrt(1 + |k|^2).
inline double japanese_bracket(const Index3& k, int n) {
  double s = 1.0;
  for (int d = 0; d < n; ++d) s += static_cast<double>(k[d]) * k[d];
  return std::sqrt(s);
}

}  // namespace modspace

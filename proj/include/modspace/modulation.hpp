#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "modspace/error.hpp"
#include "modspace/field.hpp"
#include "modspace/grid.hpp"
#include "modspace/window.hpp"

namespace modspace {

/// (s, p, q) of M^s_{p,q}; p and q may be infinite.
struct ModulationParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
};

inline void validate(const ModulationParams& mp) {
  require(mp.p >= 1.0 && mp.q >= 1.0, ErrorKind::InvalidArgument,
          "modulation exponents require p >= 1 and q >= 1");
}

/// Lattice taps of every box phi(. - k), |k|_inf <= K_max, on one grid.
class BoxTable {
 public:
  struct Tap {
    int slot;
    double weight;
  };

  BoxTable(const GridSpec& grid, const Window& window, int k_max)
      : grid_(grid), window_(window), k_max_(k_max) {
    require(k_max >= 0, ErrorKind::InvalidArgument, "K_max must be non-negative");
    require(k_max <= grid.max_box_radius(), ErrorKind::OutOfRange,
            "K_max = " + std::to_string(k_max) + " violates K_max + 1 <= M/(2P) (max " +
                std::to_string(grid.max_box_radius()) + ")");
    taps_.resize(2 * k_max + 1);
    const double r = window.radius();
    for (int k = -k_max; k <= k_max; ++k) {
      auto& list = taps_[k + k_max];
      const int lo = static_cast<int>(std::ceil(grid.P * (k - r)));
      const int hi = static_cast<int>(std::floor(grid.P * (k + r)));
      for (int m = lo; m <= hi; ++m) {
        if (!grid.in_band(m)) continue;
        const double w = window.profile(static_cast<double>(m) / grid.P - k);
        if (w != 0.0) list.push_back({grid.storage_slot(m), w});
      }
    }
  }

  const GridSpec& grid() const { return grid_; }
  const Window& window() const { return window_; }
  int k_max() const { return k_max_; }
  std::span<const Tap> taps(int k) const { return taps_[k + k_max_]; }

  std::size_t box_count() const {
    std::size_t c = 1;
    for (int d = 0; d < grid_.n; ++d) c *= static_cast<std::size_t>(2 * k_max_ + 1);
    return c;
  }

  Index3 box(std::size_t ordinal) const {
    Index3 k{0, 0, 0};
    const auto side = static_cast<std::size_t>(2 * k_max_ + 1);
    for (int d = grid_.n - 1; d >= 0; --d) {
      k[d] = static_cast<int>(ordinal % side) - k_max_;
      ordinal /= side;
    }
    return k;
  }

  std::size_t ordinal(const Index3& k) const {
    std::size_t o = 0;
    const auto side = static_cast<std::size_t>(2 * k_max_ + 1);
    for (int d = 0; d < grid_.n; ++d) o = o * side + static_cast<std::size_t>(k[d] + k_max_);
    return o;
  }

  bool contains(const Index3& k) const { return sup_norm(k, grid_.n) <= k_max_; }

  /// Calls f(flat, phi_k(xi)) for every lattice point in supp phi_k.
  template <class F>
  void for_each_tap(const Index3& k, F&& f) const {
    std::array<std::span<const Tap>, 3> axes;
    for (int d = 0; d < 3; ++d) axes[d] = d < grid_.n ? taps(k[d]) : std::span<const Tap>();
    static constexpr Tap kUnit{0, 1.0};
    const std::span<const Tap> unit(&kUnit, 1);
    for (int d = grid_.n; d < 3; ++d) axes[d] = unit;
    const auto m = static_cast<std::size_t>(grid_.M);
    for (const auto& a : axes[0])
      for (const auto& b : axes[1])
        for (const auto& c : axes[2]) {
          std::size_t flat = static_cast<std::size_t>(a.slot);
          if (grid_.n > 1) flat = flat * m + static_cast<std::size_t>(b.slot);
          if (grid_.n > 2) flat = flat * m + static_cast<std::size_t>(c.slot);
          f(flat, a.weight * b.weight * c.weight);
        }
  }

 private:
  GridSpec grid_;
  Window window_;
  int k_max_;
  std::vector<std::vector<Tap>> taps_;
};

inline void require_box(const BoxTable& table, const Index3& k) {
  require(table.contains(k), ErrorKind::OutOfRange, "box index outside the active range |k| <= K_max");
}

/// Spectral piece phi_k * c.
inline SpectralField box_project(const SpectralField& c, const Index3& k, const BoxTable& table) {
  require_same_grid(c.grid(), table.grid());
  require_box(table, k);
  std::vector<cplx> out(c.size());
  table.for_each_tap(k, [&](std::size_t flat, double w) { out[flat] = w * c[flat]; });
  return SpectralField(c.grid(), std::move(out));
}

/// box_k f = F^{-1} phi(. - k) F f, with the largest admissible active range.
inline Field box_project(const Field& f, const Index3& k, const Window& w) {
  const BoxTable table(f.grid(), w, f.grid().max_box_radius());
  return fft_inverse(box_project(fft_forward(f), k, table));
}

/// Pieces box_k f for every |k|_inf <= K_max, in BoxTable ordinal order.
class Decomposition {
 public:
  Decomposition(GridSpec grid, int k_max, std::vector<Index3> boxes, std::vector<Field> pieces)
      : grid_(grid), k_max_(k_max), boxes_(std::move(boxes)), pieces_(std::move(pieces)) {}

  const GridSpec& grid() const { return grid_; }
  int k_max() const { return k_max_; }
  std::span<const Index3> boxes() const { return boxes_; }
  std::span<const Field> pieces() const { return pieces_; }

  const Field& piece(const Index3& k) const {
    for (std::size_t i = 0; i < boxes_.size(); ++i)
      if (boxes_[i] == k) return pieces_[i];
    throw Error(ErrorKind::OutOfRange, "box index outside the decomposition");
  }

  Field sum() const {
    std::vector<cplx> acc(grid_.size());
    for (const auto& p : pieces_)
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    return Field(grid_, std::move(acc));
  }

 private:
  GridSpec grid_;
  int k_max_;
  std::vector<Index3> boxes_;
  std::vector<Field> pieces_;
};

inline Decomposition decompose(const Field& f, const Window& w, int k_max) {
  const BoxTable table(f.grid(), w, k_max);
  require(static_cast<double>(table.box_count()) * static_cast<double>(f.size()) <=
              static_cast<double>(kDefaultSampleCap) * 4,
          ErrorKind::InvalidArgument, "decomposition would exceed the memory cap");
  const SpectralField c = fft_forward(f);
  std::vector<Index3> boxes;
  std::vector<Field> pieces;
  boxes.reserve(table.box_count());
  pieces.reserve(table.box_count());
  for (std::size_t o = 0; o < table.box_count(); ++o) {
    const Index3 k = table.box(o);
    boxes.push_back(k);
    pieces.push_back(fft_inverse(box_project(c, k, table)));
  }
  return Decomposition(f.grid(), k_max, std::move(boxes), std::move(pieces));
}

/// ||box_k f||_p for every box, indexed by BoxTable ordinal.
///
/// For p = 2 the norms come straight from the coefficients via Parseval;
/// other p synthesize each non-empty piece on the grid.
inline std::vector<double> box_norms(const SpectralField& c, double p, const BoxTable& table) {
  require_same_grid(c.grid(), table.grid());
  require(p >= 1.0, ErrorKind::InvalidArgument, "L^p exponent must satisfy p >= 1");
  const auto& g = c.grid();
  std::vector<double> norms(table.box_count(), 0.0);
  std::vector<cplx> local;
  if (p == 2.0) {
    const double measure = std::pow(g.period(), 0.5 * g.n);
    for (std::size_t o = 0; o < norms.size(); ++o) {
      local.clear();
      table.for_each_tap(table.box(o), [&](std::size_t flat, double w) { local.push_back(w * c[flat]); });
      norms[o] = measure * lp_sum_root(local, 2.0);
    }
    return norms;
  }
  std::vector<cplx> piece(g.size());
  std::vector<cplx> samples(g.size());
  std::vector<std::size_t> touched;
  const double cell = std::pow(g.spacing(), g.n);
  for (std::size_t o = 0; o < norms.size(); ++o) {
    bool any = false;
    touched.clear();
    table.for_each_tap(table.box(o), [&](std::size_t flat, double w) {
      piece[flat] = w * c[flat];
      touched.push_back(flat);
      any = any || piece[flat] != cplx{};
    });
    if (any) {
      fft::transform(piece, samples, g.n, g.M, fft::Direction::Backward);
      const double root = lp_sum_root(samples, p);
      norms[o] = std::isinf(p) ? root : root * std::pow(cell, 1.0 / p);
    }
    for (auto flat : touched) piece[flat] = cplx{};
  }
  return norms;
}

/// (sum_k (w_k b_k)^q)^(1/q); q = inf gives the max.
inline double weighted_lq(std::span<const double> values, std::span<const double> weights, double q) {
  double peak = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) peak = std::max(peak, weights[i] * values[i]);
  if (peak == 0.0 || std::isinf(q)) return peak;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = weights[i] * values[i];
    if (v > 0.0) acc += std::pow(v / peak, q);
  }
  return peak * std::pow(acc, 1.0 / q);
}

/// Combines per-box norms into ||f||_{M^s_{p,q}}; boxes failing `keep` are skipped.
template <class Keep>
double combine_box_norms(std::span<const double> norms, const BoxTable& table, double s, double q, Keep&& keep) {
  std::vector<double> vals;
  std::vector<double> weights;
  vals.reserve(norms.size());
  weights.reserve(norms.size());
  const int n = table.grid().n;
  for (std::size_t o = 0; o < norms.size(); ++o) {
    const Index3 k = table.box(o);
    if (!keep(k) || norms[o] == 0.0) continue;
    vals.push_back(norms[o]);
    weights.push_back(std::pow(japanese_bracket(k, n), s));
  }
  return weighted_lq(vals, weights, q);
}

inline double combine_box_norms(std::span<const double> norms, const BoxTable& table, double s, double q) {
  return combine_box_norms(norms, table, s, q, [](const Index3&) { return true; });
}

/// ||f||_{M^s_{p,q}} = (sum_{|k|_inf <= K_max} <k>^{sq} ||box_k f||_p^q)^{1/q}.
inline double modulation_norm(const SpectralField& c, const ModulationParams& mp, const BoxTable& table) {
  validate(mp);
  const auto norms = box_norms(c, mp.p, table);
  return combine_box_norms(norms, table, mp.s, mp.q);
}

inline double modulation_norm(const SpectralField& c, const ModulationParams& mp, const Window& w, int k_max) {
  return modulation_norm(c, mp, BoxTable(c.grid(), w, k_max));
}

inline double modulation_norm(const Field& f, const ModulationParams& mp, const Window& w, int k_max) {
  return modulation_norm(fft_forward(f), mp, w, k_max);
}

/// L^2 mass of the coefficients where the active boxes do not sum to one.
/// Bounds what the K_max truncation leaves out of the p = 2 norm.
inline double truncation_tail(const SpectralField& c, const BoxTable& table) {
  const auto& g = c.grid();
  std::vector<double> coverage(g.size(), 0.0);
  for (std::size_t o = 0; o < table.box_count(); ++o)
    table.for_each_tap(table.box(o), [&](std::size_t flat, double w) { coverage[flat] += w; });
  std::vector<cplx> missed;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (coverage[i] < 1.0 - 1e-12 && c[i] != cplx{}) missed.push_back(c[i] * (1.0 - coverage[i]));
  return lp_sum_root(missed, 2.0) * std::pow(g.period(), 0.5 * g.n);
}

/// sigma(s, q) = s - n (1 - 1/q).
inline double sigma_index(double s, double q, int n) {
  require(q >= 1.0, ErrorKind::InvalidArgument, "sigma index requires q >= 1");
  return s - n * (1.0 - 1.0 / q);
}

/// Bessel potential J_sigma = (I - Laplacian)^{sigma/2}.
inline SpectralField apply_bessel(const SpectralField& c, double sigma) {
  return apply_multiplier(c, [sigma](const std::array<double, 3>& xi) {
    const double r = norm2(xi);
    return cplx(std::pow(1.0 + r * r, 0.5 * sigma));
  });
}

inline Field apply_bessel(const Field& f, double sigma) {
  if (sigma == 0.0) return f;
  return fft_inverse(apply_bessel(fft_forward(f), sigma));
}

enum class Embedding { Monotone, IndexTrade, Unknown };

inline std::string_view to_string(Embedding e) {
  switch (e) {
    case Embedding::Monotone: return "Embeds-monotone";
    case Embedding::IndexTrade: return "Embeds-index-trade";
    case Embedding::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Sufficient conditions for M^{s1}_{p1,q1} to embed in M^{s2}_{p2,q2}.
///
/// Monotone: s1 >= s2, p1 <= p2, q1 <= q2.
/// IndexTrade: q1 > q2, s1 > s2 and s1 - s2 > n/q2 - n/q1.
inline Embedding embedding_predicate(const ModulationParams& from, const ModulationParams& to, int n) {
  if (from.s >= to.s && from.p <= to.p && from.q <= to.q) return Embedding::Monotone;
  const double gap = n / to.q - n / from.q;
  if (from.q > to.q && from.s > to.s && from.s - to.s > gap) return Embedding::IndexTrade;
  return Embedding::Unknown;
}

/// box_i(box_{i1} u * box_{i2} u) vanishes once |i - i1 - i2|_inf exceeds this.
inline int interaction_radius(const Window& w) {
  return w.kind() == WindowKind::RaisedCosine ? 2 : 1;
}

}  // namespace modspace

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "modspace/error.hpp"
#include "modspace/field.hpp"
#include "modspace/modulation.hpp"
#include "modspace/propagator.hpp"
#include "modspace/quadrature.hpp"

namespace modspace {

// ---------------------------------------------------------------------------
// Dealiased power nonlinearity

/// Padded samples-per-axis for an exact k-th power of any field on an M grid.
///
/// A grid of M' >= (k+1) M / 2 points keeps every alias of the k-fold
/// product out of the retained band [-M/2, M/2).
inline int dealiased_size(int M, int k, double factor) {
  const double minimum = (k + 1) / 2.0;
  if (factor <= 0.0) factor = minimum;
  require(factor >= minimum - 1e-12, ErrorKind::Headroom,
          "dealias factor " + std::to_string(factor) + " is below (k+1)/2 = " + std::to_string(minimum));
  int padded = static_cast<int>(std::ceil(factor * M - 1e-9));
  if (padded % 2 != 0) ++padded;
  return std::max(padded, M);
}

/// Coefficients of u^k on the retained band of u's grid, computed on a
/// zero-padded grid and truncated back.
inline SpectralField pow_dealiased(const SpectralField& c, int k, double factor = 0.0) {
  require(k >= 1, ErrorKind::InvalidArgument, "power must be >= 1");
  if (k == 1) return c;
  const GridSpec& g = c.grid();
  const int padded_m = dealiased_size(g.M, k, factor);
  const GridSpec pg{g.n, g.P, padded_m};
  require(static_cast<double>(pg.size()) <= static_cast<double>(kDefaultSampleCap) * 2,
          ErrorKind::Headroom, "dealiased grid exceeds the memory cap");

  std::vector<std::size_t> map(g.size());
  for_each_point(g, [&](std::size_t flat, const Index3& slots) {
    Index3 ps{0, 0, 0};
    for (int d = 0; d < g.n; ++d) ps[d] = pg.storage_slot(g.lattice_index(slots[d]));
    map[flat] = pg.flat(ps);
  });

  std::vector<cplx> spec(pg.size());
  for (std::size_t i = 0; i < g.size(); ++i) spec[map[i]] = c[i];
  std::vector<cplx> samples(pg.size());
  fft::transform(spec, samples, pg.n, pg.M, fft::Direction::Backward);
  for (auto& v : samples) {
    const cplx base = v;
    for (int j = 1; j < k; ++j) v *= base;
  }
  fft::transform(samples, spec, pg.n, pg.M, fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(pg.size());
  std::vector<cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = spec[map[i]] * scale;
  return SpectralField(g, std::move(out));
}

inline Field pow_dealiased(const Field& u, int k, double factor = 0.0) {
  return fft_inverse(pow_dealiased(fft_forward(u), k, factor));
}

// ---------------------------------------------------------------------------
// Duhamel quadrature

/// Gauss-Legendre approximation of int_0^t U(t - tau) forcing(tau) dtau.
///
/// `forcing` returns either a Field or a SpectralField.
template <class Forcing>
SpectralField duhamel(const PropagatorSpec& spec, Forcing&& forcing, double t, int q) {
  require(q >= 1, ErrorKind::InvalidArgument, "Duhamel quadrature needs Q >= 1");
  check_time(spec, t);
  const GaussRule& rule = gauss_legendre(q);
  std::vector<cplx> acc;
  GridSpec grid{};
  for (int b = 0; b < q; ++b) {
    const double tau = 0.5 * t * (rule.nodes[b] + 1.0);
    const double w = 0.5 * t * rule.weights[b];
    using Result = std::decay_t<decltype(forcing(tau))>;
    SpectralField f = [&] {
      if constexpr (std::is_same_v<Result, Field>) {
        return fft_forward(forcing(tau));
      } else {
        return SpectralField(forcing(tau));
      }
    }();
    if (acc.empty()) {
      grid = f.grid();
      acc.assign(grid.size(), cplx{});
    }
    require_same_grid(grid, f.grid());
    for_each_point(grid, [&](std::size_t flat, const Index3& slots) {
      if (f[flat] == cplx{}) return;
      acc[flat] += w * spec.multiplier(norm2(frequency(grid, slots)), t - tau) * f[flat];
    });
  }
  return SpectralField(grid, std::move(acc));
}

// ---------------------------------------------------------------------------
// Nonlinear Cauchy problem u = U(t) u0 + int_0^t U(t - tau) u^k dtau

enum class SolverMode { PicardGlobal, EtdStep };

inline std::string_view to_string(SolverMode m) {
  return m == SolverMode::PicardGlobal ? "picard-global" : "etd-step";
}

inline SolverMode parse_solver_mode(std::string_view name) {
  if (name == "picard-global") return SolverMode::PicardGlobal;
  if (name == "etd-step") return SolverMode::EtdStep;
  throw Error(ErrorKind::InvalidArgument, "unknown solver mode '" + std::string(name) + "'");
}

struct EvolveConfig {
  int power_k = 2;
  double T = 1.0;
  int time_nodes = 9;             // trajectory samples, t_0 = 0 ... t_last = T
  int quad_nodes = 16;            // Gauss-Legendre nodes per interval
  double picard_tol = 1e-10;
  int picard_max_iter = 60;
  double dealias_factor = 0.0;    // <= 0 selects (k+1)/2
  SolverMode mode = SolverMode::PicardGlobal;
  int etd_order = 2;
  int etd_substeps = 64;          // ETD steps per trajectory interval
  bool linear = false;            // drop the nonlinearity
  ModulationParams metric{0.0, 2.0, 2.0};
  WindowKind window = WindowKind::RaisedCosine;
  int k_max = -1;                 // < 0 selects the largest admissible radius
  double blowup_factor = 1e6;
};

inline void validate(const EvolveConfig& cfg) {
  require(cfg.power_k >= 2, ErrorKind::InvalidArgument, "power_k must be >= 2");
  require(cfg.T > 0.0 && std::isfinite(cfg.T), ErrorKind::InvalidArgument, "horizon T must be > 0");
  require(cfg.time_nodes >= 2, ErrorKind::InvalidArgument, "time_nodes must be >= 2");
  require(cfg.quad_nodes >= 4, ErrorKind::InvalidArgument, "quad_nodes must be >= 4");
  require(cfg.picard_tol > 0.0, ErrorKind::InvalidArgument, "picard_tol must be > 0");
  require(cfg.picard_max_iter >= 1, ErrorKind::InvalidArgument, "picard_max_iter must be >= 1");
  require(cfg.etd_order == 1 || cfg.etd_order == 2, ErrorKind::InvalidArgument, "etd_order must be 1 or 2");
  require(cfg.etd_substeps >= 1, ErrorKind::InvalidArgument, "etd_substeps must be >= 1");
  require(cfg.blowup_factor > 1.0, ErrorKind::InvalidArgument, "blowup_factor must be > 1");
  validate(cfg.metric);
  dealiased_size(16, cfg.power_k, cfg.dealias_factor);
}

/// Piece of dense output: states at increasing times, interpolated by the
/// Lagrange polynomial through all of them.
struct Segment {
  std::vector<double> times;
  std::vector<SpectralField> states;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<Segment> segments;
  std::vector<double> iterate_differences;  // d_m = sup ||u^(m) - u^(m-1)||, m >= 1
  std::vector<double> contraction_ratios;   // d_{m+1} / d_m
  int iterations = 0;
  bool converged = false;
  bool blew_up = false;
  std::string diagnostic;

  /// max_m d_{m+1} / d_m; zero when fewer than two differences exist.
  double contraction_factor() const {
    double r = 0.0;
    for (double v : contraction_ratios) r = std::max(r, v);
    return r;
  }

  /// Dense state at tau in [0, times.back()].
  SpectralField spectral_at(double tau) const {
    require(!segments.empty(), ErrorKind::InvalidArgument, "trajectory has no dense output");
    const Segment* seg = &segments.back();
    for (const auto& s : segments)
      if (tau <= s.times.back()) {
        seg = &s;
        break;
      }
    const auto l = lagrange_basis(seg->times, tau);
    const GridSpec& g = seg->states.front().grid();
    std::vector<cplx> out(g.size());
    for (std::size_t c = 0; c < l.size(); ++c) {
      if (l[c] == 0.0) continue;
      const auto& st = seg->states[c];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += l[c] * st[i];
    }
    return SpectralField(g, std::move(out));
  }
};

namespace detail {

using Coeffs = std::vector<cplx>;

/// Per-mode generator values p(|xi|) of a semigroup.
inline std::vector<cplx> generator_table(const GridSpec& g, const PropagatorSpec& spec) {
  require(spec.has_generator(), ErrorKind::InvalidArgument,
          "the nonlinear solver needs a semigroup propagator (fractional-heat or schrodinger)");
  std::vector<cplx> gen(g.size());
  for_each_point(g, [&](std::size_t flat, const Index3& slots) {
    gen[flat] = spec.generator(norm2(frequency(g, slots)));
  });
  return gen;
}

inline Coeffs semigroup(const Coeffs& c, const std::vector<cplx>& gen, double t) {
  Coeffs out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != cplx{}) out[i] = std::exp(t * gen[i]) * c[i];
  return out;
}

class Nonlinearity {
 public:
  Nonlinearity(const GridSpec& g, const EvolveConfig& cfg) : grid_(g), cfg_(cfg) {}

  Coeffs operator()(const Coeffs& c) const {
    if (cfg_.linear) return Coeffs(c.size());
    const SpectralField p = pow_dealiased(SpectralField(grid_, c), cfg_.power_k, cfg_.dealias_factor);
    return Coeffs(p.coeffs().begin(), p.coeffs().end());
  }

 private:
  GridSpec grid_;
  EvolveConfig cfg_;
};

class Metric {
 public:
  Metric(const GridSpec& g, const EvolveConfig& cfg)
      : grid_(g), mp_(cfg.metric), table_(g, make_window(cfg.window), cfg.k_max < 0 ? g.max_box_radius() : cfg.k_max) {}

  double operator()(const Coeffs& c) const { return modulation_norm(SpectralField(grid_, c), mp_, table_); }
  double operator()(const SpectralField& c) const { return modulation_norm(c, mp_, table_); }

 private:
  GridSpec grid_;
  ModulationParams mp_;
  BoxTable table_;
};

inline Coeffs diff(const Coeffs& a, const Coeffs& b) {
  Coeffs out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// Collocation state of the whole-interval Picard map: Gauss nodes inside
/// every trajectory interval plus the interval endpoints.
struct PicardState {
  std::vector<std::vector<Coeffs>> nodes;  // [interval][node]
  std::vector<Coeffs> ends;                // [time index]
};

class PicardMap {
 public:
  PicardMap(const SpectralField& u0, const PropagatorSpec& spec, const EvolveConfig& cfg)
      : grid_(u0.grid()),
        u0_(u0.coeffs().begin(), u0.coeffs().end()),
        gen_(generator_table(grid_, spec)),
        rule_(gauss_legendre(cfg.quad_nodes)),
        q_(cfg.quad_nodes),
        intervals_(cfg.time_nodes - 1),
        dt_(cfg.T / (cfg.time_nodes - 1)),
        nonlinear_(grid_, cfg) {
    theta_.resize(q_);
    for (int b = 0; b < q_; ++b) theta_[b] = 0.5 * (rule_.nodes[b] + 1.0);
    // Partial integrals from the interval start to node a use the same rule
    // on [0, theta_a]; the nonlinearity there comes from interpolation.
    basis_.assign(q_, std::vector<std::vector<double>>(q_));
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b) basis_[a][b] = lagrange_basis(theta_, theta_[a] * theta_[b]);
  }

  double time(int interval, int node) const { return (interval + theta_[node]) * dt_; }
  double end_time(int j) const { return j * dt_; }
  int intervals() const { return intervals_; }
  int nodes() const { return q_; }
  std::span<const double> theta() const { return theta_; }
  const GridSpec& grid() const { return grid_; }

  PicardState free_evolution() const {
    PicardState st;
    st.nodes.resize(intervals_);
    for (int j = 0; j < intervals_; ++j)
      for (int a = 0; a < q_; ++a) st.nodes[j].push_back(semigroup(u0_, gen_, time(j, a)));
    for (int j = 0; j <= intervals_; ++j) st.ends.push_back(semigroup(u0_, gen_, end_time(j)));
    return st;
  }

  PicardState apply(const PicardState& u) const {
    const std::size_t modes = u0_.size();
    PicardState out = free_evolution();
    Coeffs acc(modes);  // int_0^{t_j} U(t_j - s) N(s) ds
    std::vector<Coeffs> forcing(q_);
    std::vector<Coeffs> interp(q_);
    for (int j = 0; j < intervals_; ++j) {
      for (int b = 0; b < q_; ++b) forcing[b] = nonlinear_(u.nodes[j][b]);
      for (int a = 0; a < q_; ++a) {
        const double ta = theta_[a] * dt_;
        Coeffs& target = out.nodes[j][a];
        for (int b = 0; b < q_; ++b) {
          interp[b].assign(modes, cplx{});
          for (int c = 0; c < q_; ++c) {
            const double l = basis_[a][b][c];
            if (l == 0.0) continue;
            for (std::size_t i = 0; i < modes; ++i) interp[b][i] += l * forcing[c][i];
          }
        }
        for (std::size_t i = 0; i < modes; ++i) {
          cplx v = std::exp(ta * gen_[i]) * acc[i];
          for (int b = 0; b < q_; ++b) {
            if (interp[b][i] == cplx{}) continue;
            const double w = 0.5 * ta * rule_.weights[b];
            v += w * std::exp(ta * (1.0 - theta_[b]) * gen_[i]) * interp[b][i];
          }
          target[i] += v;
        }
      }
      for (std::size_t i = 0; i < modes; ++i) {
        cplx v = std::exp(dt_ * gen_[i]) * acc[i];
        for (int b = 0; b < q_; ++b) {
          if (forcing[b][i] == cplx{}) continue;
          const double w = 0.5 * dt_ * rule_.weights[b];
          v += w * std::exp(dt_ * (1.0 - theta_[b]) * gen_[i]) * forcing[b][i];
        }
        acc[i] = v;
        out.ends[j + 1][i] += v;
      }
    }
    return out;
  }

 private:
  GridSpec grid_;
  Coeffs u0_;
  std::vector<cplx> gen_;
  const GaussRule& rule_;
  int q_;
  int intervals_;
  double dt_;
  Nonlinearity nonlinear_;
  std::vector<double> theta_;
  std::vector<std::vector<std::vector<double>>> basis_;
};

inline double sup_difference(const PicardState& a, const PicardState& b, const Metric& metric) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.nodes.size(); ++j)
    for (std::size_t c = 0; c < a.nodes[j].size(); ++c)
      d = std::max(d, metric(diff(a.nodes[j][c], b.nodes[j][c])));
  for (std::size_t j = 0; j < a.ends.size(); ++j) d = std::max(d, metric(diff(a.ends[j], b.ends[j])));
  return d;
}

inline Trajectory to_trajectory(const PicardMap& map, const PicardState& st) {
  Trajectory traj;
  const GridSpec& g = map.grid();
  for (int j = 0; j <= map.intervals(); ++j) {
    traj.times.push_back(map.end_time(j));
    traj.states.push_back(fft_inverse(SpectralField(g, st.ends[j])));
  }
  for (int j = 0; j < map.intervals(); ++j) {
    Segment seg;
    seg.times.push_back(map.end_time(j));
    seg.states.emplace_back(g, st.ends[j]);
    for (int a = 0; a < map.nodes(); ++a) {
      seg.times.push_back(map.time(j, a));
      seg.states.emplace_back(g, st.nodes[j][a]);
    }
    seg.times.push_back(map.end_time(j + 1));
    seg.states.emplace_back(g, st.ends[j + 1]);
    traj.segments.push_back(std::move(seg));
  }
  return traj;
}

inline double initial_size(const Metric& metric, const SpectralField& u0) { return metric(u0); }

}  // namespace detail

/// Runs exactly `iterations` steps of u^(m+1) = Phi(u^(m)) from u^(0)(t) = U(t) u0.
///
/// Differences and ratios are recorded; convergence is not required.
inline Trajectory picard_iterate(const Field& u0, const PropagatorSpec& spec, const EvolveConfig& cfg,
                                 int iterations) {
  validate(cfg);
  const SpectralField c0 = fft_forward(u0);
  const detail::PicardMap map(c0, spec, cfg);
  const detail::Metric metric(u0.grid(), cfg);
  detail::PicardState current = map.free_evolution();
  std::vector<double> diffs;
  for (int m = 0; m < iterations; ++m) {
    detail::PicardState next = map.apply(current);
    diffs.push_back(detail::sup_difference(next, current, metric));
    current = std::move(next);
  }
  Trajectory traj = detail::to_trajectory(map, current);
  traj.iterations = iterations;
  traj.iterate_differences = diffs;
  for (std::size_t m = 1; m < diffs.size(); ++m)
    if (diffs[m - 1] > 0.0) traj.contraction_ratios.push_back(diffs[m] / diffs[m - 1]);
  return traj;
}

/// Whole-interval Picard iteration of the Duhamel map until
/// sup over collocation nodes of ||u^(m+1) - u^(m)||_{M^s_{p,q}} <= picard_tol.
///
/// Throws NonConvergence when picard_max_iter is exhausted or the iterates
/// grow past blowup_factor times the data, the regime where the map fails
/// to contract on [0, T].
inline Trajectory picard_solve(const Field& u0, const PropagatorSpec& spec, const EvolveConfig& cfg) {
  validate(cfg);
  const SpectralField c0 = fft_forward(u0);
  const detail::PicardMap map(c0, spec, cfg);
  const detail::Metric metric(u0.grid(), cfg);
  const double size0 = detail::initial_size(metric, c0);
  detail::PicardState current = map.free_evolution();
  std::vector<double> diffs;
  for (int m = 0; m < cfg.picard_max_iter; ++m) {
    detail::PicardState next = map.apply(current);
    const double d = detail::sup_difference(next, current, metric);
    diffs.push_back(d);
    current = std::move(next);
    if (!std::isfinite(d) || (size0 > 0.0 && d > cfg.blowup_factor * size0)) {
      throw Error(ErrorKind::NonConvergence,
                  "Picard iterates diverge after " + std::to_string(m + 1) +
                      " iterations; T too large or data too big for contraction");
    }
    if (d <= cfg.picard_tol) {
      Trajectory traj = detail::to_trajectory(map, current);
      traj.iterations = m + 1;
      traj.converged = true;
      traj.iterate_differences = diffs;
      for (std::size_t i = 1; i < diffs.size(); ++i)
        if (diffs[i - 1] > 0.0) traj.contraction_ratios.push_back(diffs[i] / diffs[i - 1]);
      return traj;
    }
  }
  throw Error(ErrorKind::NonConvergence,
              "Picard iteration did not reach tolerance within " + std::to_string(cfg.picard_max_iter) +
                  " iterations (last difference " + std::to_string(diffs.back()) + ")");
}

namespace detail {

/// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2.
inline std::pair<cplx, cplx> phi12(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx p1{0.0, 0.0};
    cplx p2{0.0, 0.0};
    cplx term{1.0, 0.0};  // z^j / j!
    for (int j = 0; j < 24; ++j) {
      p1 += term / static_cast<double>(j + 1);
      p2 += term / (static_cast<double>(j + 1) * (j + 2));
      term *= z / static_cast<double>(j + 1);
    }
    return {p1, p2};
  }
  const cplx e = std::exp(z);
  return {(e - 1.0) / z, (e - 1.0 - z) / (z * z)};
}

}  // namespace detail

/// Exponential time differencing: ETD1 (exponential Euler) or ETD2RK.
///
/// The linear part is integrated exactly per mode. When the metric norm
/// exceeds blowup_factor * ||u0|| the run stops early with `blew_up` set.
inline Trajectory etd_solve(const Field& u0, const PropagatorSpec& spec, const EvolveConfig& cfg) {
  validate(cfg);
  using detail::Coeffs;
  const GridSpec& g = u0.grid();
  const SpectralField c0 = fft_forward(u0);
  const auto gen = detail::generator_table(g, spec);
  const detail::Nonlinearity nonlinear(g, cfg);
  const detail::Metric metric(g, cfg);
  const double size0 = metric(c0);
  const int intervals = cfg.time_nodes - 1;
  const double dt = cfg.T / intervals;
  const double h = dt / cfg.etd_substeps;

  const std::size_t modes = g.size();
  std::vector<cplx> ex(modes), p1(modes), p2(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    ex[i] = std::exp(h * gen[i]);
    const auto [a, b] = detail::phi12(h * gen[i]);
    p1[i] = h * a;
    p2[i] = h * b;
  }

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  Coeffs u(c0.coeffs().begin(), c0.coeffs().end());

  for (int j = 0; j < intervals && !traj.blew_up; ++j) {
    // Chunks of up to three steps give cubic dense output.
    Segment seg;
    seg.times.push_back(j * dt);
    seg.states.emplace_back(g, u);
    for (int step = 0; step < cfg.etd_substeps; ++step) {
      const Coeffs nu = nonlinear(u);
      Coeffs next(modes);
      for (std::size_t i = 0; i < modes; ++i) next[i] = ex[i] * u[i] + p1[i] * nu[i];
      if (cfg.etd_order == 2) {
        const Coeffs na = nonlinear(next);
        for (std::size_t i = 0; i < modes; ++i) next[i] += p2[i] * (na[i] - nu[i]);
      }
      u = std::move(next);
      const double t_now = j * dt + (step + 1) * h;
      seg.times.push_back(step + 1 == cfg.etd_substeps ? (j + 1) * dt : t_now);
      seg.states.emplace_back(g, u);
      const double size = metric(u);
      if (!std::isfinite(size) || (size0 > 0.0 && size > cfg.blowup_factor * size0)) {
        traj.blew_up = true;
        traj.diagnostic = "blow-up detected at t=" + std::to_string(t_now) + ": norm " +
                          std::to_string(size) + " exceeds " + std::to_string(cfg.blowup_factor) +
                          " x initial norm";
        traj.segments.push_back(std::move(seg));
        break;
      }
      if (seg.times.size() == 4 || step + 1 == cfg.etd_substeps) {
        traj.segments.push_back(seg);
        Segment fresh;
        fresh.times.push_back(seg.times.back());
        fresh.states.push_back(seg.states.back());
        seg = std::move(fresh);
      }
    }
    if (!traj.blew_up) {
      traj.times.push_back((j + 1) * dt);
      traj.states.push_back(fft_inverse(SpectralField(g, u)));
    }
  }
  traj.converged = !traj.blew_up;
  traj.iterations = 0;
  return traj;
}

inline Trajectory evolve(const Field& u0, const PropagatorSpec& spec, const EvolveConfig& cfg) {
  return cfg.mode == SolverMode::PicardGlobal ? picard_solve(u0, spec, cfg) : etd_solve(u0, spec, cfg);
}

/// sup_j ||u(t_j) - U(t_j) u(0) - int_0^{t_j} U(t_j - tau) u(tau)^k dtau||_{M^s_{p,q}},
/// with 2Q Gauss nodes per dense-output segment.
inline double duhamel_residual(const Trajectory& traj, const PropagatorSpec& spec, const EvolveConfig& cfg) {
  validate(cfg);
  require(!traj.states.empty() && !traj.segments.empty(), ErrorKind::InvalidArgument,
          "trajectory is empty");
  const GridSpec& g = traj.states.front().grid();
  const SpectralField c0 = fft_forward(traj.states.front());
  const detail::Metric metric(g, cfg);
  const auto gen = detail::generator_table(g, spec);
  const detail::Nonlinearity nonlinear(g, cfg);
  const GaussRule& rule = gauss_legendre(2 * cfg.quad_nodes);
  const std::size_t modes = g.size();

  // Cache N(u(tau)) at every segment's quadrature nodes.
  struct Sample {
    double tau;
    double weight;
    detail::Coeffs forcing;
  };
  std::vector<Sample> samples;
  for (const auto& seg : traj.segments) {
    const double a = seg.times.front();
    const double b = seg.times.back();
    if (b <= a) continue;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double tau = a + 0.5 * (b - a) * (rule.nodes[i] + 1.0);
      const SpectralField u = traj.spectral_at(tau);
      samples.push_back({tau, 0.5 * (b - a) * rule.weights[i],
                         nonlinear(detail::Coeffs(u.coeffs().begin(), u.coeffs().end()))});
    }
  }

  double worst = 0.0;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double t = traj.times[j];
    detail::Coeffs r = detail::semigroup(detail::Coeffs(c0.coeffs().begin(), c0.coeffs().end()), gen, t);
    for (const auto& s : samples) {
      if (s.tau >= t) continue;
      for (std::size_t i = 0; i < modes; ++i)
        if (s.forcing[i] != cplx{}) r[i] += s.weight * std::exp((t - s.tau) * gen[i]) * s.forcing[i];
    }
    const SpectralField uj = fft_forward(traj.states[j]);
    for (std::size_t i = 0; i < modes; ++i) r[i] = uj[i] - r[i];
    worst = std::max(worst, metric(r));
  }
  return worst;
}

}  // namespace modspace

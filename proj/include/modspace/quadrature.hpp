#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "modspace/error.hpp"

namespace modspace {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int q) {
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on P_q.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= q; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= q; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached q-point Gauss-Legendre rule, nodes ascending.
inline const GaussRule& gauss_legendre(int q) {
  require(q >= 1, ErrorKind::InvalidArgument, "quadrature needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, detail::compute_gauss_legendre(q)).first;
  return it->second;
}

/// Lagrange basis values l_c(x) for distinct nodes, via the barycentric form.
inline std::vector<double> lagrange_basis(std::span<const double> nodes, double x) {
  const std::size_t m = nodes.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    if (x == nodes[c]) {
      out[c] = 1.0;
      return out;
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    double w = 1.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != c) w /= (nodes[c] - nodes[j]);
    out[c] = w / (x - nodes[c]);
    total += out[c];
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace modspace

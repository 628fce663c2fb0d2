#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "modspace/error.hpp"
#include "modspace/grid.hpp"

namespace modspace {

enum class WindowKind { RaisedCosine, Sharp };

inline std::string_view to_string(WindowKind kind) {
  return kind == WindowKind::RaisedCosine ? "raised-cosine" : "sharp";
}

inline WindowKind parse_window_kind(std::string_view name) {
  if (name == "raised-cosine") return WindowKind::RaisedCosine;
  if (name == "sharp") return WindowKind::Sharp;
  throw Error(ErrorKind::InvalidArgument, "unknown window kind '" + std::string(name) + "'");
}

/// Tensor-product window phi(xi) = prod_i g(xi_i) whose integer translates
/// sum to one.
///
/// raised-cosine: g(t) = S(1 - |t|) on [-1, 1] with S(x) = (1 - cos(pi x)) / 2,
///   so g(t) + g(t - 1) = 1 on [0, 1].
/// sharp: g = indicator of [-1/2, 1/2); ties go to the box on the right.
class Window {
 public:
  explicit Window(WindowKind kind = WindowKind::RaisedCosine) : kind_(kind) {}

  WindowKind kind() const { return kind_; }

  /// Half-width of supp g.
  double radius() const { return kind_ == WindowKind::RaisedCosine ? 1.0 : 0.5; }

  double profile(double t) const {
    if (kind_ == WindowKind::Sharp) return (t >= -0.5 && t < 0.5) ? 1.0 : 0.0;
    const double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * (1.0 - a)));
  }

  /// phi(xi - k) for a point xi in R^n.
  double operator()(const std::array<double, 3>& xi, const Index3& k, int n) const {
    double v = 1.0;
    for (int d = 0; d < n && v != 0.0; ++d) v *= profile(xi[d] - k[d]);
    return v;
  }

 private:
  WindowKind kind_;
};

inline Window make_window(WindowKind kind) { return Window(kind); }

}  // namespace modspace

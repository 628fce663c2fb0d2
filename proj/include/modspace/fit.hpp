#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "modspace/error.hpp"

namespace modspace {

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

/// Least-squares line y = intercept + slope * x, optionally on (log x, log y).
/// std_error is the usual residual-based standard error of the slope.
inline SlopeFit fit_slope(std::span<const std::pair<double, double>> points, bool log_log = true) {
  require(points.size() >= 3, ErrorKind::InvalidArgument, "slope fit needs at least 3 points");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [x, y] : points) {
    if (log_log) {
      require(x > 0.0 && y > 0.0, ErrorKind::InvalidArgument, "log-log fit needs positive values");
      xs.push_back(std::log(x));
      ys.push_back(std::log(y));
    } else {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  const double count = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require(sxx > 1e-300, ErrorKind::InvalidArgument, "slope fit abscissae are degenerate");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += r * r;
  }
  fit.std_error = std::sqrt(ssr / (count - 2.0) / sxx);
  return fit;
}

}  // namespace modspace

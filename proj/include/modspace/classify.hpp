#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "modspace/error.hpp"
#include "modspace/modulation.hpp"

namespace modspace {

enum class Equation { FractionalHeat, Schrodinger, KleinGordon, HeatIwabuchi };

inline std::string_view to_string(Equation e) {
  switch (e) {
    case Equation::FractionalHeat: return "fractional-heat";
    case Equation::Schrodinger: return "schrodinger";
    case Equation::KleinGordon: return "klein-gordon";
    case Equation::HeatIwabuchi: return "heat-iwabuchi";
  }
  return "unknown";
}

inline Equation parse_equation(std::string_view name) {
  if (name == "fractional-heat" || name == "heat") return Equation::FractionalHeat;
  if (name == "schrodinger") return Equation::Schrodinger;
  if (name == "klein-gordon") return Equation::KleinGordon;
  if (name == "heat-iwabuchi") return Equation::HeatIwabuchi;
  throw Error(ErrorKind::InvalidArgument, "unknown equation '" + std::string(name) + "'");
}

enum class Status { WellPosed, IllPosed, Gap };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::WellPosed: return "WellPosed";
    case Status::IllPosed: return "IllPosed";
    case Status::Gap: return "Gap";
  }
  return "Gap";
}

/// Outcome of the critical-exponent rules for u^k nonlinearities.
struct Verdict {
  Status status = Status::Gap;
  std::string theorem;     // governing result, e.g. "Theorem 2"
  double sigma = 0.0;      // sigma(s, q)
  double threshold = 0.0;  // threshold the deciding inequality compares against
  bool overlap = false;    // both the well- and ill-posed conditions hold
  std::string detail;      // threshold arithmetic, human readable
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

/// Classifies (equation, n, k, s, q) into WellPosed / IllPosed / Gap.
///
/// Each equation has a sufficient condition for local well-posedness and
/// one for ill-posedness; anything else, equality on a strict inequality
/// included, is a Gap. heat-iwabuchi has conditions that can hold at once;
/// that overlap is reported as Gap with `overlap` set.
inline Verdict classify(Equation eq, int n, int k, double s, double q, double alpha = 1.0) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
  require(k >= 2, ErrorKind::InvalidArgument, "power k must be an integer >= 2");
  require(q >= 1.0 && std::isfinite(q), ErrorKind::InvalidArgument, "q must lie in [1, inf)");
  require(std::isfinite(s), ErrorKind::InvalidArgument, "s must be finite");
  if (eq == Equation::FractionalHeat)
    require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgument, "alpha must be > 0");

  Verdict v;
  v.sigma = sigma_index(s, q, n);
  const double sig = v.sigma;
  const double km1 = k - 1.0;
  const std::string sig_txt = "sigma=" + detail::fmt2(sig);

  switch (eq) {
    case Equation::FractionalHeat: {
      const double thr = -alpha / km1;
      v.threshold = thr;
      const bool well = s >= 0.0 && sig > thr;
      const bool ill = sig < thr || s < thr;
      if (well) {
        v.status = Status::WellPosed;
        v.theorem = "Theorem 2";
        v.detail = sig_txt + " > " + detail::fmt2(thr);
      } else if (ill) {
        v.status = Status::IllPosed;
        v.theorem = "Theorem 3";
        v.detail = sig < thr ? sig_txt + " < " + detail::fmt2(thr)
                             : "s=" + detail::fmt2(s) + " < " + detail::fmt2(thr);
      } else {
        v.status = Status::Gap;
        v.theorem = "Theorems 2-3";
        v.detail = sig_txt + ", s=" + detail::fmt2(s) + " outside both regions (threshold " +
                   detail::fmt2(thr) + ")";
      }
      break;
    }
    case Equation::Schrodinger: {
      const double thr = -2.0 / km1;
      v.threshold = thr;
      v.theorem = "Corollary 1";
      const bool well = (s > 0.0 && sig > 0.0) || (s == 0.0 && sig >= 0.0);
      const bool ill = sig < thr || s < thr;
      if (well) {
        v.status = Status::WellPosed;
        v.threshold = 0.0;
        v.detail = sig_txt + (s > 0.0 ? " > 0.00, s > 0" : " >= 0.00, s = 0");
      } else if (ill) {
        v.status = Status::IllPosed;
        v.detail = sig < thr ? sig_txt + " < " + detail::fmt2(thr)
                             : "s=" + detail::fmt2(s) + " < " + detail::fmt2(thr);
      } else {
        v.status = Status::Gap;
        v.detail = "interval [" + detail::fmt2(thr) + ", 0.00], " + sig_txt;
      }
      break;
    }
    case Equation::KleinGordon: {
      const double well_thr = -1.0 / km1;
      const double ill_thr = -2.0 / km1;
      v.theorem = "Corollary 2";
      const bool well = s >= 0.0 && sig > well_thr;
      const bool ill = sig < ill_thr || s < ill_thr;
      if (well) {
        v.status = Status::WellPosed;
        v.threshold = well_thr;
        v.detail = sig_txt + " > " + detail::fmt2(well_thr);
      } else if (ill) {
        v.status = Status::IllPosed;
        v.threshold = ill_thr;
        v.detail = sig < ill_thr ? sig_txt + " < " + detail::fmt2(ill_thr)
                                 : "s=" + detail::fmt2(s) + " < " + detail::fmt2(ill_thr);
      } else {
        v.status = Status::Gap;
        v.threshold = ill_thr;
        v.detail = "interval [" + detail::fmt2(ill_thr) + ", " + detail::fmt2(well_thr) + "], " + sig_txt;
      }
      break;
    }
    case Equation::HeatIwabuchi: {
      const double well_thr = -2.0 / km1;
      const double s_thr = -2.0 / k;
      const double sig_thr = -(n + 2.0) / k;
      v.theorem = "Theorem A";
      const bool well = sig > well_thr;
      const bool ill = s < s_thr || sig < sig_thr;
      if (well && ill) {
        v.status = Status::Gap;
        v.overlap = true;
        v.threshold = well_thr;
        v.detail = "overlap: " + sig_txt + " > " + detail::fmt2(well_thr) + " and " +
                   (s < s_thr ? "s=" + detail::fmt2(s) + " < " + detail::fmt2(s_thr)
                              : sig_txt + " < " + detail::fmt2(sig_thr));
      } else if (well) {
        v.status = Status::WellPosed;
        v.threshold = well_thr;
        v.detail = sig_txt + " > " + detail::fmt2(well_thr);
      } else if (ill) {
        v.status = Status::IllPosed;
        v.threshold = s < s_thr ? s_thr : sig_thr;
        v.detail = s < s_thr ? "s=" + detail::fmt2(s) + " < " + detail::fmt2(s_thr)
                             : sig_txt + " < " + detail::fmt2(sig_thr);
      } else {
        v.status = Status::Gap;
        v.threshold = well_thr;
        v.detail = sig_txt + " outside both regions";
      }
      break;
    }
  }
  return v;
}

/// "WellPosed (Theorem 2: sigma=-0.30 > -1.00)"
inline std::string verdict_line(const Verdict& v) {
  return std::string(to_string(v.status)) + " (" + v.theorem + ": " + v.detail + ")";
}

}  // namespace modspace

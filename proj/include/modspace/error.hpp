#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modspace {

enum class ErrorKind {
  InvalidArgument,
  GridMismatch,
  OutOfRange,
  Headroom,
  NonConvergence,
  Io,
  Format,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::Headroom: return "insufficient-headroom";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

/// Library-wide exception; `kind()` is stable and machine readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace modspace

#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>

#include "modspace/error.hpp"

namespace modspace::fft {

using cplx = std::complex<double>;

enum class Direction { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

namespace detail {

// Plans are created once per shape under a lock and executed through the
// new-array interface, which FFTW documents as thread-safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int rank, int m, Direction dir) {
    const auto key = std::make_tuple(rank, m, static_cast<int>(dir));
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::array<int, 3> dims{m, m, m};
    std::size_t total = 1;
    for (int d = 0; d < rank; ++d) total *= static_cast<std::size_t>(m);
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(rank, dims.data(), in, out, static_cast<int>(dir),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    require(plan != nullptr, ErrorKind::InvalidArgument, "FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized multi-dimensional DFT of a cubic M^rank array, out of place.
inline void transform(std::span<const cplx> in, std::span<cplx> out, int rank, int m, Direction dir) {
  require(in.size() == out.size(), ErrorKind::InvalidArgument, "fft buffer size mismatch");
  require(in.data() != out.data(), ErrorKind::InvalidArgument, "fft must run out of place");
  fftw_plan plan = detail::PlanCache::instance().get(rank, m, dir);
  // FFTW never writes to `in` for out-of-place complex transforms.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace modspace::fft

#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "dispersmooth/types.hpp"

namespace dispersmooth::fft {

enum class Direction { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct PlanKey {
  std::vector<int> dims;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW's planner is not re-entrant; execution through fftw_execute_dft is.
inline fftw_plan cached_plan(const std::vector<int>& dims, int sign) {
  static std::map<PlanKey, PlanHandle> cache;
  std::lock_guard lock(planner_mutex());
  PlanKey key{dims, sign};
  if (auto it = cache.find(key); it != cache.end()) return it->second.get();
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  std::vector<Complex> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw Error(ErrorKind::InvalidArgument, "fftw planning failed");
  cache.emplace(std::move(key), PlanHandle(p));
  return p;
}

}  // namespace detail

/// Unnormalized in-place n-dimensional DFT over a row-major array with the
/// given extents (axis 0 slowest). Backward uses the e^{+i} kernel.
inline void transform(std::span<Complex> data, const std::vector<int>& dims, Direction dir) {
  fftw_plan p = detail::cached_plan(dims, static_cast<int>(dir));
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
}

}  // namespace dispersmooth::fft

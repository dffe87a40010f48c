#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "padmm/field.hpp"

namespace padmm {

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan is. Plans are
// created once per (width, height, direction) and reused for in-place
// transforms of arbitrary (unaligned) buffers.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan plan(std::size_t width, std::size_t height, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(width, height, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();
    auto* scratch = fftw_alloc_complex(width * height);
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), scratch,
                                   scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, PlanHandle(p));
    return p;
  }

 private:
  struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
  };
  using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, PlanHandle> plans_;
};

inline ComplexField unitary_transform(ComplexField img, int sign) {
  if (img.empty()) throw ShapeError("dft2: empty field");
  fftw_plan p = FftPlanCache::instance().plan(img.width(), img.height(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(img.samples().data());
  fftw_execute_dft(p, buf, buf);
  img *= 1.0 / std::sqrt(static_cast<double>(img.size()));
  return img;
}

}  // namespace detail

/// Unitary 2D DFT, index (0, 0) holds the DC bin.
inline ComplexField dft2(ComplexField img) {
  return detail::unitary_transform(std::move(img), FFTW_FORWARD);
}

/// Inverse of dft2.
inline ComplexField idft2(ComplexField img) {
  return detail::unitary_transform(std::move(img), FFTW_BACKWARD);
}

}  // namespace padmm

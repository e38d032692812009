#pragma once

// Thin RAII layer over FFTW. Plans are created under a global lock and
// executed through the new-array interface, which FFTW documents as
// thread-safe, so one plan may serve concurrent callers.

#include <fftw3.h>

#include <span>

#include "scm/common.hpp"

namespace scm::detail {

enum class FftDirection { kForward, kBackward };

/// Unnormalized complex DFT of fixed shape: forward uses e^{-2 pi i k j / n},
/// backward e^{+2 pi i k j / n}.
class FftPlan {
 public:
  /// 1D transform of length n.
  FftPlan(int n, FftDirection dir);
  /// 2D row-major transform of shape rows x cols.
  FftPlan(int rows, int cols, FftDirection dir);
  ~FftPlan();

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return size_; }

  /// in and out must each hold size() elements; they may alias.
  void execute(std::span<const Complex> in, std::span<Complex> out) const;
  void execute_inplace(std::span<Complex> data) const { execute(data, data); }

 private:
  fftw_plan plan_ = nullptr;
  int size_ = 0;
};

}  // namespace scm::detail

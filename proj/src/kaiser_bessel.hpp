#pragma once

#include <vector>

#include "scm/common.hpp"

namespace scm::detail {

/// Kaiser-Bessel window phi(d) = I0(beta sqrt(1 - (2d/w)^2)) / I0(beta) on
/// |d| <= w/2 (d in grid cells), tabulated as per-cell Chebyshev series so a
/// full row of w kernel values costs w short Clenshaw recurrences.
class KaiserBesselKernel {
 public:
  static constexpr int kMaxWidth = 16;
  static constexpr int kDegree = 18;

  KaiserBesselKernel(int width, double oversampling);

  int width() const { return width_; }
  double beta() const { return beta_; }

  double evaluate_exact(double d) const;

  /// out[s] = phi(x + w/2 - 1 - s), s = 0..w-1, for x in [0, 1].
  void evaluate_row(double x, double* out) const;

  /// Continuous Fourier transform of phi at angular frequency 2 pi m / grid,
  /// in grid units.
  double fourier(double m, int grid) const;

 private:
  int width_;
  double beta_;
  double i0_beta_;
  std::vector<double> pieces_;
};

int kernel_width_for_tolerance(double tol);

}  // namespace scm::detail

// Type-2 NUFFT onto polar frequency points.
//
// With centered indices m = i - n/2 the nodes are t_i = m L / n, so
//
//   alpha_theta[k] = (L/n)^2 F(omega),   F(omega) = sum_m c_m e^{-i <m, omega>},
//   omega = 2 pi k (cos theta, sin theta) / n  in [-pi, pi]^2.
//
// F is evaluated by spreading the deconvolved coefficients onto an N = 2n
// oversampled grid with one FFT and interpolating with a separable
// Kaiser-Bessel kernel phi of width w grid cells:
//
//   F(omega) ~= sum_l b_l phi(omega/h - l1) phi(omega/h - l2),  h = 2 pi / N,
//   b_l      = sum_m c_m / (psi(m1) psi(m2)) e^{-2 pi i <m, l> / N},
//
// where psi is the Fourier transform of phi (in grid units), known in closed
// form for the Kaiser-Bessel window.

#include "kaiser_bessel.hpp"

#include <algorithm>
#include <string>

#include "fft.hpp"
#include "scm/spectral.hpp"

namespace scm {
namespace detail {

KaiserBesselKernel::KaiserBesselKernel(int width, double oversampling) : width_(width) {
  if (width < 2 || width > kMaxWidth) throw std::invalid_argument("Kaiser-Bessel width out of range");
  const double ratio = 1.0 - 1.0 / (2.0 * oversampling);
  beta_ = kPi * std::sqrt(width * width * ratio * ratio - 0.8);
  i0_beta_ = std::cyl_bessel_i(0.0, beta_);

  // Piece s covers offsets d in [w/2 - 1 - s, w/2 - s]; fit each with a
  // Chebyshev series in the local variable y = 2x - 1, x in [0, 1].
  pieces_.assign(static_cast<std::size_t>(width_) * kDegree, 0.0);
  std::vector<double> samples(kDegree);
  for (int s = 0; s < width_; ++s) {
    for (int q = 0; q < kDegree; ++q) {
      const double y = std::cos(kPi * (q + 0.5) / kDegree);
      const double x = 0.5 * (y + 1.0);
      samples[q] = evaluate_exact(x + 0.5 * width_ - 1.0 - s);
    }
    for (int c = 0; c < kDegree; ++c) {
      double sum = 0.0;
      for (int q = 0; q < kDegree; ++q) sum += samples[q] * std::cos(kPi * c * (q + 0.5) / kDegree);
      pieces_[static_cast<std::size_t>(s) * kDegree + c] = (c == 0 ? 1.0 : 2.0) * sum / kDegree;
    }
  }
}

double KaiserBesselKernel::evaluate_exact(double d) const {
  const double z = 2.0 * d / width_;
  const double arg = 1.0 - z * z;
  if (arg < 0.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta_ * std::sqrt(arg)) / i0_beta_;
}

double KaiserBesselKernel::fourier(double m, int grid) const {
  const double z = kPi * m * width_ / grid;
  const double r2 = beta_ * beta_ - z * z;
  double ratio;
  if (r2 > 0.0) {
    const double r = std::sqrt(r2);
    ratio = std::sinh(r) / r;
  } else if (r2 < 0.0) {
    const double r = std::sqrt(-r2);
    ratio = std::sin(r) / r;
  } else {
    ratio = 1.0;
  }
  return width_ * ratio / i0_beta_;
}

void KaiserBesselKernel::evaluate_row(double x, double* out) const {
  const double y = 2.0 * x - 1.0;
  for (int s = 0; s < width_; ++s) {
    const double* c = &pieces_[static_cast<std::size_t>(s) * kDegree];
    double b1 = 0.0, b2 = 0.0;
    for (int q = kDegree - 1; q >= 1; --q) {
      const double b0 = 2.0 * y * b1 - b2 + c[q];
      b2 = b1;
      b1 = b0;
    }
    out[s] = y * b1 - b2 + c[0];
  }
}

int kernel_width_for_tolerance(double tol) {
  if (!(tol >= 1e-12)) {
    throw std::invalid_argument("polar transform tolerance must be >= 1e-12, got " + std::to_string(tol));
  }
  const int w = static_cast<int>(std::ceil(-std::log10(tol))) + 2;
  return std::clamp(w, 4, KaiserBesselKernel::kMaxWidth);
}

}  // namespace detail

PolarSpectrum polar_coefficients_fast(const Field2D& x, std::span<const double> angles, double tol) {
  const Grid2D& g = x.grid();
  const int n = g.n();
  const int big = 2 * n;
  const detail::KaiserBesselKernel kernel(detail::kernel_width_for_tolerance(tol), 2.0);
  const int w = kernel.width();

  std::vector<double> deconv(n);
  for (int m = -n / 2; m < n / 2; ++m) deconv[m + n / 2] = 1.0 / kernel.fourier(m, big);

  const auto cells = static_cast<std::size_t>(big) * big;
  std::vector<Complex> grid(cells, Complex(0.0));
  for (int i = 0; i < n; ++i) {
    const int gi = (i - n / 2 + big) % big;
    for (int j = 0; j < n; ++j) {
      const int gj = (j - n / 2 + big) % big;
      grid[static_cast<std::size_t>(gi) * big + gj] = x.at(i, j) * deconv[i] * deconv[j];
    }
  }
  const detail::FftPlan plan(big, big, detail::FftDirection::kForward);
  plan.execute_inplace(grid);

  const double h = g.spacing();
  const double scale = h * h;
  const auto count = angles.size();
  std::vector<Complex> coeffs(count * n);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(count); ++l) {
    const double c = std::cos(angles[l]);
    const double s = std::sin(angles[l]);
    double kx[detail::KaiserBesselKernel::kMaxWidth];
    double ky[detail::KaiserBesselKernel::kMaxWidth];
    int rows[detail::KaiserBesselKernel::kMaxWidth];
    int cols[detail::KaiserBesselKernel::kMaxWidth];
    Complex* out = coeffs.data() + static_cast<std::size_t>(l) * n;

    // Real input: compute k <= 0 and mirror by conjugation.
    for (int k = -n / 2; k <= 0; ++k) {
      const double u1 = 2.0 * k * c;  // omega / h
      const double u2 = 2.0 * k * s;
      const double l1 = std::ceil(u1 - 0.5 * w);
      const double l2 = std::ceil(u2 - 0.5 * w);
      kernel.evaluate_row(u1 - l1 - 0.5 * w + 1.0, kx);
      kernel.evaluate_row(u2 - l2 - 0.5 * w + 1.0, ky);
      const int b1 = static_cast<int>(l1);
      const int b2 = static_cast<int>(l2);
      for (int q = 0; q < w; ++q) {
        rows[q] = ((b1 + q) % big + big) % big;
        cols[q] = ((b2 + q) % big + big) % big;
      }
      Complex total = 0.0;
      for (int a = 0; a < w; ++a) {
        const Complex* row = grid.data() + static_cast<std::size_t>(rows[a]) * big;
        Complex inner = 0.0;
        for (int b = 0; b < w; ++b) inner += row[cols[b]] * ky[b];
        total += kx[a] * inner;
      }
      out[k + n / 2] = scale * total;
    }
    for (int k = 1; k < n / 2; ++k) out[k + n / 2] = std::conj(out[-k + n / 2]);
  }
  return PolarSpectrum(g.length(), n, std::vector<double>(angles.begin(), angles.end()), std::move(coeffs));
}

}  // namespace scm

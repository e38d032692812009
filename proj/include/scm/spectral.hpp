#pragma once

// Normalized Fourier coefficients on uniform grids.
//
// 1D:  alpha[k]        = (L/n)   sum_j     x[j]    e^{-2 pi i k t_j / L}
// 2D:  alpha_theta[k]  = (L/n)^2 sum_{i,j} x[i,j]  e^{-2 pi i k (t_i cos theta + t_j sin theta) / L}
//
// with k = -n/2 .. n/2-1. The 2D coefficients sample the Fourier transform
// of the field along the line through the origin at angle theta, i.e. the
// Fourier transform of the projection onto that direction.

#include <optional>
#include <span>
#include <vector>

#include "scm/grids.hpp"

namespace scm {

class Spectrum1D {
 public:
  Spectrum1D(double L, double a, std::vector<Complex> coeffs);

  double period() const { return L_; }
  double origin() const { return a_; }
  int n() const { return static_cast<int>(coeffs_.size()); }

  /// Coefficient for frequency k, -n/2 <= k < n/2.
  Complex at(int k) const { return coeffs_[static_cast<std::size_t>(k + n() / 2)]; }
  std::span<const Complex> coeffs() const { return coeffs_; }

 private:
  double L_;
  double a_;
  std::vector<Complex> coeffs_;
};

/// Coefficients along several angles; row l holds frequencies -n/2 .. n/2-1.
class PolarSpectrum {
 public:
  PolarSpectrum(double L, int n, std::vector<double> angles, std::vector<Complex> coeffs);

  double period() const { return L_; }
  int n() const { return n_; }
  std::span<const double> angles() const { return angles_; }
  std::size_t angle_count() const { return angles_.size(); }

  Complex at(std::size_t l, int k) const { return coeffs_[l * n_ + static_cast<std::size_t>(k + n_ / 2)]; }
  std::span<const Complex> row(std::size_t l) const { return {coeffs_.data() + l * n_, static_cast<std::size_t>(n_)}; }

  /// a * this + b * other; both must share period, size and angles.
  PolarSpectrum combined(double a, const PolarSpectrum& other, double b) const;

 private:
  double L_;
  int n_;
  std::vector<double> angles_;
  std::vector<Complex> coeffs_;
};

/// theta_l = pi l / n, l = 0..n-1.
std::vector<double> default_angles(int n);

/// FFT path with the e^{-2 pi i k a / L} phase applied explicitly.
Spectrum1D coefficients_1d(const Field1D& x);

/// Exact direct summation, factored over the separable exponent. O(n^3) per
/// angle; intended as a reference for the fast path.
PolarSpectrum polar_coefficients_direct(const Field2D& x, std::span<const double> angles);

inline constexpr double kDefaultPolarTolerance = 1e-9;

/// Type-2 nonuniform FFT: factor-2 oversampled 2D FFT followed by separable
/// Kaiser-Bessel interpolation onto the polar frequency points. Guarantees
/// max |fast - direct| <= tol * (L/n)^2 sum |x|. Throws std::invalid_argument
/// when tol is below what the kernel can deliver (tol < 1e-12).
PolarSpectrum polar_coefficients_fast(const Field2D& x, std::span<const double> angles,
                                      double tol = kDefaultPolarTolerance);

/// nu(t) = (1/L) sum_{k=-n/2+1}^{n/2-1} beta[k] e^{2 pi i t k / L}, where
/// beta holds the n-1 coefficients in increasing k.
std::vector<Complex> evaluate_trig_poly(std::span<const Complex> beta, double L, std::span<const double> t);

/// Same polynomial at the n grid nodes t_j = a + j L / n, via one inverse FFT.
std::vector<Complex> evaluate_trig_poly_on_grid(std::span<const Complex> beta, double L, double a);

/// Band-limited projection onto direction theta, sampled on [-R, R) with n
/// nodes: the inverse transform of alpha_theta[k] for |k| < n/2.
Field1D radon_projection(const Field2D& x, double theta, double tol = kDefaultPolarTolerance);

/// Projections for every angle of a precomputed polar spectrum.
std::vector<Field1D> radon_projections(const PolarSpectrum& spectrum, double R);

}  // namespace scm

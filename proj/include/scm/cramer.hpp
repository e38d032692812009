#pragma once

// Discrete Volterra norms and Cramer distances.
//
// In 1D the antiderivative of a sampled field is represented spectrally:
//
//   beta[k] = alpha[k] / (2 pi i k / L)                      0 < |k| < n/2
//   beta[0] = -sum_{0<|k|<n/2} beta[k] e^{2 pi i k a / L}    (so nu(a) = 0)
//   nu(t)   = (1/L) sum_{|k|<n/2} beta[k] e^{2 pi i t k / L}
//
//   V_p(x)  = ((L/n) sum_j |nu(t_j)|^p)^(1/p),   V_inf(x) = max_j |nu(t_j)|
//
// and the Cramer distance is V_p(x - y). In 2D the same construction runs
// along every projection angle of the polar spectrum and the per-angle
// p-th powers are averaged over the angles.
//
// The transform only sees the mean-zero part of its input: a nonzero
// integral is dropped silently by the construction of beta[0]. Inputs whose
// integrals differ by more than `mean_tolerance` (relative) trigger a
// warning through scm::warn and proceed.

#include <optional>
#include <span>
#include <vector>

#include "scm/grids.hpp"
#include "scm/spectral.hpp"

namespace scm {

inline constexpr double kDefaultMeanTolerance = 1e-6;

struct CramerOptions {
  double mean_tolerance = kDefaultMeanTolerance;
  double polar_tolerance = kDefaultPolarTolerance;
  /// Projection angles for 2D norms; defaults to pi l / n, l = 0..n-1.
  std::optional<std::vector<double>> angles;
};

class VolterraSpectrum1D {
 public:
  VolterraSpectrum1D(double L, double a, std::vector<Complex> beta);

  double period() const { return L_; }
  double origin() const { return a_; }
  int n() const { return static_cast<int>(beta_.size()) + 1; }

  /// beta[k] for -n/2 < k < n/2.
  Complex at(int k) const { return beta_[static_cast<std::size_t>(k + n() / 2 - 1)]; }
  std::span<const Complex> beta() const { return beta_; }

  /// nu at the n grid nodes a + j L / n (real part; the imaginary part is
  /// rounding noise for real inputs).
  std::vector<double> on_grid() const;

 private:
  double L_;
  double a_;
  std::vector<Complex> beta_;
};

VolterraSpectrum1D volterra_spectrum_1d(const Spectrum1D& alpha, double a,
                                        double mean_tolerance = kDefaultMeanTolerance);

double discrete_volterra_norm_1d(const Field1D& x, PNorm p, const CramerOptions& options = {});

/// Several exponents from one transform.
std::vector<double> discrete_volterra_norms_1d(const Field1D& x, std::span<const PNorm> ps,
                                               const CramerOptions& options = {});

double discrete_cramer_1d(const Field1D& x, const Field1D& y, PNorm p, const CramerOptions& options = {});

/// Independent reference: cumulative left-Riemann sums
/// V[j] = (L/n) sum_{i<j} x[i], then ((L/n) sum_j |V[j]|^p)^(1/p).
double oracle_volterra_norm(const Field1D& x, PNorm p);

/// Per-angle antiderivative samples nu(t_j, theta_l) on the projection grid
/// [-R, R), as rows of length n (one row per angle).
std::vector<std::vector<double>> sliced_volterra_profiles(const PolarSpectrum& spectrum);

/// Per-angle contributions (L/n) sum_j |nu(t_j, theta_l)|^p (p finite), or
/// max_j |nu| (p infinite).
std::vector<double> sliced_volterra_per_angle(const PolarSpectrum& spectrum, PNorm p);

/// SV_p from a precomputed polar spectrum, for several exponents at once.
std::vector<double> sliced_volterra_norms(const PolarSpectrum& spectrum, std::span<const PNorm> ps);

double sliced_volterra_norm_2d(const Field2D& x, PNorm p, const CramerOptions& options = {});
std::vector<double> sliced_volterra_norms_2d(const Field2D& x, std::span<const PNorm> ps,
                                             const CramerOptions& options = {});

double discrete_sliced_cramer_2d(const Field2D& x, const Field2D& y, PNorm p, const CramerOptions& options = {});
std::vector<double> discrete_sliced_cramer_2d(const Field2D& x, const Field2D& y, std::span<const PNorm> ps,
                                              const CramerOptions& options = {});

/// Polar spectrum of x on the options' angles (default pi l / n).
PolarSpectrum polar_spectrum(const Field2D& x, const CramerOptions& options = {});

}  // namespace scm

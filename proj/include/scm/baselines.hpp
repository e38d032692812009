#pragma once

// Wasserstein baselines: 1D W_p through quantile functions and sliced W_p
// through Radon projections.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scm/grids.hpp"
#include "scm/spectral.hpp"

namespace scm {

/// Negative input, or masses that cannot be matched.
class MeasureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNegativeTolerance = 1e-9;
inline constexpr double kMassTolerance = 1e-4;

/// Cumulative left-Riemann sums F[j] = (L/n) sum_{i<j} x[i], j = 0..n, read
/// as a piecewise-linear function of t with F(t_j) = F[j] and t_n = b.
class DiscreteCDF {
 public:
  DiscreteCDF(Grid1D grid, std::vector<double> cdf);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return cdf_; }
  double mass() const { return cdf_.back(); }

  /// inf{t : F(t) >= level}; level is clamped to [0, mass].
  double quantile(double level) const;

  /// Quantiles at nondecreasing levels in one sweep.
  std::vector<double> quantiles(std::span<const double> levels) const;

 private:
  Grid1D grid_;
  std::vector<double> cdf_;
};

/// Values below -negative_tolerance * max|x| throw MeasureError; smaller
/// negative values are clamped to 0.
DiscreteCDF cdf_from_field(const Field1D& x, double negative_tolerance = kNegativeTolerance);

struct WassersteinOptions {
  /// Quantile levels; 0 selects 4n.
  int levels = 0;
  double mass_tolerance = kMassTolerance;
  double negative_tolerance = kNegativeTolerance;
};

/// ((mass/m) sum_s |qx(u_s) - qy(u_s)|^p)^(1/p) at levels
/// u_s = (s + 1/2)/m * mass, after both inputs are rescaled to their mean
/// mass; max |dq| for p = infinity.
double wasserstein_1d(const Field1D& x, const Field1D& y, PNorm p, const WassersteinOptions& options = {});
std::vector<double> wasserstein_1d(const Field1D& x, const Field1D& y, std::span<const PNorm> ps,
                                   const WassersteinOptions& options = {});

/// Same distances from two CDFs on a shared grid.
std::vector<double> wasserstein_from_cdfs(const DiscreteCDF& x, const DiscreteCDF& y, std::span<const PNorm> ps,
                                          const WassersteinOptions& options = {});

/// W_1 as the left-Riemann L1 distance between the two CDFs.
double w1_via_cdf(const Field1D& x, const Field1D& y, const WassersteinOptions& options = {});

struct SlicedWassersteinOptions {
  WassersteinOptions wasserstein;
  /// Projection angles; defaults to pi l / n.
  std::optional<std::vector<double>> angles;
  double polar_tolerance = kDefaultPolarTolerance;
  /// Band-limit ripple below zero is clamped before each projection is
  /// renormalized. When false, negative projections throw instead.
  bool clamp_negative = true;
  /// Clamped mass (relative to the projection's mass) above which a warning
  /// is emitted.
  double ripple_warning = 1e-3;
};

/// ((1/count) sum_l W_p(P_l x, P_l y)^p)^(1/p); the max over angles for
/// p = infinity.
double sliced_wasserstein_2d(const Field2D& x, const Field2D& y, PNorm p, const SlicedWassersteinOptions& options = {});
std::vector<double> sliced_wasserstein_2d(const Field2D& x, const Field2D& y, std::span<const PNorm> ps,
                                          const SlicedWassersteinOptions& options = {});

/// Sliced distances from precomputed polar spectra (same layout), for callers
/// that reuse one spectrum across many comparisons.
std::vector<double> sliced_wasserstein_from_spectra(const PolarSpectrum& x, const PolarSpectrum& y, double R,
                                                    std::span<const PNorm> ps,
                                                    const SlicedWassersteinOptions& options = {});

/// Per-angle W_p^p (or W_inf) between matching projections.
std::vector<double> sliced_wasserstein_per_angle(const std::vector<Field1D>& px, const std::vector<Field1D>& py,
                                                 PNorm p, const SlicedWassersteinOptions& options = {});

}  // namespace scm

#pragma once

// Additive heteroscedastic Gaussian noise and the convergence experiments
// built on it: noise-only Volterra norms, signal-plus-noise distance errors,
// and log-log slope fits.
//
// Sample values come from philox_normal keyed by the model seed with
// counter (node index, trial, stream), so a field depends only on those
// numbers and never on thread count or evaluation order.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scm/grids.hpp"

namespace scm {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Per-node standard deviations plus a seed.
template <class FieldT>
class NoiseModel {
 public:
  /// Throws std::invalid_argument on a negative or non-finite sigma, or if
  /// the grid mean of sigma^2 exceeds budget^2.
  NoiseModel(FieldT sigma, std::uint64_t seed, std::optional<double> budget = std::nullopt);

  static NoiseModel constant(const typename FieldT::GridType& grid, double sigma, std::uint64_t seed);

  const FieldT& sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  /// sqrt of the grid mean of sigma^2.
  double rms() const;

 private:
  FieldT sigma_;
  std::uint64_t seed_;
};

using NoiseModel1D = NoiseModel<Field1D>;
using NoiseModel2D = NoiseModel<Field2D>;

/// Independent N(0, sigma_j^2) at every node. The grid must match the
/// model's sigma field.
Field1D sample_noise(const NoiseModel1D& model, const Grid1D& grid, std::uint32_t trial = 0,
                     std::uint32_t stream = 0);
Field2D sample_noise(const NoiseModel2D& model, const Grid2D& grid, std::uint32_t trial = 0,
                     std::uint32_t stream = 0);

struct ScalingRow {
  int n = 0;
  double p = 0.0;
  double mean_err = 0.0;
  double std_err = 0.0;  ///< sample standard deviation / sqrt(M)
  int trials = 0;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct ScalingResult {
  int dimension = 1;
  std::vector<ScalingRow> rows;  ///< sorted by n, then p
  /// One fit per p (in the order of the study's p list); nullopt when fewer
  /// than two usable points remain.
  std::vector<std::optional<LogLogFit>> fits;
  std::vector<double> ps;
  std::uint64_t seed = 0;

  const std::optional<LogLogFit>& fit_for(double p) const;
  std::string to_csv() const;
  /// Rows, fits and the seed; `config` (a JSON document) is embedded verbatim.
  std::string to_json(const std::string& config = "{}") const;
};

/// OLS fit of log(y) against log(x); nullopt below two points.
std::optional<LogLogFit> fit_loglog(std::span<const double> x, std::span<const double> y);

/// Spatially varying sigma profile; the default is constant.
using SigmaProfile = std::function<double(Vec2)>;

struct NoiseStudyConfig {
  double sigma = 1.0;
  SigmaProfile profile;  ///< multiplies sigma when set
  std::vector<int> sizes;
  std::vector<double> ps;
  int trials = 50;
  std::uint64_t seed = kDefaultSeed;
  double a = -1.0, b = 1.0;  ///< 1D interval
  double R = 2.5;            ///< 2D half-extent
};

/// Mean V_p (dimension 1) or SV_p (dimension 2) of pure-noise fields for
/// each n; slopes are fitted against log(n^d). All-zero means give no fit.
ScalingResult noise_norm_study(const NoiseStudyConfig& config, int dimension);

struct SignalNoiseConfig {
  GaussianMixtureSpec source;
  GaussianMixtureSpec target;
  double sigma = 0.01;
  std::vector<int> sizes;
  std::vector<double> ps;
  int trials = 50;
  std::uint64_t seed = kDefaultSeed;
  double R = 2.5;
  int reference_n = 1024;
  bool noisy_source = false;  ///< also perturb the source (stream 0)
};

struct SignalNoiseResult {
  ScalingResult scaling;
  std::vector<double> reference;           ///< d per p at reference_n
  std::vector<double> reference_error;     ///< |d(n_ref) - d(n_ref/2)| / d per p
  std::vector<std::vector<double>> clean;  ///< clean relative error per n (row) and p
};

/// err_{n,p} = (1/M) sum_k |d - d_k| / d with d the clean sliced Cramer
/// distance at reference_n and d_k computed on noisy samples at n. A point
/// enters the slope fit only if err is at least 10x its discretization
/// floor max(clean error at n, reference error).
/// Throws std::invalid_argument when d = 0 for some p.
SignalNoiseResult signal_noise_study(const SignalNoiseConfig& config);

}  // namespace scm

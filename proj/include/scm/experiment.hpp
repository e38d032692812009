#pragma once

// Experiment configuration, result tables, and the commands behind the CLI.
//
// A configuration is one JSON document (see ExperimentConfig::from_json for
// the schema). Every command is a pure function of the resolved config:
// work fans out over OpenMP, results are written by index, and noise comes
// from the counter-based generator, so output does not depend on the
// thread count.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scm/geometry.hpp"
#include "scm/grids.hpp"
#include "scm/noise.hpp"
#include "scm/spectral.hpp"

namespace scm {

/// Invalid or inconsistent configuration (CLI exit code 64).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitConfig = 64;

struct PhantomConfig {
  GaussianMixtureSpec spec;
  std::optional<std::string> file;  ///< SCMF field instead of a mixture
};

/// One-parameter family Phi_delta with Phi at the identity for the smallest
/// meaningful delta: translate (delta * direction), rotate (angle delta),
/// dilate (factor delta >= 1), affine (I + delta (A - I), delta b) for a
/// target map given by `deform`.
struct SweepConfig {
  std::string family = "rotate";
  double min = 0.0;
  double max = kPi / 2;
  int count = 25;
  Vec2 direction{1.0, 0.0};
  std::optional<std::string> deform;  ///< the affine target, or a parsed override
  bool explicit_family = false;       ///< set when the config names a family

  Deformation at(double delta, double radius) const;
  std::vector<double> parameters() const;
};

struct NoiseSweepConfig {
  std::vector<double> sigmas{0.0, 0.5, 1.0, 1.5};
  int trials = 10;
  bool noisy_source = false;
};

struct ToleranceConfig {
  double polar = kDefaultPolarTolerance;
  double mean = 1e-6;
  double bound_slack = 0.02;
  double oracle_polar = 1e-9;
  double oracle_cramer_w1 = 1e-3;
  double oracle_order = 0.9;
};

struct ExperimentConfig {
  std::string command = "dist";
  int dimension = 2;
  double R = 2.5;
  int n = 256;
  std::vector<double> ps{1.0, 2.0, 10.0};
  PhantomConfig source;
  PhantomConfig target;
  SweepConfig sweep;
  NoiseSweepConfig noise;
  std::vector<double> blur_widths{0.02, 0.04, 0.06, 0.08, 0.1};
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::string format = "csv";
  ToleranceConfig tolerances;
  int oracle_n = 64;
  int threads = 0;
  bool corrupt_rhs = false;

  /// Defaults: the 5x4 source and 4x3 target grid phantoms, width R/50.
  ExperimentConfig();

  /// Parses and validates; unknown keys are errors. Throws ConfigError.
  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;

  /// Throws ConfigError unless n is even, p >= 1, ranges are nonempty, etc.
  void validate() const;

  /// Sets the sweep from a deformation string: `rotate:0.5` sweeps
  /// [0, 0.5], `dilate:2` sweeps [1, 2], `translate:vx,vy` sweeps delta in
  /// [0, |v|] along v, `affine:...` interpolates from the identity.
  void set_deform(const std::string& text);
};

using Cell = std::variant<std::string, double, long long>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;

  /// Header plus one line per row; doubles as %.17g.
  std::string to_csv() const;
  /// {"config": ..., "columns": [...], "rows": [{...}]}; non-finite numbers
  /// become strings.
  std::string to_json(const std::string& config_json) const;
};

struct CommandResult {
  ResultTable table;
  int exit_code = kExitSuccess;
};

/// Rows (metric, p, value, status); Wasserstein failures on signed input are
/// reported in `status` while the other metrics are still computed.
CommandResult cmd_dist(const ExperimentConfig& config);

/// Rows (family, index, delta, metric, p, to_target, to_source, bound):
/// D(f_Phi, g), D(f_Phi, f), and the smallest applicable bound on the
/// latter (nan for metrics without one).
CommandResult cmd_deform_sweep(const ExperimentConfig& config);

/// Rows (family, index, delta, sigma, metric, p, mean_distance, std_err,
/// trials) with the target (and optionally the source) perturbed.
CommandResult cmd_noise_sweep(const ExperimentConfig& config);

/// Rows (bound, family, delta, p, lhs, rhs, margin) with
/// margin = (rhs - lhs) / rhs; exit code 2 if any margin < -bound_slack.
CommandResult cmd_bound_check(const ExperimentConfig& config);

/// Rows (oracle, detail, value, tolerance, pass); exit code 2 on any failure.
CommandResult cmd_oracle_check(const ExperimentConfig& config);

/// Dispatches on config.command.
CommandResult run_command(const ExperimentConfig& config);

/// Pearson correlation of two equally long series.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace scm

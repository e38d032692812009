#include "scm/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "scm/cramer.hpp"
#include "scm/format.hpp"
#include "scm/philox.hpp"
#include "scm/spectral.hpp"

namespace scm {
namespace {

constexpr double kReferenceFloorFactor = 10.0;

template <class FieldT>
double mean_square(const FieldT& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return s / static_cast<double>(x.values().size());
}

std::vector<PNorm> to_pnorms(std::span<const double> ps) {
  std::vector<PNorm> out;
  out.reserve(ps.size());
  for (double p : ps) out.emplace_back(p);
  return out;
}

void require_study_shape(std::span<const int> sizes, std::span<const double> ps, int trials) {
  if (sizes.empty()) throw std::invalid_argument("noise study needs at least one grid size");
  if (ps.empty()) throw std::invalid_argument("noise study needs at least one p");
  if (trials < 2) throw std::invalid_argument("noise study needs at least two trials");
  for (int n : sizes) {
    if (n <= 0 || n % 2 != 0) throw std::invalid_argument("grid sizes must be positive and even");
  }
}

struct Moments {
  double mean;
  double std_err;
};

Moments moments(std::span<const double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {m, sd / std::sqrt(static_cast<double>(v.size()))};
}

// samples[n index][trial][p index] -> rows sorted by n then p, plus fits.
ScalingResult assemble(int dimension, std::vector<int> sizes, std::span<const double> ps, int trials,
                       std::uint64_t seed, const std::vector<std::vector<std::vector<double>>>& samples,
                       const std::function<bool(std::size_t, std::size_t, double)>& usable) {
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return sizes[l] < sizes[r]; });

  ScalingResult out;
  out.dimension = dimension;
  out.seed = seed;
  out.ps.assign(ps.begin(), ps.end());
  std::vector<std::vector<double>> xs(ps.size()), ys(ps.size());
  for (std::size_t s : order) {
    for (std::size_t q = 0; q < ps.size(); ++q) {
      std::vector<double> v(static_cast<std::size_t>(trials));
      for (int k = 0; k < trials; ++k) v[k] = samples[s][k][q];
      const auto m = moments(v);
      out.rows.push_back({sizes[s], ps[q], m.mean, m.std_err, trials});
      if (m.mean > 0.0 && usable(s, q, m.mean)) {
        xs[q].push_back(std::pow(static_cast<double>(sizes[s]), dimension));
        ys[q].push_back(m.mean);
      }
    }
  }
  for (std::size_t q = 0; q < ps.size(); ++q) out.fits.push_back(fit_loglog(xs[q], ys[q]));
  return out;
}

double profile_at(const SigmaProfile& profile, Vec2 x) { return profile ? profile(x) : 1.0; }

}  // namespace

template <class FieldT>
NoiseModel<FieldT>::NoiseModel(FieldT sigma, std::uint64_t seed, std::optional<double> budget)
    : sigma_(std::move(sigma)), seed_(seed) {
  for (double s : sigma_.values()) {
    if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("noise sigma must be finite and nonnegative");
  }
  if (budget && mean_square(sigma_) > (*budget) * (*budget) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "mean of sigma^2 (" << mean_square(sigma_) << ") exceeds the budget " << *budget << "^2";
    throw std::invalid_argument(msg.str());
  }
}

template <class FieldT>
NoiseModel<FieldT> NoiseModel<FieldT>::constant(const typename FieldT::GridType& grid, double sigma,
                                                std::uint64_t seed) {
  const auto zero = FieldT::zeros(grid);
  return NoiseModel(FieldT(grid, std::vector<double>(zero.values().size(), sigma)), seed);
}

template <class FieldT>
double NoiseModel<FieldT>::rms() const {
  return std::sqrt(mean_square(sigma_));
}

template class NoiseModel<Field1D>;
template class NoiseModel<Field2D>;

Field1D sample_noise(const NoiseModel1D& model, const Grid1D& grid, std::uint32_t trial, std::uint32_t stream) {
  if (!(model.sigma().grid() == grid)) throw GridMismatch("noise model grid differs from the sampling grid");
  const auto sigma = model.sigma().values();
  std::vector<double> out(sigma.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = sigma[j] == 0.0 ? 0.0 : sigma[j] * philox_normal(model.seed(), j, trial, stream);
  }
  return Field1D(grid, std::move(out));
}

Field2D sample_noise(const NoiseModel2D& model, const Grid2D& grid, std::uint32_t trial, std::uint32_t stream) {
  if (!(model.sigma().grid() == grid)) throw GridMismatch("noise model grid differs from the sampling grid");
  const auto sigma = model.sigma().values();
  std::vector<double> out(sigma.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = sigma[j] == 0.0 ? 0.0 : sigma[j] * philox_normal(model.seed(), j, trial, stream);
  }
  return Field2D(grid, std::move(out));
}

std::optional<LogLogFit> fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return std::nullopt;
  const double slope = sxy / sxx;
  return LogLogFit{slope, my - slope * mx, static_cast<int>(x.size())};
}

const std::optional<LogLogFit>& ScalingResult::fit_for(double p) const {
  for (std::size_t q = 0; q < ps.size(); ++q) {
    if (ps[q] == p) return fits[q];
  }
  throw std::out_of_range("no fit for p = " + format_double(p));
}

std::string ScalingResult::to_csv() const {
  std::string out = "n,p,mean_err,std_err,M\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + format_double(r.p) + ',' + format_double(r.mean_err) + ',' +
           format_double(r.std_err) + ',' + std::to_string(r.trials) + '\n';
  }
  return out;
}

std::string ScalingResult::to_json(const std::string& config) const {
  using nlohmann::ordered_json;
  auto pvalue = [](double p) { return std::isinf(p) ? ordered_json("inf") : ordered_json(p); };
  ordered_json doc;
  doc["dimension"] = dimension;
  doc["seed"] = seed;
  doc["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    doc["rows"].push_back(
        {{"n", r.n}, {"p", pvalue(r.p)}, {"mean_err", r.mean_err}, {"std_err", r.std_err}, {"M", r.trials}});
  }
  doc["fits"] = ordered_json::array();
  for (std::size_t q = 0; q < ps.size(); ++q) {
    ordered_json f{{"p", pvalue(ps[q])}};
    if (fits[q]) {
      f["slope"] = fits[q]->slope;
      f["intercept"] = fits[q]->intercept;
      f["points"] = fits[q]->points;
    } else {
      f["slope"] = nullptr;
    }
    doc["fits"].push_back(f);
  }
  auto parsed = ordered_json::parse(config, nullptr, false);
  doc["config"] = parsed.is_discarded() ? ordered_json(config) : parsed;
  return doc.dump(2) + "\n";
}

ScalingResult noise_norm_study(const NoiseStudyConfig& config, int dimension) {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
  require_study_shape(config.sizes, config.ps, config.trials);
  const auto ps = to_pnorms(config.ps);
  const int trials = config.trials;
  std::vector<std::vector<std::vector<double>>> samples(config.sizes.size());
  CramerOptions quiet;
  quiet.mean_tolerance = std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const int n = config.sizes[s];
    auto& out = samples[s];
    out.assign(trials, {});
    if (dimension == 1) {
      const Grid1D grid(config.a, config.b, n);
      std::vector<double> sigma(n);
      for (int j = 0; j < n; ++j) sigma[j] = config.sigma * profile_at(config.profile, {grid.node(j), 0.0});
      const NoiseModel1D model(Field1D(grid, std::move(sigma)), config.seed);
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < trials; ++k) {
        out[k] = discrete_volterra_norms_1d(sample_noise(model, grid, k), ps, quiet);
      }
    } else {
      const Grid2D grid(config.R, n);
      std::vector<double> sigma(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          sigma[static_cast<std::size_t>(i) * n + j] =
              config.sigma * profile_at(config.profile, {grid.node(i), grid.node(j)});
        }
      }
      const NoiseModel2D model(Field2D(grid, std::move(sigma)), config.seed);
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < trials; ++k) {
        out[k] = sliced_volterra_norms(polar_spectrum(sample_noise(model, grid, k), quiet), ps);
      }
    }
  }
  return assemble(dimension, config.sizes, config.ps, trials, config.seed, samples,
                  [](std::size_t, std::size_t, double) { return true; });
}

SignalNoiseResult signal_noise_study(const SignalNoiseConfig& config) {
  require_study_shape(config.sizes, config.ps, config.trials);
  if (config.reference_n <= 0 || config.reference_n % 4 != 0) {
    throw std::invalid_argument("reference_n must be a positive multiple of 4");
  }
  const auto ps = to_pnorms(config.ps);
  const std::size_t np = ps.size();

  auto clean_distances = [&](int n) {
    const Grid2D grid(config.R, n);
    return sliced_volterra_norms(
        polar_spectrum(sample_mixture(config.source, grid) - sample_mixture(config.target, grid)), ps);
  };

  SignalNoiseResult result;
  result.reference = clean_distances(config.reference_n);
  const auto half = clean_distances(config.reference_n / 2);
  for (std::size_t q = 0; q < np; ++q) {
    if (!(result.reference[q] > 0.0)) {
      throw std::invalid_argument("reference distance is zero for p = " + format_double(config.ps[q]));
    }
    result.reference_error.push_back(std::abs(result.reference[q] - half[q]) / result.reference[q]);
  }

  const int trials = config.trials;
  std::vector<std::vector<std::vector<double>>> samples(config.sizes.size());
  result.clean.resize(config.sizes.size());
  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const Grid2D grid(config.R, config.sizes[s]);
    const auto clean = polar_spectrum(sample_mixture(config.source, grid) - sample_mixture(config.target, grid));
    const auto clean_d = sliced_volterra_norms(clean, ps);
    for (std::size_t q = 0; q < np; ++q) {
      result.clean[s].push_back(std::abs(clean_d[q] - result.reference[q]) / result.reference[q]);
    }
    const auto model = NoiseModel2D::constant(grid, config.sigma, config.seed);
    auto& out = samples[s];
    out.assign(trials, std::vector<double>(np));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < trials; ++k) {
      // f + Z_f - (g + Z_g): the clean difference plus the noise difference.
      Field2D noise = -1.0 * sample_noise(model, grid, k, 1);
      if (config.noisy_source) noise = noise + sample_noise(model, grid, k, 0);
      const auto d = sliced_volterra_norms(clean.combined(1.0, polar_spectrum(noise), 1.0), ps);
      for (std::size_t q = 0; q < np; ++q) out[k][q] = std::abs(result.reference[q] - d[q]) / result.reference[q];
    }
  }
  result.scaling = assemble(2, config.sizes, config.ps, trials, config.seed, samples,
                            [&](std::size_t s, std::size_t q, double mean) {
                              const double floor = std::max(result.clean[s][q], result.reference_error[q]);
                              return mean >= kReferenceFloorFactor * floor;
                            });
  return result;
}

}  // namespace scm

#include "scm/cramer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fft.hpp"
#include "scm/diagnostics.hpp"

namespace scm {
namespace {

constexpr double kNoCheck = std::numeric_limits<double>::infinity();

void warn_mean(double mean, double scale, double tol, const char* what) {
  if (std::abs(mean) > tol * scale) {
    std::ostringstream msg;
    msg << what << ": integral mismatch " << mean << " exceeds " << tol
        << " relative; the Volterra transform drops the mean";
    warn(msg.str());
  }
}

void check_equal_integrals(double ix, double iy, double abs_scale, double tol, const char* what) {
  if (std::isinf(tol)) return;
  warn_mean(ix - iy, abs_scale, tol, what);
}

double abs_integral(const Field1D& x) {
  double s = 0.0;
  for (double v : x.values()) s += std::abs(v);
  return s * x.grid().spacing();
}

double abs_integral(const Field2D& x) {
  double s = 0.0;
  for (double v : x.values()) s += std::abs(v);
  const double h = x.grid().spacing();
  return s * h * h;
}

std::vector<double> norms_from_samples(std::span<const double> nu, double cell, std::span<const PNorm> ps) {
  std::vector<double> out;
  out.reserve(ps.size());
  for (PNorm p : ps) {
    PowerAccumulator acc(p);
    for (double v : nu) acc.add(v);
    out.push_back(acc.result(cell));
  }
  return out;
}

}  // namespace

VolterraSpectrum1D::VolterraSpectrum1D(double L, double a, std::vector<Complex> beta)
    : L_(L), a_(a), beta_(std::move(beta)) {
  if (beta_.size() % 2 != 1) throw std::invalid_argument("Volterra spectrum needs n-1 coefficients, n even");
}

std::vector<double> VolterraSpectrum1D::on_grid() const {
  const auto values = evaluate_trig_poly_on_grid(beta_, L_, a_);
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) out[j] = values[j].real();
  return out;
}

VolterraSpectrum1D volterra_spectrum_1d(const Spectrum1D& alpha, double a, double mean_tolerance) {
  const int n = alpha.n();
  const double L = alpha.period();
  if (!std::isinf(mean_tolerance)) {
    double total = 0.0;
    for (const Complex& c : alpha.coeffs()) total += std::abs(c);
    warn_mean(std::abs(alpha.at(0)), total, mean_tolerance, "volterra_spectrum_1d");
  }

  std::vector<Complex> beta(static_cast<std::size_t>(n - 1));
  const Complex i_unit(0.0, 1.0);
  Complex b0 = 0.0;
  for (int k = -n / 2 + 1; k <= n / 2 - 1; ++k) {
    if (k == 0) continue;
    const Complex b = alpha.at(k) / (2.0 * kPi * i_unit * static_cast<double>(k) / L);
    beta[static_cast<std::size_t>(k + n / 2 - 1)] = b;
    const double f = k * a / L;
    b0 -= b * std::polar(1.0, 2.0 * kPi * (f - std::round(f)));
  }
  beta[static_cast<std::size_t>(n / 2 - 1)] = b0;
  return VolterraSpectrum1D(L, a, std::move(beta));
}

std::vector<double> discrete_volterra_norms_1d(const Field1D& x, std::span<const PNorm> ps,
                                               const CramerOptions& options) {
  const auto beta = volterra_spectrum_1d(coefficients_1d(x), x.grid().a(), options.mean_tolerance);
  return norms_from_samples(beta.on_grid(), x.grid().spacing(), ps);
}

double discrete_volterra_norm_1d(const Field1D& x, PNorm p, const CramerOptions& options) {
  const PNorm ps[] = {p};
  return discrete_volterra_norms_1d(x, ps, options).front();
}

double discrete_cramer_1d(const Field1D& x, const Field1D& y, PNorm p, const CramerOptions& options) {
  require_same_grid(x, y);
  check_equal_integrals(riemann_integral(x), riemann_integral(y), abs_integral(x) + abs_integral(y),
                        options.mean_tolerance, "discrete_cramer_1d");
  CramerOptions inner = options;
  inner.mean_tolerance = kNoCheck;
  return discrete_volterra_norm_1d(x - y, p, inner);
}

double oracle_volterra_norm(const Field1D& x, PNorm p) {
  const double h = x.grid().spacing();
  PowerAccumulator acc(p);
  double running = 0.0;
  for (double v : x.values()) {
    acc.add(running);
    running += h * v;
  }
  return acc.result(h);
}

std::vector<std::vector<double>> sliced_volterra_profiles(const PolarSpectrum& spectrum) {
  const int n = spectrum.n();
  const double L = spectrum.period();
  const auto count = spectrum.angle_count();
  std::vector<std::vector<double>> profiles(count, std::vector<double>(n));
  const detail::FftPlan plan(n, detail::FftDirection::kBackward);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(count); ++l) {
    std::vector<Complex> buf(n, Complex(0.0));
    Complex b0 = 0.0;
    for (int k = -n / 2 + 1; k <= n / 2 - 1; ++k) {
      if (k == 0) continue;
      const Complex b = spectrum.at(l, k) / Complex(0.0, 2.0 * kPi * k / L);
      // grid origin -R: e^{2 pi i k (-R) / L} = (-1)^k
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      b0 -= sign * b;
      buf[static_cast<std::size_t>((k + n) % n)] = sign * b;
    }
    buf[0] = b0;
    plan.execute_inplace(buf);
    auto& row = profiles[l];
    for (int j = 0; j < n; ++j) row[j] = buf[j].real() / L;
  }
  return profiles;
}

std::vector<double> sliced_volterra_per_angle(const PolarSpectrum& spectrum, PNorm p) {
  const auto profiles = sliced_volterra_profiles(spectrum);
  const double cell = spectrum.period() / spectrum.n();
  std::vector<double> out;
  out.reserve(profiles.size());
  for (const auto& row : profiles) {
    PowerAccumulator acc(p);
    for (double v : row) acc.add(v);
    out.push_back(p.is_infinite() ? acc.raw() : cell * acc.raw());
  }
  return out;
}

std::vector<double> sliced_volterra_norms(const PolarSpectrum& spectrum, std::span<const PNorm> ps) {
  const auto profiles = sliced_volterra_profiles(spectrum);
  const double cell = spectrum.period() / spectrum.n();
  const double angle_weight = 1.0 / static_cast<double>(profiles.size());
  std::vector<double> out;
  out.reserve(ps.size());
  for (PNorm p : ps) {
    PowerAccumulator acc(p);
    for (const auto& row : profiles) {
      for (double v : row) acc.add(v);
    }
    out.push_back(acc.result(cell * angle_weight));
  }
  return out;
}

PolarSpectrum polar_spectrum(const Field2D& x, const CramerOptions& options) {
  const auto angles = options.angles.value_or(default_angles(x.grid().n()));
  if (angles.empty()) throw std::invalid_argument("at least one projection angle is required");
  return polar_coefficients_fast(x, angles, options.polar_tolerance);
}

std::vector<double> sliced_volterra_norms_2d(const Field2D& x, std::span<const PNorm> ps,
                                             const CramerOptions& options) {
  if (!std::isinf(options.mean_tolerance)) {
    warn_mean(riemann_integral(x), abs_integral(x), options.mean_tolerance, "sliced_volterra_norm_2d");
  }
  return sliced_volterra_norms(polar_spectrum(x, options), ps);
}

double sliced_volterra_norm_2d(const Field2D& x, PNorm p, const CramerOptions& options) {
  const PNorm ps[] = {p};
  return sliced_volterra_norms_2d(x, ps, options).front();
}

std::vector<double> discrete_sliced_cramer_2d(const Field2D& x, const Field2D& y, std::span<const PNorm> ps,
                                              const CramerOptions& options) {
  require_same_grid(x, y);
  check_equal_integrals(riemann_integral(x), riemann_integral(y), abs_integral(x) + abs_integral(y),
                        options.mean_tolerance, "discrete_sliced_cramer_2d");
  CramerOptions inner = options;
  inner.mean_tolerance = kNoCheck;
  return sliced_volterra_norms_2d(x - y, ps, inner);
}

double discrete_sliced_cramer_2d(const Field2D& x, const Field2D& y, PNorm p, const CramerOptions& options) {
  const PNorm ps[] = {p};
  return discrete_sliced_cramer_2d(x, y, ps, options).front();
}

}  // namespace scm

#include "scm/spectral.hpp"

#include <string>

#include "fft.hpp"

namespace scm {
namespace {

/// e^{i 2 pi f} with f reduced mod 1 first, so large k * a / L keep full
/// phase accuracy.
Complex unit_phase(double f) {
  const double r = f - std::round(f);
  return std::polar(1.0, 2.0 * kPi * r);
}

}  // namespace

Spectrum1D::Spectrum1D(double L, double a, std::vector<Complex> coeffs) : L_(L), a_(a), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty() || coeffs_.size() % 2 != 0) throw std::invalid_argument("Spectrum1D needs an even, nonzero count");
}

PolarSpectrum::PolarSpectrum(double L, int n, std::vector<double> angles, std::vector<Complex> coeffs)
    : L_(L), n_(n), angles_(std::move(angles)), coeffs_(std::move(coeffs)) {
  if (n_ <= 0 || n_ % 2 != 0) throw std::invalid_argument("PolarSpectrum size must be even");
  if (coeffs_.size() != angles_.size() * static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("PolarSpectrum coefficient count mismatch");
  }
}

PolarSpectrum PolarSpectrum::combined(double a, const PolarSpectrum& other, double b) const {
  if (other.n_ != n_ || other.L_ != L_ || other.angles_ != angles_) {
    throw std::invalid_argument("cannot combine polar spectra with different layouts");
  }
  std::vector<Complex> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a * coeffs_[i] + b * other.coeffs_[i];
  return PolarSpectrum(L_, n_, angles_, std::move(c));
}

std::vector<double> default_angles(int n) {
  if (n <= 0) throw std::invalid_argument("angle count must be positive");
  std::vector<double> angles(n);
  for (int l = 0; l < n; ++l) angles[l] = kPi * l / n;
  return angles;
}

Spectrum1D coefficients_1d(const Field1D& x) {
  const Grid1D& g = x.grid();
  const int n = g.n();
  std::vector<Complex> buf(x.values().begin(), x.values().end());
  const detail::FftPlan plan(n, detail::FftDirection::kForward);
  plan.execute_inplace(buf);

  const double L = g.length();
  const double a_over_L = g.a() / L;
  std::vector<Complex> coeffs(n);
  for (int k = -n / 2; k < n / 2; ++k) {
    const Complex raw = buf[static_cast<std::size_t>((k + n) % n)];
    coeffs[static_cast<std::size_t>(k + n / 2)] = g.spacing() * unit_phase(-k * a_over_L) * raw;
  }
  return Spectrum1D(L, g.a(), std::move(coeffs));
}

PolarSpectrum polar_coefficients_direct(const Field2D& x, std::span<const double> angles) {
  const Grid2D& g = x.grid();
  const int n = g.n();
  const double h = g.spacing();
  const auto count = angles.size();
  std::vector<Complex> coeffs(count * n);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(count); ++l) {
    const double c = std::cos(angles[l]);
    const double s = std::sin(angles[l]);
    std::vector<Complex> ex(n), ey(n);
    for (int k = -n / 2; k < n / 2; ++k) {
      // t_i / L = (i - n/2) / n
      for (int i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i - n / 2) / n;
        ex[i] = unit_phase(-k * c * ti);
        ey[i] = unit_phase(-k * s * ti);
      }
      Complex total = 0.0;
      for (int i = 0; i < n; ++i) {
        Complex inner = 0.0;
        for (int j = 0; j < n; ++j) inner += x.at(i, j) * ey[j];
        total += ex[i] * inner;
      }
      coeffs[static_cast<std::size_t>(l) * n + (k + n / 2)] = h * h * total;
    }
  }
  return PolarSpectrum(g.length(), n, std::vector<double>(angles.begin(), angles.end()), std::move(coeffs));
}

std::vector<Complex> evaluate_trig_poly(std::span<const Complex> beta, double L, std::span<const double> t) {
  const int n = static_cast<int>(beta.size()) + 1;
  if (n % 2 != 0) throw std::invalid_argument("trigonometric polynomial needs n-1 coefficients with n even");
  std::vector<Complex> out(t.size());
  for (std::size_t q = 0; q < t.size(); ++q) {
    Complex s = 0.0;
    for (int k = -n / 2 + 1; k <= n / 2 - 1; ++k) {
      s += beta[static_cast<std::size_t>(k + n / 2 - 1)] * unit_phase(k * t[q] / L);
    }
    out[q] = s / L;
  }
  return out;
}

std::vector<Complex> evaluate_trig_poly_on_grid(std::span<const Complex> beta, double L, double a) {
  const int n = static_cast<int>(beta.size()) + 1;
  if (n % 2 != 0) throw std::invalid_argument("trigonometric polynomial needs n-1 coefficients with n even");
  std::vector<Complex> buf(n, Complex(0.0));
  const double a_over_L = a / L;
  for (int k = -n / 2 + 1; k <= n / 2 - 1; ++k) {
    buf[static_cast<std::size_t>((k + n) % n)] = beta[static_cast<std::size_t>(k + n / 2 - 1)] * unit_phase(k * a_over_L);
  }
  const detail::FftPlan plan(n, detail::FftDirection::kBackward);
  plan.execute_inplace(buf);
  for (auto& v : buf) v /= L;
  return buf;
}

std::vector<Field1D> radon_projections(const PolarSpectrum& spectrum, double R) {
  const int n = spectrum.n();
  const Grid1D line(-R, R, n);
  const detail::FftPlan plan(n, detail::FftDirection::kBackward);
  std::vector<Field1D> out;
  out.reserve(spectrum.angle_count());
  std::vector<Complex> buf(n);
  for (std::size_t l = 0; l < spectrum.angle_count(); ++l) {
    std::fill(buf.begin(), buf.end(), Complex(0.0));
    // grid origin -R gives the phase e^{2 pi i k (-R) / L} = (-1)^k
    for (int k = -n / 2 + 1; k <= n / 2 - 1; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      buf[static_cast<std::size_t>((k + n) % n)] = sign * spectrum.at(l, k);
    }
    plan.execute_inplace(buf);
    std::vector<double> values(n);
    for (int j = 0; j < n; ++j) values[j] = buf[j].real() / spectrum.period();
    out.emplace_back(line, std::move(values));
  }
  return out;
}

Field1D radon_projection(const Field2D& x, double theta, double tol) {
  const double angle[] = {theta};
  return radon_projections(polar_coefficients_fast(x, angle, tol), x.grid().half_extent()).front();
}

}  // namespace scm

#include "scm/grids.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fft.hpp"

namespace scm {
namespace {

void require_even_positive(int n) {
  if (n <= 0 || n % 2 != 0) {
    throw std::invalid_argument("grid size must be a positive even integer, got " + std::to_string(n));
  }
}

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("field values must be finite");
  }
}

template <typename F>
std::vector<double> combine(std::span<const double> x, std::span<const double> y, F op) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = op(x[i], y[i]);
  return out;
}

std::vector<double> scaled(double s, std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v *= s;
  return out;
}

double gaussian_1d(double t, double sigma) {
  return std::exp(-0.5 * t * t / (sigma * sigma)) / (std::sqrt(2.0 * kPi) * sigma);
}

double gaussian_2d(Vec2 x, double sigma) {
  return std::exp(-0.5 * dot(x, x) / (sigma * sigma)) / (2.0 * kPi * sigma * sigma);
}

double power_sum_distance(std::span<const double> x, std::span<const double> y, PNorm p, double cell) {
  PowerAccumulator acc(p);
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(x[i] - y[i]);
  return acc.result(cell);
}

}  // namespace

Grid1D::Grid1D(double a, double b, int n) : a_(a), b_(b), n_(n) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("Grid1D requires finite a < b");
  }
  require_even_positive(n);
}

Grid2D::Grid2D(double half_extent, int n) : R_(half_extent), n_(n) {
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    throw std::invalid_argument("Grid2D requires a positive finite half-extent");
  }
  require_even_positive(n);
}

Field1D::Field1D(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.n()) {
    throw std::invalid_argument("Field1D value count does not match grid size");
  }
  require_finite(values_);
}

Field1D Field1D::zeros(Grid1D grid) { return Field1D(grid, std::vector<double>(grid.n(), 0.0)); }

Field1D operator+(const Field1D& x, const Field1D& y) {
  require_same_grid(x, y);
  return Field1D(x.grid(), combine(x.values(), y.values(), std::plus<>()));
}

Field1D operator-(const Field1D& x, const Field1D& y) {
  require_same_grid(x, y);
  return Field1D(x.grid(), combine(x.values(), y.values(), std::minus<>()));
}

Field1D operator*(double s, const Field1D& x) { return Field1D(x.grid(), scaled(s, x.values())); }

Field2D::Field2D(Grid2D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  const auto n = static_cast<std::size_t>(grid_.n());
  if (values_.size() != n * n) {
    throw std::invalid_argument("Field2D value count does not match grid size squared");
  }
  require_finite(values_);
}

Field2D Field2D::zeros(Grid2D grid) {
  const auto n = static_cast<std::size_t>(grid.n());
  return Field2D(grid, std::vector<double>(n * n, 0.0));
}

Field2D operator+(const Field2D& x, const Field2D& y) {
  require_same_grid(x, y);
  return Field2D(x.grid(), combine(x.values(), y.values(), std::plus<>()));
}

Field2D operator-(const Field2D& x, const Field2D& y) {
  require_same_grid(x, y);
  return Field2D(x.grid(), combine(x.values(), y.values(), std::minus<>()));
}

Field2D operator*(double s, const Field2D& x) { return Field2D(x.grid(), scaled(s, x.values())); }

void require_same_grid(const Field1D& x, const Field1D& y) {
  if (!(x.grid() == y.grid())) throw GridMismatch("1D fields live on different grids");
}

void require_same_grid(const Field2D& x, const Field2D& y) {
  if (!(x.grid() == y.grid())) throw GridMismatch("2D fields live on different grids");
}

void GaussianMixtureSpec::validate() const {
  if (centers.empty()) throw std::invalid_argument("mixture has no centers");
  if (weights.size() != centers.size()) {
    throw std::invalid_argument("mixture weights and centers differ in count");
  }
  if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("mixture width must be positive");
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("mixture weight is not finite");
    if (w < 0.0) throw std::invalid_argument("mixture weight is negative");
  }
  for (const Vec2& c : centers) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) throw std::invalid_argument("mixture center is not finite");
  }
  if (normalized) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("normalized mixture weights do not sum to 1");
  }
}

GaussianMixtureSpec GaussianMixtureSpec::normalized_copy() const {
  GaussianMixtureSpec out = *this;
  out.normalized = false;
  out.validate();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("cannot normalize a mixture with zero total weight");
  for (double& w : out.weights) w /= total;
  out.normalized = true;
  return out;
}

double GaussianMixtureSpec::evaluate(double t) const {
  double s = 0.0;
  for (std::size_t m = 0; m < centers.size(); ++m) s += weights[m] * gaussian_1d(t - centers[m].x, width);
  return s;
}

double GaussianMixtureSpec::evaluate(Vec2 x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < centers.size(); ++m) s += weights[m] * gaussian_2d(x - centers[m], width);
  return s;
}

double GaussianMixtureSpec::support_radius(double nsigma) const {
  double r = 0.0;
  for (const Vec2& c : centers) r = std::max(r, norm(c));
  return r + nsigma * width;
}

GaussianMixtureSpec grid_phantom(int rows, int cols, double r, double width) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("phantom needs at least 2 rows and 2 columns");
  GaussianMixtureSpec spec;
  spec.width = width;
  const double lo = -r / 6.0;
  const double span = r / 3.0;
  for (int i = 1; i <= rows; ++i) {
    const double y = -lo - span * (i - 1) / (rows - 1);  // row 1 on top
    for (int j = 1; j <= cols; ++j) {
      const double x = lo + span * (j - 1) / (cols - 1);
      spec.centers.push_back({x, y});
      spec.weights.push_back(std::sqrt(static_cast<double>(i * i + j * j)));
    }
  }
  return spec.normalized_copy();
}

GaussianMixtureSpec source_phantom(double r, double width) { return grid_phantom(5, 4, r, width); }
GaussianMixtureSpec target_phantom(double r, double width) { return grid_phantom(4, 3, r, width); }

Field1D sample_mixture(const GaussianMixtureSpec& spec, const Grid1D& grid) {
  spec.validate();
  for (const Vec2& c : spec.centers) {
    if (c.y != 0.0) throw std::invalid_argument("1D sampling requires centers with y == 0");
  }
  std::vector<double> v(grid.n());
  for (int j = 0; j < grid.n(); ++j) v[j] = spec.evaluate(grid.node(j));
  return Field1D(grid, std::move(v));
}

Field2D sample_mixture(const GaussianMixtureSpec& spec, const Grid2D& grid) {
  spec.validate();
  const int n = grid.n();
  std::vector<double> v(static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = spec.evaluate(Vec2{grid.node(i), grid.node(j)});
  }
  return Field2D(grid, std::move(v));
}

double riemann_integral(const Field1D& x) {
  const auto v = x.values();
  return x.grid().spacing() * std::accumulate(v.begin(), v.end(), 0.0);
}

double riemann_integral(const Field2D& x) {
  const auto v = x.values();
  const double h = x.grid().spacing();
  return h * h * std::accumulate(v.begin(), v.end(), 0.0);
}

double lebesgue_distance(const Field1D& x, const Field1D& y, PNorm p) {
  require_same_grid(x, y);
  return power_sum_distance(x.values(), y.values(), p, x.grid().spacing());
}

double lebesgue_distance(const Field2D& x, const Field2D& y, PNorm p) {
  require_same_grid(x, y);
  const double h = x.grid().spacing();
  return power_sum_distance(x.values(), y.values(), p, h * h);
}

Field2D convolve2d(const Field2D& x, const Field2D& w) {
  require_same_grid(x, w);
  const int n = x.grid().n();
  const int big = 2 * n;
  const auto cells = static_cast<std::size_t>(big) * big;
  std::vector<Complex> fx(cells), fw(cells);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      fx[static_cast<std::size_t>(i) * big + j] = x.at(i, j);
      fw[static_cast<std::size_t>(i) * big + j] = w.at(i, j);
    }
  }
  const detail::FftPlan forward(big, big, detail::FftDirection::kForward);
  const detail::FftPlan backward(big, big, detail::FftDirection::kBackward);
  forward.execute_inplace(fx);
  forward.execute_inplace(fw);
  for (std::size_t c = 0; c < cells; ++c) fx[c] *= fw[c];
  backward.execute_inplace(fx);

  const double h = x.grid().spacing();
  const double scale = h * h / static_cast<double>(cells);
  const int shift = n / 2;
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out[static_cast<std::size_t>(i) * n + j] = scale * fx[static_cast<std::size_t>(i + shift) * big + (j + shift)].real();
    }
  }
  return Field2D(x.grid(), std::move(out));
}

double resample_bilinear(const Field2D& x, Vec2 point) {
  const Grid2D& g = x.grid();
  const double R = g.half_extent();
  if (!(point.x >= -R && point.x <= R && point.y >= -R && point.y <= R)) return 0.0;
  const int n = g.n();
  const double h = g.spacing();
  const double u = (point.x + R) / h;
  const double v = (point.y + R) / h;
  const int i0 = std::min(static_cast<int>(std::floor(u)), n - 1);
  const int j0 = std::min(static_cast<int>(std::floor(v)), n - 1);
  const double fu = u - i0;
  const double fv = v - j0;
  auto node = [&](int i, int j) { return (i < n && j < n) ? x.at(i, j) : 0.0; };
  return (1.0 - fu) * ((1.0 - fv) * node(i0, j0) + fv * node(i0, j0 + 1)) +
         fu * ((1.0 - fv) * node(i0 + 1, j0) + fv * node(i0 + 1, j0 + 1));
}

std::vector<double> resample_bilinear(const Field2D& x, std::span<const Vec2> points) {
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) out[k] = resample_bilinear(x, points[k]);
  return out;
}

}  // namespace scm

#pragma once

// Uniform grids, sampled fields, analytic Gaussian-mixture phantoms, and
// the left-Riemann quadrature every discrete norm in this library uses.

#include <cstddef>
#include <span>
#include <vector>

#include "scm/common.hpp"

namespace scm {

/// Interval [a, b) sampled at t_j = a + j (b - a) / n, j = 0..n-1, n even.
class Grid1D {
 public:
  Grid1D(double a, double b, int n);

  double a() const { return a_; }
  double b() const { return b_; }
  int n() const { return n_; }
  double length() const { return b_ - a_; }
  double spacing() const { return length() / n_; }
  double node(int j) const { return a_ + j * length() / n_; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double a_;
  double b_;
  int n_;
};

/// Square [-R, R)^2 sampled at (t_i, t_j), t_j = -R + 2 R j / n, n even.
class Grid2D {
 public:
  Grid2D(double half_extent, int n);

  double half_extent() const { return R_; }
  int n() const { return n_; }
  double length() const { return 2.0 * R_; }
  double spacing() const { return length() / n_; }
  double node(int j) const { return -R_ + j * length() / n_; }

  /// The 1D grid carrying projections of fields on this grid.
  Grid1D line() const { return Grid1D(-R_, R_, n_); }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  double R_;
  int n_;
};

class Field1D {
 public:
  using GridType = Grid1D;

  Field1D(Grid1D grid, std::vector<double> values);
  static Field1D zeros(Grid1D grid);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  friend Field1D operator+(const Field1D& x, const Field1D& y);
  friend Field1D operator-(const Field1D& x, const Field1D& y);
  friend Field1D operator*(double s, const Field1D& x);

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Row-major samples: values[i * n + j] = f(t_i, t_j).
class Field2D {
 public:
  using GridType = Grid2D;

  Field2D(Grid2D grid, std::vector<double> values);
  static Field2D zeros(Grid2D grid);

  const Grid2D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.n() + j]; }

  friend Field2D operator+(const Field2D& x, const Field2D& y);
  friend Field2D operator-(const Field2D& x, const Field2D& y);
  friend Field2D operator*(double s, const Field2D& x);

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Weighted sum of isotropic Gaussian densities sharing one standard
/// deviation. For 1D sampling only the x coordinate of each center is used
/// and every center must have y == 0.
struct GaussianMixtureSpec {
  std::vector<Vec2> centers;
  std::vector<double> weights;
  double width = 1.0;
  bool normalized = false;

  /// Throws std::invalid_argument on an empty/mismatched center list,
  /// non-finite or negative weights, non-positive width, or (when
  /// normalized is set) weights that do not sum to 1.
  void validate() const;

  /// Copy with weights rescaled to sum to 1 and normalized set.
  GaussianMixtureSpec normalized_copy() const;

  double evaluate(double t) const;
  double evaluate(Vec2 x) const;

  /// max |c_m| + nsigma * width.
  double support_radius(double nsigma = 8.0) const;
};

/// Grid-of-Gaussians phantom: `rows` x `cols` centers equispaced in
/// [-r/6, r/6]^2, rows numbered 1.. from top to bottom and columns 1.. from
/// left to right; the weight at (i, j) is proportional to sqrt(i^2 + j^2).
GaussianMixtureSpec grid_phantom(int rows, int cols, double r, double width);

/// 5 x 4 source phantom.
GaussianMixtureSpec source_phantom(double r = 2.5, double width = 2.5 / 50.0);
/// 4 x 3 target phantom.
GaussianMixtureSpec target_phantom(double r = 2.5, double width = 2.5 / 50.0);

Field1D sample_mixture(const GaussianMixtureSpec& spec, const Grid1D& grid);
Field2D sample_mixture(const GaussianMixtureSpec& spec, const Grid2D& grid);

/// (L/n) sum x[j]  or  (L/n)^2 sum x[i, j].
double riemann_integral(const Field1D& x);
double riemann_integral(const Field2D& x);

/// ((L/n)^d sum |x - y|^p)^(1/p), or max |x - y| for p = infinity.
double lebesgue_distance(const Field1D& x, const Field1D& y, PNorm p);
double lebesgue_distance(const Field2D& x, const Field2D& y, PNorm p);

/// Zero-padded linear convolution scaled by the area element, so that the
/// result samples f * w at the grid nodes. The kernel's origin is the node
/// (n/2, n/2), where t = 0.
Field2D convolve2d(const Field2D& x, const Field2D& w);

/// Bilinear interpolation of the node values; points outside [-R, R]^2
/// evaluate to 0 and nodes beyond the last sample are treated as 0.
std::vector<double> resample_bilinear(const Field2D& x, std::span<const Vec2> points);
double resample_bilinear(const Field2D& x, Vec2 point);

/// Thrown when two fields that must share a grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_grid(const Field1D& x, const Field1D& y);
void require_same_grid(const Field2D& x, const Field2D& y);

}  // namespace scm

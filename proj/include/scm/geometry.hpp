#pragma once

// Affine deformations, push-forwards f_Phi(x) = f(Phi(x)) |det grad Phi|,
// displacement measures, mean mixed norms, and the deformation bounds for
// sliced Cramer distances.
//
// A Deformation is the map Phi(x) = A x + b together with the region D over
// which its displacement x - Phi(x) is measured. D is the ellipse
// {M y + c : |y| <= 1}; the named families use the centered disc of the
// given radius. inverse() returns Phi^{-1} measured over Phi(D), so the
// directional displacements of a map and its inverse coincide.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scm/grids.hpp"

namespace scm {

struct Mat2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 scale(double s) { return {s, 0.0, 0.0, s}; }
  /// Counterclockwise rotation.
  static Mat2 rotation(double theta);

  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 inverse() const;
  Mat2 transposed() const { return {a11, a21, a12, a22}; }
  Vec2 operator()(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }

  friend Mat2 operator*(const Mat2& l, const Mat2& r);
  friend Mat2 operator-(const Mat2& l, const Mat2& r);
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

enum class DeformationKind { kTranslation, kRotation, kDilation, kAffine };

class Deformation {
 public:
  static Deformation translation(Vec2 v, double radius = 1.0);
  /// Phi = counterclockwise rotation by theta about the origin.
  static Deformation rotation(double theta, double radius = 1.0);
  /// Phi(x) = alpha x, alpha > 0.
  static Deformation dilation(double alpha, double radius = 1.0);
  /// Phi(x) = A x + b; throws if det A is (numerically) zero.
  static Deformation affine(Mat2 A, Vec2 b, double radius = 1.0);

  /// `translate:vx,vy`, `rotate:theta`, `dilate:alpha`,
  /// `affine:a11,a12,a21,a22,b1,b2`. Throws std::invalid_argument.
  static Deformation parse(std::string_view text, double radius = 1.0);

  DeformationKind kind() const { return kind_; }
  const Mat2& matrix() const { return A_; }
  Vec2 offset() const { return b_; }
  /// Rotation angle or dilation factor for those families, else 0.
  double parameter() const { return parameter_; }

  Vec2 operator()(Vec2 x) const { return A_(x) + b_; }
  double jacobian() const { return std::abs(A_.det()); }

  /// A = s Q with Q orthogonal; isotropic Gaussians stay isotropic.
  bool is_similarity() const;

  /// Measurement region {M y + c : |y| <= 1}.
  const Mat2& domain_matrix() const { return M_; }
  Vec2 domain_center() const { return c_; }
  /// True when the region is a disc centered at the origin.
  bool centered_disc() const;
  /// Radius for a centered disc; otherwise the largest semi-axis.
  double domain_radius() const;

  Deformation inverse() const;
  std::string describe() const;

 private:
  Deformation(DeformationKind kind, Mat2 A, Vec2 b, Mat2 M, Vec2 c, double parameter);

  DeformationKind kind_;
  Mat2 A_;
  Vec2 b_;
  Mat2 M_;
  Vec2 c_;
  double parameter_;
};

/// Discrete probability measure on the unit circle.
class DirectionSet {
 public:
  DirectionSet(std::vector<Vec2> directions, std::vector<double> weights);

  /// count equal-weight directions at angles pi m / count, m = 0..count-1.
  static DirectionSet uniform(int count = 1024);
  static DirectionSet from_angles(std::span<const double> angles);

  std::size_t size() const { return directions_.size(); }
  Vec2 direction(std::size_t m) const { return directions_[m]; }
  double weight(std::size_t m) const { return weights_[m]; }

 private:
  std::vector<Vec2> directions_;
  std::vector<double> weights_;
};

inline constexpr int kUniformDirections = 1024;
inline constexpr int kBoundarySamples = 4096;

/// Analytic push-forward for similarity maps: centers A^{-1}(c - b), width
/// sigma / s, weights unchanged. Returns nullopt for other affine maps.
std::optional<GaussianMixtureSpec> push_forward_mixture(const GaussianMixtureSpec& spec, const Deformation& d);

/// Samples f_Phi on the grid: analytically for similarity maps, otherwise by
/// evaluating the mixture at Phi(node) times |det A|.
Field2D sample_push_forward(const GaussianMixtureSpec& spec, const Deformation& d, const Grid2D& grid);

/// values[j] = bilinear(x, Phi(node_j)) |det A|.
Field2D push_forward_grid(const Field2D& x, const Deformation& d);

/// max over the region of |x - Phi(x)|: closed form for the named families
/// on a centered disc, otherwise the max over kBoundarySamples boundary
/// points.
double displacement_sup(const Deformation& d);

/// max over the region of |<x - Phi(x), u>| (exact for every affine map).
double displacement_along(const Deformation& d, Vec2 u);

/// (sum_m w_m displacement_along(u_m)^p)^(1/p); the max for p = infinity.
double mean_displacement(const Deformation& d, const DirectionSet& eta, PNorm p);

/// Unit vector along x* - Phi(x*) at the first sampled boundary maximizer
/// (zero vector when Phi is the identity on the region).
Vec2 displacement_argmax_direction(const Deformation& d);

/// (sum_m w_m |<ustar, u_m>|^p)^(1/p).
double prop_lower_factor(PNorm p, const DirectionSet& eta, Vec2 ustar);

/// (Gamma(p/2 + 1/2) / (Gamma(p/2 + 1) sqrt(pi)))^(1/p); 1 for p = infinity.
double kp_constant(PNorm p);

/// Projections of |x| along each direction of eta, computed once in the
/// spatial domain (bilinear rotate-and-sum at the grid spacing), from which
/// mean mixed norms for any (p, r) follow.
class ProjectionNorms {
 public:
  ProjectionNorms(const Field2D& x, DirectionSet eta);

  /// ||P_u |x| ||_{L^p} for direction m.
  double projection_norm(std::size_t m, PNorm p) const;

  /// (sum_m w_m ||P_m|x| ||_p^r)^(1/r); the max over directions for r = inf.
  double mixed(PNorm p, PNorm r) const;

  const DirectionSet& directions() const { return eta_; }

 private:
  DirectionSet eta_;
  double spacing_;
  std::vector<std::vector<double>> projections_;
};

double mean_mixed_norm(const Field2D& x, PNorm p, PNorm r, const DirectionSet& eta = DirectionSet::uniform());

/// Norms of f entering the general deformation bound.
struct DeformationNorms {
  double mixed_p = 0.0;      ///< M^{p,p}
  double mixed_p_inf = 0.0;  ///< M^{p,inf}
  double l1 = 0.0;           ///< ||f||_{L^1}

  static DeformationNorms compute(const ProjectionNorms& projections, double l1, PNorm p);
};

struct MainBounds {
  double sup_displacement;   ///< 2^{(p-1)/p} M^{p} eps_inf
  double mean_displacement;  ///< 2^{(p-1)/p} M^{p,inf} eps_{eta,p}
  double mass;               ///< ||f||_1 eps_{eta,1}^{1/p}

  double min() const;
};

MainBounds bound_main(const DeformationNorms& norms, const Deformation& d, const DirectionSet& eta, PNorm p);

/// Same bound with the smaller of the norms of f and of f_Phi.
MainBounds bound_main(const DeformationNorms& f, const DeformationNorms& f_phi, const Deformation& d,
                      const DirectionSet& eta, PNorm p);

/// mixed_norm * radius * Delta_p(theta) for f supported in the disc of the
/// given radius; 0 <= theta < pi.
double bound_rotation(double theta, PNorm p, double mixed_norm, double radius = 1.0);

/// (M^p |v|, K_p M^{p,inf} |v|).
std::array<double, 2> bound_translation(Vec2 v, PNorm p, double mixed_p, double mixed_p_inf);

/// mixed_norm * radius * (alpha - 1) / alpha^{(p-1)/p}, alpha >= 1.
double bound_dilation(double alpha, PNorm p, double mixed_norm, double radius = 1.0);

/// lp_norm * eps for an increasing 1D map.
double bound_monotone_1d(double eps, PNorm p, double lp_norm);

/// Phi(t) = slope t + shift on [-radius, radius]; throws
/// std::invalid_argument unless slope > 0.
double bound_monotone_1d(double slope, double shift, double radius, PNorm p, double lp_norm);

/// ||w||_{M^{1,p}}: the factor by which convolution with w can scale a
/// sliced Cramer distance.
double convolution_factor(const Field2D& w, PNorm p, const DirectionSet& eta = DirectionSet::uniform());

}  // namespace scm

#include "scm/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace scm {
namespace {

constexpr double kSingularDet = 1e-12;

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw std::invalid_argument("bad number '" + item + "' in deformation spec");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

Vec2 boundary_point(const Deformation& d, int s) {
  const double phi = 2.0 * kPi * s / kBoundarySamples;
  return d.domain_matrix()(Vec2{std::cos(phi), std::sin(phi)}) + d.domain_center();
}

/// Interval of t with s u + t v inside [-R, R]^2, v = u rotated by +90 degrees.
bool chord(double s, Vec2 u, double R, double& t0, double& t1) {
  const Vec2 v{-u.y, u.x};
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  const double base[2] = {s * u.x, s * u.y};
  const double dir[2] = {v.x, v.y};
  for (int c = 0; c < 2; ++c) {
    if (std::abs(dir[c]) < 1e-15) {
      if (std::abs(base[c]) > R) return false;
      continue;
    }
    double a = (-R - base[c]) / dir[c], b = (R - base[c]) / dir[c];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 <= t1;
}

}  // namespace

Mat2 Mat2::rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

Mat2 Mat2::inverse() const {
  const double d = det();
  if (std::abs(d) < kSingularDet) throw std::invalid_argument("singular matrix");
  return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22, l.a21 * r.a11 + l.a22 * r.a21,
          l.a21 * r.a12 + l.a22 * r.a22};
}

Mat2 operator-(const Mat2& l, const Mat2& r) { return {l.a11 - r.a11, l.a12 - r.a12, l.a21 - r.a21, l.a22 - r.a22}; }

Deformation::Deformation(DeformationKind kind, Mat2 A, Vec2 b, Mat2 M, Vec2 c, double parameter)
    : kind_(kind), A_(A), b_(b), M_(M), c_(c), parameter_(parameter) {}

Deformation Deformation::translation(Vec2 v, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("domain radius must be positive");
  return Deformation(DeformationKind::kTranslation, Mat2::identity(), v, Mat2::scale(radius), {}, 0.0);
}

Deformation Deformation::rotation(double theta, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("domain radius must be positive");
  return Deformation(DeformationKind::kRotation, Mat2::rotation(theta), {}, Mat2::scale(radius), {}, theta);
}

Deformation Deformation::dilation(double alpha, double radius) {
  if (!(alpha > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("domain radius must be positive");
  return Deformation(DeformationKind::kDilation, Mat2::scale(alpha), {}, Mat2::scale(radius), {}, alpha);
}

Deformation Deformation::affine(Mat2 A, Vec2 b, double radius) {
  if (std::abs(A.det()) < kSingularDet) throw std::invalid_argument("affine deformation needs det A != 0");
  if (!(radius > 0.0)) throw std::invalid_argument("domain radius must be positive");
  return Deformation(DeformationKind::kAffine, A, b, Mat2::scale(radius), {}, 0.0);
}

Deformation Deformation::parse(std::string_view text, double radius) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("deformation spec needs 'kind:values'");
  const std::string_view kind = text.substr(0, colon);
  const auto v = parse_numbers(text.substr(colon + 1));
  auto need = [&](std::size_t count) {
    if (v.size() != count) {
      throw std::invalid_argument(std::string(kind) + " expects " + std::to_string(count) + " values");
    }
  };
  if (kind == "translate") {
    need(2);
    return translation({v[0], v[1]}, radius);
  }
  if (kind == "rotate") {
    need(1);
    return rotation(v[0], radius);
  }
  if (kind == "dilate") {
    need(1);
    return dilation(v[0], radius);
  }
  if (kind == "affine") {
    need(6);
    return affine({v[0], v[1], v[2], v[3]}, {v[4], v[5]}, radius);
  }
  throw std::invalid_argument("unknown deformation kind '" + std::string(kind) + "'");
}

bool Deformation::is_similarity() const {
  // A^T A = s^2 I
  const Mat2 g = A_.transposed() * A_;
  const double s2 = 0.5 * (g.a11 + g.a22);
  return std::abs(g.a12) <= 1e-12 * s2 && std::abs(g.a11 - g.a22) <= 1e-12 * s2;
}

bool Deformation::centered_disc() const {
  return c_ == Vec2{} && M_.a12 == 0.0 && M_.a21 == 0.0 && M_.a11 == M_.a22 && M_.a11 > 0.0;
}

double Deformation::domain_radius() const {
  // largest singular value of M
  const Mat2 g = M_.transposed() * M_;
  const double tr = g.a11 + g.a22, det = g.det();
  return std::sqrt(0.5 * tr + std::sqrt(std::max(0.0, 0.25 * tr * tr - det)));
}

Deformation Deformation::inverse() const {
  const Mat2 Ainv = A_.inverse();
  const Vec2 binv = -1.0 * Ainv(b_);
  double parameter = 0.0;
  if (kind_ == DeformationKind::kRotation) parameter = -parameter_;
  if (kind_ == DeformationKind::kDilation) parameter = 1.0 / parameter_;
  // measured over Phi(D) = {A M y + A c + b}
  return Deformation(kind_, Ainv, binv, A_ * M_, A_(c_) + b_, parameter);
}

std::string Deformation::describe() const {
  std::ostringstream s;
  s.precision(17);
  switch (kind_) {
    case DeformationKind::kTranslation: s << "translate:" << b_.x << "," << b_.y; break;
    case DeformationKind::kRotation: s << "rotate:" << parameter_; break;
    case DeformationKind::kDilation: s << "dilate:" << parameter_; break;
    case DeformationKind::kAffine:
      s << "affine:" << A_.a11 << "," << A_.a12 << "," << A_.a21 << "," << A_.a22 << "," << b_.x << "," << b_.y;
      break;
  }
  return s.str();
}

DirectionSet::DirectionSet(std::vector<Vec2> directions, std::vector<double> weights)
    : directions_(std::move(directions)), weights_(std::move(weights)) {
  if (directions_.empty() || directions_.size() != weights_.size()) {
    throw std::invalid_argument("direction set needs matching, nonempty directions and weights");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < directions_.size(); ++m) {
    if (std::abs(norm(directions_[m]) - 1.0) > 1e-12) throw std::invalid_argument("directions must be unit vectors");
    if (!(weights_[m] >= 0.0)) throw std::invalid_argument("direction weights must be nonnegative");
    total += weights_[m];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("direction weights must sum to 1");
}

DirectionSet DirectionSet::uniform(int count) {
  if (count <= 0) throw std::invalid_argument("direction count must be positive");
  std::vector<double> angles(count);
  for (int m = 0; m < count; ++m) angles[m] = kPi * m / count;
  return from_angles(angles);
}

DirectionSet DirectionSet::from_angles(std::span<const double> angles) {
  std::vector<Vec2> dirs;
  dirs.reserve(angles.size());
  for (double a : angles) dirs.push_back({std::cos(a), std::sin(a)});
  return DirectionSet(std::move(dirs), std::vector<double>(angles.size(), 1.0 / static_cast<double>(angles.size())));
}

std::optional<GaussianMixtureSpec> push_forward_mixture(const GaussianMixtureSpec& spec, const Deformation& d) {
  if (!d.is_similarity()) return std::nullopt;
  const Mat2 Ainv = d.matrix().inverse();
  const double s = std::sqrt(std::abs(d.matrix().det()));
  GaussianMixtureSpec out = spec;
  for (auto& c : out.centers) c = Ainv(c - d.offset());
  out.width = spec.width / s;
  return out;
}

Field2D sample_push_forward(const GaussianMixtureSpec& spec, const Deformation& d, const Grid2D& grid) {
  if (auto analytic = push_forward_mixture(spec, d)) return sample_mixture(*analytic, grid);
  const int n = grid.n();
  const double jac = d.jacobian();
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) values[static_cast<std::size_t>(i) * n + j] = jac * spec.evaluate(d({grid.node(i), grid.node(j)}));
  }
  return Field2D(grid, std::move(values));
}

Field2D push_forward_grid(const Field2D& x, const Deformation& d) {
  const Grid2D& g = x.grid();
  const int n = g.n();
  std::vector<Vec2> points(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) points[static_cast<std::size_t>(i) * n + j] = d({g.node(i), g.node(j)});
  }
  auto values = resample_bilinear(x, points);
  const double jac = d.jacobian();
  if (jac != 1.0) {
    for (double& v : values) v *= jac;
  }
  return Field2D(g, std::move(values));
}

double displacement_sup(const Deformation& d) {
  if (d.centered_disc()) {
    const double R = d.domain_radius();
    switch (d.kind()) {
      case DeformationKind::kTranslation: return norm(d.offset());
      case DeformationKind::kRotation: return 2.0 * R * std::abs(std::sin(0.5 * d.parameter()));
      case DeformationKind::kDilation: return std::abs(d.parameter() - 1.0) * R;
      case DeformationKind::kAffine: break;
    }
  }
  double best = 0.0;
  for (int s = 0; s < kBoundarySamples; ++s) {
    const Vec2 x = boundary_point(d, s);
    best = std::max(best, norm(x - d(x)));
  }
  return best;
}

double displacement_along(const Deformation& d, Vec2 u) {
  // x - Phi(x) = (I - A)(M y + c) - b over |y| <= 1
  const Mat2 B = Mat2::identity() - d.matrix();
  const Vec2 a = (B * d.domain_matrix()).transposed()(u);
  const double shift = dot(B(d.domain_center()) - d.offset(), u);
  return norm(a) + std::abs(shift);
}

double mean_displacement(const Deformation& d, const DirectionSet& eta, PNorm p) {
  PowerAccumulator acc(p);
  for (std::size_t m = 0; m < eta.size(); ++m) acc.add(displacement_along(d, eta.direction(m)), eta.weight(m));
  return acc.result();
}

Vec2 displacement_argmax_direction(const Deformation& d) {
  double best = 0.0;
  Vec2 dir{};
  for (int s = 0; s < kBoundarySamples; ++s) {
    const Vec2 x = boundary_point(d, s);
    const Vec2 disp = x - d(x);
    const double len = norm(disp);
    if (len > best) {
      best = len;
      dir = (1.0 / len) * disp;
    }
  }
  return dir;
}

double prop_lower_factor(PNorm p, const DirectionSet& eta, Vec2 ustar) {
  PowerAccumulator acc(p);
  for (std::size_t m = 0; m < eta.size(); ++m) acc.add(dot(ustar, eta.direction(m)), eta.weight(m));
  return acc.result();
}

double kp_constant(PNorm p) {
  if (p.is_infinite()) return 1.0;
  const double q = p.value();
  const double log_ratio = std::lgamma(0.5 * q + 0.5) - std::lgamma(0.5 * q + 1.0) - 0.5 * std::log(kPi);
  return std::exp(log_ratio / q);
}

ProjectionNorms::ProjectionNorms(const Field2D& x, DirectionSet eta) : eta_(std::move(eta)) {
  const Grid2D& g = x.grid();
  const int n = g.n();
  const double R = g.half_extent();
  const double h = g.spacing();
  spacing_ = h;
  std::vector<double> mag(x.values().begin(), x.values().end());
  for (double& v : mag) v = std::abs(v);

  auto bilinear = [&](double px, double py) {
    const double fx = (px + R) / h, fy = (py + R) / h;
    if (fx < 0.0 || fy < 0.0 || fx > n || fy > n) return 0.0;
    const int i = std::min(static_cast<int>(fx), n - 1), j = std::min(static_cast<int>(fy), n - 1);
    const double ax = fx - i, ay = fy - j;
    auto at = [&](int a, int b) { return (a < n && b < n) ? mag[static_cast<std::size_t>(a) * n + b] : 0.0; };
    return (1 - ax) * ((1 - ay) * at(i, j) + ay * at(i, j + 1)) + ax * ((1 - ay) * at(i + 1, j) + ay * at(i + 1, j + 1));
  };

  projections_.assign(eta_.size(), std::vector<double>(n, 0.0));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(eta_.size()); ++m) {
    const Vec2 u = eta_.direction(m);
    const Vec2 v{-u.y, u.x};
    auto& proj = projections_[m];
    for (int j = 0; j < n; ++j) {
      const double s = g.node(j);
      double t0, t1;
      if (!chord(s, u, R, t0, t1)) continue;
      // t on multiples of h, so axis-aligned directions hit grid nodes
      const int k0 = static_cast<int>(std::ceil(t0 / h)), k1 = static_cast<int>(std::floor(t1 / h));
      double sum = 0.0;
      for (int k = k0; k <= k1; ++k) {
        const double t = k * h;
        sum += bilinear(s * u.x + t * v.x, s * u.y + t * v.y);
      }
      proj[j] = h * sum;
    }
  }
}

double ProjectionNorms::projection_norm(std::size_t m, PNorm p) const {
  PowerAccumulator acc(p);
  for (double v : projections_[m]) acc.add(v);
  return acc.result(spacing_);
}

double ProjectionNorms::mixed(PNorm p, PNorm r) const {
  PowerAccumulator acc(r);
  for (std::size_t m = 0; m < eta_.size(); ++m) acc.add(projection_norm(m, p), eta_.weight(m));
  return acc.result();
}

double mean_mixed_norm(const Field2D& x, PNorm p, PNorm r, const DirectionSet& eta) {
  return ProjectionNorms(x, eta).mixed(p, r);
}

DeformationNorms DeformationNorms::compute(const ProjectionNorms& projections, double l1, PNorm p) {
  return {projections.mixed(p, p), projections.mixed(p, PNorm::infinity()), l1};
}

double MainBounds::min() const { return std::min({sup_displacement, mean_displacement, mass}); }

MainBounds bound_main(const DeformationNorms& norms, const Deformation& d, const DirectionSet& eta, PNorm p) {
  const double factor = std::pow(2.0, p.conjugate_ratio());
  const double eps1 = mean_displacement(d, eta, PNorm(1));
  const double mass = p.is_infinite() ? norms.l1 * (eps1 > 0.0 ? 1.0 : 0.0) : norms.l1 * std::pow(eps1, 1.0 / p.value());
  return {factor * norms.mixed_p * displacement_sup(d), factor * norms.mixed_p_inf * mean_displacement(d, eta, p), mass};
}

MainBounds bound_main(const DeformationNorms& f, const DeformationNorms& f_phi, const Deformation& d,
                      const DirectionSet& eta, PNorm p) {
  const DeformationNorms smaller{std::min(f.mixed_p, f_phi.mixed_p), std::min(f.mixed_p_inf, f_phi.mixed_p_inf),
                                 std::min(f.l1, f_phi.l1)};
  return bound_main(smaller, d, eta, p);
}

double bound_rotation(double theta, PNorm p, double mixed_norm, double radius) {
  if (!(theta >= 0.0 && theta < kPi)) throw std::invalid_argument("rotation bound needs 0 <= theta < pi");
  const double half = 0.5 * theta;
  double delta;
  if (theta < 0.5 * kPi) {
    delta = 2.0 * std::sin(half) * std::pow(2.0 * std::cos(half), p.conjugate_ratio());
  } else {
    delta = p.is_infinite() ? 2.0 : 2.0 * std::pow(std::sin(half), 1.0 / p.value());
  }
  return mixed_norm * radius * delta;
}

std::array<double, 2> bound_translation(Vec2 v, PNorm p, double mixed_p, double mixed_p_inf) {
  const double len = norm(v);
  return {mixed_p * len, kp_constant(p) * mixed_p_inf * len};
}

double bound_dilation(double alpha, PNorm p, double mixed_norm, double radius) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("dilation bound needs alpha >= 1");
  return mixed_norm * radius * (alpha - 1.0) / std::pow(alpha, p.conjugate_ratio());
}

double bound_monotone_1d(double eps, PNorm, double lp_norm) { return lp_norm * eps; }

double bound_monotone_1d(double slope, double shift, double radius, PNorm p, double lp_norm) {
  if (!(slope > 0.0)) throw std::invalid_argument("monotone bound applies only to increasing maps (slope > 0)");
  const double eps = std::abs(1.0 - slope) * radius + std::abs(shift);
  return bound_monotone_1d(eps, p, lp_norm);
}

double convolution_factor(const Field2D& w, PNorm p, const DirectionSet& eta) {
  return mean_mixed_norm(w, PNorm(1), p, eta);
}

}  // namespace scm

#include "scm/baselines.hpp"

#include <algorithm>
#include <sstream>

#include "scm/diagnostics.hpp"

namespace scm {
namespace {

std::vector<double> cumulative(std::span<const double> values, double h) {
  std::vector<double> cdf(values.size() + 1, 0.0);
  for (std::size_t j = 0; j < values.size(); ++j) cdf[j + 1] = cdf[j] + h * values[j];
  return cdf;
}

/// Copies values, clamping small negatives and rejecting large ones.
std::vector<double> nonnegative_values(std::span<const double> values, double negative_tolerance) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) {
    if (v < 0.0) {
      if (v < -negative_tolerance * peak) {
        std::ostringstream msg;
        msg << "Wasserstein distance needs a nonnegative density; found value " << v << " (max |x| = " << peak << ")";
        throw MeasureError(msg.str());
      }
      v = 0.0;
    }
  }
  return out;
}

void check_masses(double mx, double my, double tol) {
  if (mx < 0.0 || my < 0.0) throw MeasureError("negative total mass");
  if (std::abs(mx - my) > tol * std::max(mx, my)) {
    std::ostringstream msg;
    msg << "mass mismatch: " << mx << " vs " << my << " exceeds relative tolerance " << tol;
    throw MeasureError(msg.str());
  }
}

int level_count(const WassersteinOptions& options, int n) {
  if (options.levels < 0) throw std::invalid_argument("quantile level count must be nonnegative");
  return options.levels == 0 ? 4 * n : options.levels;
}

/// W_p for each p between two CDFs, both rescaled to the common mass.
std::vector<double> quantile_distances(const DiscreteCDF& x, const DiscreteCDF& y, std::span<const PNorm> ps,
                                       int m) {
  const double mx = x.mass(), my = y.mass();
  std::vector<double> out(ps.size(), 0.0);
  if (mx == 0.0 && my == 0.0) return out;
  const double common = 0.5 * (mx + my);

  std::vector<double> lx(m), ly(m);
  for (int s = 0; s < m; ++s) {
    const double u = (s + 0.5) / m;
    lx[s] = u * mx;
    ly[s] = u * my;
  }
  const auto qx = x.quantiles(lx);
  const auto qy = y.quantiles(ly);

  for (std::size_t q = 0; q < ps.size(); ++q) {
    PowerAccumulator acc(ps[q]);
    for (int s = 0; s < m; ++s) acc.add(qx[s] - qy[s]);
    out[q] = acc.result(common / m);
  }
  return out;
}

}  // namespace

DiscreteCDF::DiscreteCDF(Grid1D grid, std::vector<double> cdf) : grid_(grid), cdf_(std::move(cdf)) {
  if (cdf_.size() != static_cast<std::size_t>(grid_.n()) + 1) throw std::invalid_argument("CDF needs n + 1 values");
}

double DiscreteCDF::quantile(double level) const {
  const double levels[] = {level};
  return quantiles(levels).front();
}

std::vector<double> DiscreteCDF::quantiles(std::span<const double> levels) const {
  const int n = grid_.n();
  const double h = grid_.spacing();
  std::vector<double> out(levels.size());
  int j = 1;
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < levels.size(); ++q) {
    if (levels[q] < previous) throw std::invalid_argument("quantile levels must be nondecreasing");
    previous = levels[q];
    const double u = std::clamp(levels[q], 0.0, mass());
    if (u <= 0.0) {
      // inf{t : F(t) >= 0} is the left end
      out[q] = grid_.a();
      continue;
    }
    while (j < n && cdf_[j] < u) ++j;
    const double lo = cdf_[j - 1], hi = cdf_[j];
    const double frac = hi > lo ? std::clamp((u - lo) / (hi - lo), 0.0, 1.0) : 1.0;
    out[q] = grid_.node(j - 1) + frac * h;
  }
  return out;
}

DiscreteCDF cdf_from_field(const Field1D& x, double negative_tolerance) {
  const auto values = nonnegative_values(x.values(), negative_tolerance);
  return DiscreteCDF(x.grid(), cumulative(values, x.grid().spacing()));
}

std::vector<double> wasserstein_from_cdfs(const DiscreteCDF& x, const DiscreteCDF& y, std::span<const PNorm> ps,
                                          const WassersteinOptions& options) {
  if (!(x.grid() == y.grid())) throw GridMismatch("Wasserstein inputs must share a grid");
  check_masses(x.mass(), y.mass(), options.mass_tolerance);
  return quantile_distances(x, y, ps, level_count(options, x.grid().n()));
}

std::vector<double> wasserstein_1d(const Field1D& x, const Field1D& y, std::span<const PNorm> ps,
                                   const WassersteinOptions& options) {
  require_same_grid(x, y);
  return wasserstein_from_cdfs(cdf_from_field(x, options.negative_tolerance),
                               cdf_from_field(y, options.negative_tolerance), ps, options);
}

double wasserstein_1d(const Field1D& x, const Field1D& y, PNorm p, const WassersteinOptions& options) {
  const PNorm ps[] = {p};
  return wasserstein_1d(x, y, ps, options).front();
}

double w1_via_cdf(const Field1D& x, const Field1D& y, const WassersteinOptions& options) {
  require_same_grid(x, y);
  const auto cx = cdf_from_field(x, options.negative_tolerance);
  const auto cy = cdf_from_field(y, options.negative_tolerance);
  check_masses(cx.mass(), cy.mass(), options.mass_tolerance);
  const double common = 0.5 * (cx.mass() + cy.mass());
  if (common == 0.0) return 0.0;
  const double sx = common / cx.mass(), sy = common / cy.mass();
  double s = 0.0;
  for (int j = 0; j < x.grid().n(); ++j) s += std::abs(sx * cx.values()[j] - sy * cy.values()[j]);
  return x.grid().spacing() * s;
}

namespace {

/// out[q][l]: W_p^p (or W_inf) for exponent q at angle l.
std::vector<std::vector<double>> per_angle_distances(const std::vector<Field1D>& px, const std::vector<Field1D>& py,
                                                     std::span<const PNorm> ps,
                                                     const SlicedWassersteinOptions& options) {
  if (px.size() != py.size() || px.empty()) throw std::invalid_argument("projection sets must match and be nonempty");
  const std::size_t count = px.size();
  const Grid1D line = px.front().grid();
  const double h = line.spacing();
  const int m = level_count(options.wasserstein, line.n());

  double mx = 0.0, my = 0.0;
  for (std::size_t l = 0; l < count; ++l) {
    mx += riemann_integral(px[l]) / count;
    my += riemann_integral(py[l]) / count;
  }
  check_masses(mx, my, options.wasserstein.mass_tolerance);
  const double common = 0.5 * (mx + my);
  const double neg_tol = options.clamp_negative ? std::numeric_limits<double>::infinity()
                                                : options.wasserstein.negative_tolerance;

  std::vector<std::vector<double>> out(ps.size(), std::vector<double>(count, 0.0));
  std::vector<double> ripple(count, 0.0);
  std::vector<std::string> failures(count);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(count); ++l) {
    try {
      auto prepare = [&](const Field1D& proj) {
        double negative = 0.0;
        for (double v : proj.values()) negative += v < 0.0 ? -v : 0.0;
        auto vals = nonnegative_values(proj.values(), neg_tol);
        double mass = 0.0;
        for (double v : vals) mass += h * v;
        if (mass > 0.0) {
          ripple[l] = std::max(ripple[l], h * negative / mass);
          for (double& v : vals) v *= common / mass;
        }
        return DiscreteCDF(line, cumulative(vals, h));
      };
      const auto w = quantile_distances(prepare(px[l]), prepare(py[l]), ps, m);
      for (std::size_t q = 0; q < ps.size(); ++q) out[q][l] = ps[q].is_infinite() ? w[q] : std::pow(w[q], ps[q].value());
    } catch (const std::exception& e) {
      failures[l] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw MeasureError("projection: " + f);
  }
  const double worst = *std::max_element(ripple.begin(), ripple.end());
  if (worst > options.ripple_warning) {
    std::ostringstream msg;
    msg << "sliced Wasserstein: clamped negative projection mass up to " << worst << " of the projection mass";
    warn(msg.str());
  }
  return out;
}

}  // namespace

std::vector<double> sliced_wasserstein_per_angle(const std::vector<Field1D>& px, const std::vector<Field1D>& py,
                                                 PNorm p, const SlicedWassersteinOptions& options) {
  const PNorm ps[] = {p};
  return per_angle_distances(px, py, ps, options).front();
}

std::vector<double> sliced_wasserstein_from_spectra(const PolarSpectrum& x, const PolarSpectrum& y, double R,
                                                    std::span<const PNorm> ps,
                                                    const SlicedWassersteinOptions& options) {
  if (x.n() != y.n() || x.period() != y.period() ||
      !std::equal(x.angles().begin(), x.angles().end(), y.angles().begin(), y.angles().end())) {
    throw GridMismatch("sliced Wasserstein spectra must share grid and angles");
  }
  const auto per_angle = per_angle_distances(radon_projections(x, R), radon_projections(y, R), ps, options);
  std::vector<double> out(ps.size());
  for (std::size_t q = 0; q < ps.size(); ++q) {
    const auto& v = per_angle[q];
    if (ps[q].is_infinite()) {
      out[q] = *std::max_element(v.begin(), v.end());
    } else {
      double s = 0.0;
      for (double w : v) s += w;
      out[q] = std::pow(s / static_cast<double>(v.size()), 1.0 / ps[q].value());
    }
  }
  return out;
}

std::vector<double> sliced_wasserstein_2d(const Field2D& x, const Field2D& y, std::span<const PNorm> ps,
                                          const SlicedWassersteinOptions& options) {
  require_same_grid(x, y);
  const auto angles = options.angles.value_or(default_angles(x.grid().n()));
  if (angles.empty()) throw std::invalid_argument("at least one projection angle is required");
  check_masses(riemann_integral(x), riemann_integral(y), options.wasserstein.mass_tolerance);
  const auto sx = polar_coefficients_fast(x, angles, options.polar_tolerance);
  const auto sy = polar_coefficients_fast(y, angles, options.polar_tolerance);
  return sliced_wasserstein_from_spectra(sx, sy, x.grid().half_extent(), ps, options);
}

double sliced_wasserstein_2d(const Field2D& x, const Field2D& y, PNorm p, const SlicedWassersteinOptions& options) {
  const PNorm ps[] = {p};
  return sliced_wasserstein_2d(x, y, ps, options).front();
}

}  // namespace scm

#include <cmath>

#include "doctest.h"
#include "scm/baselines.hpp"
#include "scm/cramer.hpp"
#include "scm/diagnostics.hpp"
#include "test_util.hpp"

using namespace scm;
using scm::testing::gaussian_pdf;
using scm::testing::tabulate;

namespace {

// Indicator of [lo, hi) rescaled to unit discrete mass.
Field1D uniform_density(const Grid1D& g, double lo, double hi) {
  const auto x = tabulate(g, [&](double t) { return (t >= lo && t < hi) ? 1.0 : 0.0; });
  return (1.0 / riemann_integral(x)) * x;
}

// p-mean of |cos| over many equispaced directions.
double mean_abs_cos(double p) {
  const int count = 100000;
  double s = 0.0;
  for (int m = 0; m < count; ++m) s += std::pow(std::abs(std::cos(kPi * (m + 0.5) / count)), p);
  return std::pow(s / count, 1.0 / p);
}

GaussianMixtureSpec blurred(GaussianMixtureSpec spec, double extra) {
  spec.width = std::hypot(spec.width, extra);
  return spec;
}

}  // namespace

TEST_CASE("discrete CDF") {
  const Grid1D g(0.0, 1.0, 64);
  const auto zero = cdf_from_field(Field1D::zeros(g));
  for (double v : zero.values()) CHECK(v == 0.0);
  const auto ramp = cdf_from_field(Field1D(g, std::vector<double>(64, 1.0)));
  for (int j = 0; j <= 64; ++j) CHECK(ramp.values()[j] == j / 64.0);
  CHECK(ramp.quantile(0.5) == doctest::Approx(0.5));
  CHECK(ramp.quantile(0.0) == 0.0);

  const Grid1D h(-1.0, 1.0, 512);
  const auto gauss = cdf_from_field(tabulate(h, [](double t) { return gaussian_pdf(t, 0.0, 0.1); }));
  CHECK(gauss.mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(gauss.quantile(0.5)) <= h.spacing());

  std::vector<double> signed_values(64, 1.0);
  signed_values[5] = -0.5;
  CHECK_THROWS_AS(cdf_from_field(Field1D(g, signed_values)), MeasureError);
  signed_values[5] = -1e-12;
  CHECK(cdf_from_field(Field1D(g, signed_values)).values()[6] == doctest::Approx(5.0 / 64.0));
}

TEST_CASE("quantile inversion skips flat stretches") {
  const Grid1D g(0.0, 4.0, 4);
  const DiscreteCDF cdf(g, {0.0, 0.5, 0.5, 0.5, 1.0});
  CHECK(cdf.quantile(0.25) == doctest::Approx(0.5));
  CHECK(cdf.quantile(0.5) == doctest::Approx(1.0));
  CHECK(cdf.quantile(0.75) == doctest::Approx(3.5));
  CHECK(cdf.quantile(2.0) == doctest::Approx(4.0));
}

TEST_CASE("1D Wasserstein closed forms") {
  const Grid1D g(-0.5, 2.5, 2048);
  const auto u = uniform_density(g, 0.0, 1.0);
  CHECK(wasserstein_1d(u, u, PNorm(2)) == 0.0);

  const auto shifted = uniform_density(g, 0.1, 1.1);
  for (const PNorm p : {PNorm(1), PNorm(2), PNorm(10), PNorm::infinity()}) {
    CHECK(std::abs(wasserstein_1d(u, shifted, p) - 0.1) <= 2 * g.length() / g.n());
  }
  CHECK(std::abs(w1_via_cdf(u, shifted) - 0.1) <= 2 * g.length() / g.n());

  const auto wide = uniform_density(g, 0.0, 2.0);
  WassersteinOptions opts;
  opts.levels = 4096;
  CHECK(std::abs(wasserstein_1d(u, wide, PNorm(1), opts) - 0.5) < 5e-3);
  CHECK(std::abs(wasserstein_1d(u, wide, PNorm(2), opts) - 1.0 / std::sqrt(3.0)) < 5e-3);
}

TEST_CASE("Wasserstein input checks") {
  const Grid1D g(0.0, 1.0, 64);
  const auto one = Field1D(g, std::vector<double>(64, 1.0));
  CHECK_THROWS_AS(wasserstein_1d(one, 2.0 * one, PNorm(1)), MeasureError);
  CHECK_NOTHROW(wasserstein_1d(one, (1.0 + 1e-6) * one, PNorm(1)));
  CHECK_THROWS_AS(wasserstein_1d(one, Field1D(Grid1D(0.0, 1.0, 32), std::vector<double>(32, 1.0)), PNorm(1)),
                  GridMismatch);
}

TEST_CASE("two W1 formulas agree and W_p is monotone in p") {
  const Grid1D g(0.0, 1.0, 512);
  for (unsigned s = 0; s < 5; ++s) {
    auto a = scm::testing::random_values(512, 40 + s, 0.0, 1.0);
    auto b = scm::testing::random_values(512, 80 + s, 0.0, 1.0);
    double sa = 0, sb = 0;
    for (int j = 0; j < 512; ++j) { sa += a[j]; sb += b[j]; }
    for (auto& v : b) v *= sa / sb;
    const Field1D x(g, a), y(g, b);
    const double w1 = wasserstein_1d(x, y, PNorm(1));
    CHECK(w1_via_cdf(x, y) == doctest::Approx(w1).epsilon(1e-3));
    const PNorm ps[] = {PNorm(1), PNorm(2), PNorm(10)};
    const auto w = wasserstein_1d(x, y, ps);
    // unit-mass normalization makes the quadrature a probability average
    const double mass = riemann_integral(x);
    const double w1n = w[0] / mass, w2n = w[1] / std::pow(mass, 0.5), w10n = w[2] / std::pow(mass, 0.1);
    CHECK(w1n <= w2n + 1e-3);
    CHECK(w2n <= w10n + 1e-3);
  }
}

TEST_CASE("1-Cramer distance equals W1 in 1D") {
  const Grid1D g(-1.0, 1.0, 512);
  const auto x = tabulate(g, [](double t) { return gaussian_pdf(t, 0.0, 0.05); });
  const auto y = tabulate(g, [](double t) { return gaussian_pdf(t, 0.1, 0.05); });
  const double c1 = discrete_cramer_1d(x, y, PNorm(1));
  CHECK(c1 == doctest::Approx(wasserstein_1d(x, y, PNorm(1))).epsilon(1e-3));
  CHECK(c1 == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("1D Wasserstein contracts under a common Gaussian blur") {
  const Grid1D g(-3.0, 3.0, 1024);
  const GaussianMixtureSpec f{{{-0.5, 0.0}, {0.4, 0.0}}, {0.3, 0.7}, 0.1, true};
  const GaussianMixtureSpec h{{{0.2, 0.0}, {0.9, 0.0}, {-0.1, 0.0}}, {0.5, 0.25, 0.25}, 0.1, true};
  const PNorm ps[] = {PNorm(1), PNorm(2), PNorm(10)};
  const auto clean = wasserstein_1d(sample_mixture(f, g), sample_mixture(h, g), ps);
  for (double s : {0.05, 0.2, 0.5}) {
    const auto blur = wasserstein_1d(sample_mixture(blurred(f, s), g), sample_mixture(blurred(h, s), g), ps);
    for (int q = 0; q < 3; ++q) CHECK(blur[q] <= clean[q] * (1 + 1e-2));
  }
}

TEST_CASE("1D monotone translation moves mass by exactly the shift") {
  const Grid1D g(-2.0, 2.0, 1024);
  const GaussianMixtureSpec f{{{-0.3, 0.0}, {0.5, 0.0}}, {0.6, 0.4}, 0.1, true};
  GaussianMixtureSpec moved = f;
  for (auto& c : moved.centers) c.x -= 0.05;
  for (const PNorm p : {PNorm(1), PNorm(2), PNorm(10)}) {
    CHECK(wasserstein_1d(sample_mixture(f, g), sample_mixture(moved, g), p) <= 0.05 * (1 + 1e-2));
  }
}

TEST_CASE("sliced Wasserstein of a translated Gaussian") {
  const Grid2D g(2.5, 128);
  const double delta = 0.2;
  const auto x = sample_mixture(GaussianMixtureSpec{{{0.0, 0.0}}, {1.0}, 0.15, true}, g);
  const auto y = sample_mixture(GaussianMixtureSpec{{{delta, 0.0}}, {1.0}, 0.15, true}, g);
  CHECK(sliced_wasserstein_2d(x, x, PNorm(2)) == doctest::Approx(0.0).epsilon(1e-12));
  for (double p : {1.0, 2.0, 10.0}) {
    CHECK(sliced_wasserstein_2d(x, y, PNorm(p)) == doctest::Approx(delta * mean_abs_cos(p)).epsilon(0.03));
  }
  CHECK(sliced_wasserstein_2d(x, y, PNorm::infinity()) == doctest::Approx(delta).epsilon(0.03));
}

TEST_CASE("sliced 1-Cramer matches sliced W1 on the phantoms") {
  const Grid2D g(2.5, 256);
  const auto f = sample_mixture(source_phantom(), g), h = sample_mixture(target_phantom(), g);
  const double sc1 = discrete_sliced_cramer_2d(f, h, PNorm(1));
  CHECK(sc1 == doctest::Approx(sliced_wasserstein_2d(f, h, PNorm(1))).epsilon(1e-2));
}

TEST_CASE("sliced Wasserstein contracts under a common blur") {
  const Grid2D g(2.5, 128);
  const auto fs = source_phantom(2.5, 0.1), hs = target_phantom(2.5, 0.1);
  const PNorm ps[] = {PNorm(1), PNorm(2), PNorm(10)};
  const auto clean = sliced_wasserstein_2d(sample_mixture(fs, g), sample_mixture(hs, g), ps);
  for (double s : {0.05, 0.15}) {
    const auto blur = sliced_wasserstein_2d(sample_mixture(blurred(fs, s), g), sample_mixture(blurred(hs, s), g), ps);
    for (int q = 0; q < 3; ++q) CHECK(blur[q] <= clean[q] * (1 + 1e-2));
  }
}

TEST_CASE("negative projections can be rejected instead of clamped") {
  const Grid2D g(1.0, 32);
  auto vals = scm::testing::random_values(32 * 32, 3, 0.0, 1.0);
  vals[100] = -50.0;
  const Field2D x(g, vals);
  SlicedWassersteinOptions strict;
  strict.clamp_negative = false;
  CHECK_THROWS_AS(sliced_wasserstein_2d(x, x, PNorm(1), strict), MeasureError);
  std::vector<std::string> seen;
  const auto previous = set_warning_handler([&](const std::string& m) { seen.push_back(m); });
  CHECK_NOTHROW(sliced_wasserstein_2d(x, x, PNorm(1)));
  set_warning_handler(previous);
  CHECK(!seen.empty());
}

#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "json.hpp"
#include "scm/cramer.hpp"
#include "scm/noise.hpp"
#include "scm/philox.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace scm;

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

std::vector<double> means_for(const ScalingResult& r, double p) {
  std::vector<double> out;
  for (const auto& row : r.rows) {
    if (row.p == p) out.push_back(row.mean_err);
  }
  return out;
}

}  // namespace

TEST_CASE("Philox known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  CHECK(philox_uniform(0, 0) > 0.0);
  CHECK(philox_uniform(0xffffffff, 0xffffffff) < 1.0);
}

TEST_CASE("noise model validation") {
  const Grid1D g(0.0, 1.0, 8);
  CHECK_THROWS_AS(NoiseModel1D(Field1D(g, {1, 1, 1, -0.1, 1, 1, 1, 1}), 1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel1D(Field1D(g, {1, 1, 1, NAN, 1, 1, 1, 1}), 1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel1D(Field1D(g, {2, 0, 0, 0, 0, 0, 0, 0}), 1, 0.5), std::invalid_argument);
  CHECK_NOTHROW(NoiseModel1D(Field1D(g, {2, 0, 0, 0, 0, 0, 0, 0}), 1, 1.0 / std::sqrt(2.0)));
  CHECK(NoiseModel1D(Field1D(g, {2, 0, 0, 0, 0, 0, 0, 0}), 1).rms() == doctest::Approx(1.0 / std::sqrt(2.0)));
  const auto model = NoiseModel1D::constant(g, 1.0, 3);
  CHECK_THROWS_AS(sample_noise(model, Grid1D(0.0, 1.0, 16)), GridMismatch);
}

TEST_CASE("noise sampling contract") {
  const Grid2D g(1.0, 64);
  const auto silent = sample_noise(NoiseModel2D::constant(g, 0.0, 5), g);
  for (double v : silent.values()) REQUIRE(v == 0.0);

  const auto model = NoiseModel2D::constant(g, 1.0, 5);
  const auto a = sample_noise(model, g, 3, 1), b = sample_noise(model, g, 3, 1);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  for (const auto& other : {sample_noise(model, g, 4, 1), sample_noise(model, g, 3, 0),
                            sample_noise(NoiseModel2D::constant(g, 1.0, 6), g, 3, 1)}) {
    int same = 0;
    for (std::size_t q = 0; q < a.values().size(); ++q) same += a.values()[q] == other.values()[q];
    CHECK(same == 0);
  }
  // a node's value does not depend on the grid it is embedded in
  const Grid1D small(0.0, 1.0, 8), large(0.0, 1.0, 64);
  const auto s = sample_noise(NoiseModel1D::constant(small, 1.0, 9), small, 2);
  const auto l = sample_noise(NoiseModel1D::constant(large, 1.0, 9), large, 2);
  for (int j = 0; j < 8; ++j) CHECK(s[j] == l[j]);
}

TEST_CASE("noise moments") {
  const Grid2D g(1.0, 512);
  const auto z = sample_noise(NoiseModel2D::constant(g, 1.0, kDefaultSeed), g);
  CHECK(std::abs(mean_of(z.values())) <= 4.0 / 512.0);
  CHECK(variance_of(z.values()) == doctest::Approx(1.0).epsilon(0.02));

  // heteroscedastic: left half sigma 0.5, right half sigma 2
  const Grid1D line(0.0, 1.0, 200000);
  std::vector<double> sigma(200000, 0.5);
  std::fill(sigma.begin() + 100000, sigma.end(), 2.0);
  const auto w = sample_noise(NoiseModel1D(Field1D(line, sigma), 17), line);
  const auto v = w.values();
  CHECK(variance_of(v.subspan(0, 100000)) == doctest::Approx(0.25).epsilon(0.02));
  CHECK(variance_of(v.subspan(100000)) == doctest::Approx(4.0).epsilon(0.02));
  // neighbouring samples are uncorrelated
  double c = 0.0;
  for (std::size_t j = 0; j + 1 < 100000; ++j) c += v[j] * v[j + 1];
  CHECK(std::abs(c / 99999.0 / 0.25) < 4.0 / std::sqrt(100000.0));
}

TEST_CASE("log-log fits") {
  const double x[] = {2.0, 4.0, 8.0, 16.0};
  const double y[] = {3.0 * std::pow(2.0, -0.7), 3.0 * std::pow(4.0, -0.7), 3.0 * std::pow(8.0, -0.7),
                      3.0 * std::pow(16.0, -0.7)};
  const auto fit = fit_loglog(x, y);
  REQUIRE(fit);
  CHECK(fit->slope == doctest::Approx(-0.7));
  CHECK(std::exp(fit->intercept) == doctest::Approx(3.0));
  CHECK(fit->points == 4);
  CHECK_FALSE(fit_loglog(std::span(x, 1), std::span(y, 1)));
}

TEST_CASE("noise-only study: zero noise and linearity in sigma") {
  NoiseStudyConfig cfg;
  cfg.sigma = 0.0;
  cfg.sizes = {32, 16};
  cfg.ps = {1.0, 2.0};
  cfg.trials = 4;
  const auto zero = noise_norm_study(cfg, 1);
  for (const auto& row : zero.rows) CHECK(row.mean_err == 0.0);
  CHECK_FALSE(zero.fit_for(1.0));
  CHECK(zero.rows.front().n == 16);

  cfg.sigma = 1.0;
  const auto one = noise_norm_study(cfg, 2);
  cfg.sigma = 2.0;
  const auto two = noise_norm_study(cfg, 2);
  for (std::size_t r = 0; r < one.rows.size(); ++r) {
    CHECK(two.rows[r].mean_err == doctest::Approx(2.0 * one.rows[r].mean_err).epsilon(1e-12));
  }
  cfg.trials = 1;
  CHECK_THROWS(noise_norm_study(cfg, 1));
}

TEST_CASE("noise-only Volterra norms decay like 1/sqrt(n) in 1D") {
  NoiseStudyConfig cfg;
  cfg.sizes = {64, 128, 256, 512};
  cfg.ps = {2.0};
  cfg.trials = 100;
  const auto r = noise_norm_study(cfg, 1);
  REQUIRE(r.fit_for(2.0));
  CHECK(r.fit_for(2.0)->slope == doctest::Approx(-0.5).epsilon(0.2));
  CHECK(std::abs(r.fit_for(2.0)->slope + 0.5) <= 0.1);
}

TEST_CASE("noise-only sliced norms decay like 1/n in 2D") {
  NoiseStudyConfig cfg;
  cfg.sizes = {32, 64, 128};
  cfg.ps = {2.0};
  cfg.trials = 50;
  const auto r = noise_norm_study(cfg, 2);
  REQUIRE(r.fit_for(2.0));
  // fitted against log(n^2): -1 +- 0.15 per log n
  CHECK(std::abs(2.0 * r.fit_for(2.0)->slope + 1.0) <= 0.15);
  const auto m = means_for(r, 2.0);
  int inversions = 0;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) inversions += m[i + 1] > m[i];
  CHECK(inversions <= 1);
}

TEST_CASE("sub-Gaussian tail of noise norms") {
  NoiseStudyConfig cfg;
  cfg.sizes = {256};
  cfg.ps = {2.0};
  cfg.trials = 1000;
  const Grid1D g(cfg.a, cfg.b, 256);
  const auto model = NoiseModel1D::constant(g, 1.0, cfg.seed);
  CramerOptions quiet;
  quiet.mean_tolerance = INFINITY;
  std::vector<double> norms;
  for (int k = 0; k < cfg.trials; ++k) norms.push_back(discrete_volterra_norm_1d(sample_noise(model, g, k), PNorm(2), quiet));
  const double mean = noise_norm_study(cfg, 1).rows.front().mean_err;
  CHECK(mean == doctest::Approx(mean_of(norms)).epsilon(1e-12));
  int above = 0;
  for (double v : norms) above += v > 3.0 * mean;
  CHECK(above < 10);
}

TEST_CASE("studies do not depend on the thread count") {
#ifdef _OPENMP
  NoiseStudyConfig cfg;
  cfg.sizes = {32, 64};
  cfg.ps = {1.0, 2.0, INFINITY};
  cfg.trials = 8;
  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto serial = noise_norm_study(cfg, 2).to_csv();
  omp_set_num_threads(3);
  const auto parallel = noise_norm_study(cfg, 2).to_csv();
  omp_set_num_threads(before);
  CHECK(serial == parallel);
#endif
}

TEST_CASE("signal-plus-noise study") {
  SignalNoiseConfig cfg;
  cfg.source = source_phantom(2.5, 0.1);
  cfg.target = target_phantom(2.5, 0.1);
  cfg.sizes = {32, 64};
  cfg.ps = {1.0, 2.0};
  cfg.trials = 4;
  cfg.reference_n = 128;

  SUBCASE("zero noise reproduces the discretization error") {
    cfg.sigma = 0.0;
    const auto r = signal_noise_study(cfg);
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t q = 0; q < 2; ++q) {
        CHECK(r.scaling.rows[s * 2 + q].mean_err == doctest::Approx(r.clean[s][q]).epsilon(1e-9));
        CHECK(r.scaling.rows[s * 2 + q].std_err < 1e-12);
      }
    }
    for (std::size_t q = 0; q < 2; ++q) CHECK(r.clean[1][q] <= 0.5 * r.clean[0][q]);
  }
  SUBCASE("error is linear in sigma when noise dominates") {
    cfg.sizes = {64};
    cfg.trials = 20;
    cfg.sigma = 1.0;
    const auto one = signal_noise_study(cfg);
    cfg.sigma = 2.0;
    const auto two = signal_noise_study(cfg);
    for (std::size_t q = 0; q < 2; ++q) {
      CHECK(two.scaling.rows[q].mean_err / one.scaling.rows[q].mean_err == doctest::Approx(2.0).epsilon(0.15));
    }
  }
  SUBCASE("noisy source adds a second independent perturbation") {
    cfg.sigma = 0.5;
    const auto g_only = signal_noise_study(cfg);
    cfg.noisy_source = true;
    const auto both = signal_noise_study(cfg);
    CHECK(both.scaling.rows.back().mean_err != g_only.scaling.rows.back().mean_err);
  }
  SUBCASE("degenerate reference") {
    cfg.target = cfg.source;
    CHECK_THROWS_AS(signal_noise_study(cfg), std::invalid_argument);
  }
}

TEST_CASE("scaling output schema") {
  NoiseStudyConfig cfg;
  cfg.sizes = {16, 32};
  cfg.ps = {1.0, INFINITY};
  cfg.trials = 3;
  const auto r = noise_norm_study(cfg, 1);
  const auto csv = r.to_csv();
  CHECK(csv.rfind("n,p,mean_err,std_err,M\n16,1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const auto doc = nlohmann::json::parse(r.to_json(R"({"trials": 3})"));
  CHECK(doc["config"]["trials"] == 3);
  CHECK(doc["rows"].size() == 4);
  CHECK(doc["fits"][1]["p"] == "inf");
  CHECK(doc["seed"] == kDefaultSeed);
}

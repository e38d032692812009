#include "scm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"
#include "scm/baselines.hpp"
#include "scm/cramer.hpp"
#include "scm/field_io.hpp"
#include "scm/format.hpp"
#include "scm/philox.hpp"
#include "scm/spectral.hpp"

namespace scm {
namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroLhs = 1e-12;
const std::vector<int> kOracleSizes{64, 128, 256, 512};
constexpr int kOraclePairs = 10;
constexpr int kOraclePairSize = 1024;

template <class Body>
void parallel_for(int count, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<PNorm> pnorms(const ExperimentConfig& c) {
  std::vector<PNorm> out;
  for (double p : c.ps) out.emplace_back(p);
  return out;
}

CramerOptions cramer_options(const ExperimentConfig& c) {
  CramerOptions o;
  o.mean_tolerance = c.tolerances.mean;
  o.polar_tolerance = c.tolerances.polar;
  return o;
}

SlicedWassersteinOptions wasserstein_options(const ExperimentConfig& c) {
  SlicedWassersteinOptions o;
  o.polar_tolerance = c.tolerances.polar;
  return o;
}

PolarSpectrum spectrum_of(const Field2D& x, const ExperimentConfig& c) { return polar_spectrum(x, cramer_options(c)); }

std::vector<double> sc_between(const PolarSpectrum& x, const PolarSpectrum& y, std::span<const PNorm> ps) {
  return sliced_volterra_norms(x.combined(1.0, y, -1.0), ps);
}

/// Projection of a 2D phantom onto the x axis, as a 1D mixture.
GaussianMixtureSpec x_marginal(const GaussianMixtureSpec& spec) {
  GaussianMixtureSpec out = spec;
  for (Vec2& c : out.centers) c.y = 0.0;
  return out;
}

GaussianMixtureSpec layout_phantom(const std::string& layout, double R, double width, int dimension) {
  GaussianMixtureSpec spec;
  if (layout == "source") {
    spec = source_phantom(R, width);
  } else if (layout == "target") {
    spec = target_phantom(R, width);
  } else {
    throw ConfigError("unknown phantom layout '" + layout + "' (expected source or target)");
  }
  return dimension == 1 ? x_marginal(spec) : spec;
}

std::string clean_message(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

ordered_json p_to_json(double p) { return std::isinf(p) ? ordered_json("inf") : ordered_json(p); }

double p_from_json(const ordered_json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw ConfigError("p must be a number or \"inf\", got '" + s + "'");
  }
  if (!v.is_number()) throw ConfigError("p must be a number or \"inf\"");
  return v.get<double>();
}

void reject_unknown(const ordered_json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_if(const ordered_json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

PhantomConfig phantom_from_json(const ordered_json& j, double R, int dimension, const std::string& where) {
  reject_unknown(j, {"layout", "width", "centers", "weights", "normalized", "file"}, where);
  PhantomConfig out;
  if (j.contains("file")) {
    out.file = j.at("file").get<std::string>();
    return out;
  }
  const double width = j.value("width", R / 50.0);
  if (j.contains("centers")) {
    GaussianMixtureSpec spec;
    for (const auto& c : j.at("centers")) {
      if (c.is_number()) {
        spec.centers.push_back({c.get<double>(), 0.0});
      } else if (c.is_array() && c.size() == 2) {
        spec.centers.push_back({c[0].get<double>(), c[1].get<double>()});
      } else {
        throw ConfigError(where + ": centers must be numbers or [x, y] pairs");
      }
    }
    spec.weights = j.at("weights").get<std::vector<double>>();
    spec.width = width;
    spec.normalized = j.value("normalized", false);
    out.spec = spec;
  } else {
    out.spec = layout_phantom(j.value("layout", std::string(where == "source" ? "source" : "target")), R, width,
                              dimension);
  }
  return out;
}

ordered_json phantom_to_json(const PhantomConfig& p) {
  if (p.file) return {{"file", *p.file}};
  ordered_json centers = ordered_json::array();
  for (const Vec2& c : p.spec.centers) centers.push_back({c.x, c.y});
  return {{"centers", centers}, {"weights", p.spec.weights}, {"width", p.spec.width}, {"normalized", p.spec.normalized}};
}

SweepConfig default_sweep(const std::string& family) {
  SweepConfig s;
  s.family = family;
  if (family == "translate") {
    s.min = 0.0;
    s.max = 1.0;
  } else if (family == "rotate") {
    s.min = 0.0;
    s.max = kPi / 2;
  } else if (family == "dilate") {
    s.min = 1.0;
    s.max = 2.0;
  } else if (family == "affine") {
    s.min = 0.0;
    s.max = 1.0;
  } else {
    throw ConfigError("unknown deformation family '" + family + "'");
  }
  return s;
}

void require_analytic(const ExperimentConfig& c) {
  if (c.source.file || c.target.file) {
    throw ConfigError(c.command + " needs analytic phantoms; field files are accepted by dist only");
  }
  if (c.dimension != 2) throw ConfigError(c.command + " runs on 2D fields only");
}

double margin_of(double lhs, double rhs) {
  if (rhs > 0.0) return (rhs - lhs) / rhs;
  return lhs <= kZeroLhs ? 0.0 : -kInf;
}

struct Moments {
  double mean;
  double std_err;
};

Moments moments(std::span<const double> v) {
  const double count = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / count;
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (count - 1.0) / count)};
}

double lp_norm(const Field2D& x, PNorm p) { return lebesgue_distance(x, Field2D::zeros(x.grid()), p); }
double lp_norm(const Field1D& x, PNorm p) { return lebesgue_distance(x, Field1D::zeros(x.grid()), p); }

// Smooth mean-zero test signal on [-2, 2] for the Volterra oracle.
double smooth_signal(double t) {
  auto g = [](double x, double m, double s) { return std::exp(-0.5 * (x - m) * (x - m) / (s * s)) / (s * std::sqrt(2 * kPi)); };
  return 0.5 * g(t, -0.4, 0.1) + 0.5 * g(t, 0.35, 0.15) - g(t, 0.05, 0.12);
}

double philox_unit(std::uint64_t seed, std::uint32_t index, std::uint32_t stream) {
  const auto r = Philox4x32::block({index, 0, 0, stream}, Philox4x32::key_from_seed(seed));
  return philox_uniform(r[0], r[1]);
}

Field1D random_density(const Grid1D& grid, std::uint64_t seed, std::uint32_t stream) {
  GaussianMixtureSpec spec;
  spec.width = 0.05 + 0.1 * philox_unit(seed, 0, stream);
  for (std::uint32_t m = 0; m < 3; ++m) {
    spec.centers.push_back({-0.5 + philox_unit(seed, 1 + m, stream), 0.0});
    spec.weights.push_back(0.2 + philox_unit(seed, 10 + m, stream));
  }
  const auto x = sample_mixture(spec, grid);
  return (1.0 / riemann_integral(x)) * x;
}

}  // namespace

// ---------------------------------------------------------------- sweeps

Deformation SweepConfig::at(double delta, double radius) const {
  if (family == "translate") return Deformation::translation(delta * direction, radius);
  if (family == "rotate") return Deformation::rotation(delta, radius);
  if (family == "dilate") return Deformation::dilation(delta, radius);
  if (family == "affine") {
    if (!deform) throw ConfigError("affine sweeps need a target map");
    const auto target = Deformation::parse(*deform);
    const Mat2& A = target.matrix();
    const Mat2 step{1.0 + delta * (A.a11 - 1.0), delta * A.a12, delta * A.a21, 1.0 + delta * (A.a22 - 1.0)};
    return Deformation::affine(step, delta * target.offset(), radius);
  }
  throw ConfigError("unknown deformation family '" + family + "'");
}

std::vector<double> SweepConfig::parameters() const {
  if (count == 1) return {max};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[i] = min + (max - min) * i / (count - 1);
  out.back() = max;
  return out;
}

// ---------------------------------------------------------------- config

ExperimentConfig::ExperimentConfig() {
  source.spec = source_phantom(R, R / 50.0);
  target.spec = target_phantom(R, R / 50.0);
}

void ExperimentConfig::set_deform(const std::string& text) {
  Deformation d = Deformation::translation({0.0, 0.0});
  try {
    d = Deformation::parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--deform: ") + e.what());
  }
  const int count = sweep.count;
  switch (d.kind()) {
    case DeformationKind::kTranslation: {
      sweep = default_sweep("translate");
      const double len = norm(d.offset());
      sweep.max = len;
      if (len > 0.0) sweep.direction = (1.0 / len) * d.offset();
      break;
    }
    case DeformationKind::kRotation:
      sweep = default_sweep("rotate");
      sweep.max = d.parameter();
      break;
    case DeformationKind::kDilation:
      if (d.parameter() < 1.0) throw ConfigError("dilation sweeps need alpha >= 1");
      sweep = default_sweep("dilate");
      sweep.max = d.parameter();
      break;
    case DeformationKind::kAffine:
      sweep = default_sweep("affine");
      break;
  }
  sweep.deform = text;
  sweep.count = count;
  sweep.explicit_family = true;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"command", "dimension", "R", "n", "p", "source", "target", "sweep", "noise", "blur_widths", "seed",
                    "output", "tolerances", "oracle_n", "threads", "debug"},
                   "config");
    read_if(j, "command", c.command);
    read_if(j, "dimension", c.dimension);
    read_if(j, "R", c.R);
    read_if(j, "n", c.n);
    if (j.contains("p")) {
      c.ps.clear();
      const auto& p = j.at("p");
      if (p.is_array()) {
        for (const auto& v : p) c.ps.push_back(p_from_json(v));
      } else {
        c.ps.push_back(p_from_json(p));
      }
    }
    c.source = phantom_from_json(j.value("source", ordered_json::object()), c.R, c.dimension, "source");
    c.target = phantom_from_json(j.value("target", ordered_json::object()), c.R, c.dimension, "target");
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      reject_unknown(s, {"family", "min", "max", "count", "direction", "deform"}, "sweep");
      if (s.contains("deform")) {
        read_if(s, "count", c.sweep.count);
        c.set_deform(s.at("deform").get<std::string>());
      } else {
        const int count = s.value("count", c.sweep.count);
        c.sweep = default_sweep(s.value("family", c.sweep.family));
        c.sweep.count = count;
        c.sweep.explicit_family = s.contains("family");
        read_if(s, "min", c.sweep.min);
        read_if(s, "max", c.sweep.max);
        if (s.contains("direction")) {
          const auto d = s.at("direction").get<std::vector<double>>();
          if (d.size() != 2 || std::hypot(d[0], d[1]) == 0.0) throw ConfigError("sweep.direction must be a nonzero [x, y]");
          const double len = std::hypot(d[0], d[1]);
          c.sweep.direction = {d[0] / len, d[1] / len};
        }
      }
    }
    if (j.contains("noise")) {
      const auto& s = j.at("noise");
      reject_unknown(s, {"sigmas", "trials", "noisy_source"}, "noise");
      read_if(s, "sigmas", c.noise.sigmas);
      read_if(s, "trials", c.noise.trials);
      read_if(s, "noisy_source", c.noise.noisy_source);
    }
    read_if(j, "blur_widths", c.blur_widths);
    read_if(j, "seed", c.seed);
    if (j.contains("output")) {
      const auto& s = j.at("output");
      reject_unknown(s, {"path", "format"}, "output");
      read_if(s, "path", c.out_path);
      read_if(s, "format", c.format);
    }
    if (j.contains("tolerances")) {
      const auto& s = j.at("tolerances");
      reject_unknown(s, {"polar", "mean", "bound_slack", "oracle_polar", "oracle_cramer_w1", "oracle_order"},
                     "tolerances");
      read_if(s, "polar", c.tolerances.polar);
      read_if(s, "mean", c.tolerances.mean);
      read_if(s, "bound_slack", c.tolerances.bound_slack);
      read_if(s, "oracle_polar", c.tolerances.oracle_polar);
      read_if(s, "oracle_cramer_w1", c.tolerances.oracle_cramer_w1);
      read_if(s, "oracle_order", c.tolerances.oracle_order);
    }
    read_if(j, "oracle_n", c.oracle_n);
    read_if(j, "threads", c.threads);
    if (j.contains("debug")) {
      const auto& s = j.at("debug");
      reject_unknown(s, {"corrupt_rhs"}, "debug");
      read_if(s, "corrupt_rhs", c.corrupt_rhs);
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["dimension"] = dimension;
  j["R"] = R;
  j["n"] = n;
  j["p"] = ordered_json::array();
  for (double p : ps) j["p"].push_back(p_to_json(p));
  j["source"] = phantom_to_json(source);
  j["target"] = phantom_to_json(target);
  ordered_json s{{"family", sweep.family}, {"min", sweep.min}, {"max", sweep.max}, {"count", sweep.count},
                 {"direction", {sweep.direction.x, sweep.direction.y}}};
  if (sweep.deform) s["deform"] = *sweep.deform;
  j["sweep"] = s;
  j["noise"] = {{"sigmas", noise.sigmas}, {"trials", noise.trials}, {"noisy_source", noise.noisy_source}};
  j["blur_widths"] = blur_widths;
  j["seed"] = seed;
  j["output"] = {{"path", out_path}, {"format", format}};
  j["tolerances"] = {{"polar", tolerances.polar},
                     {"mean", tolerances.mean},
                     {"bound_slack", tolerances.bound_slack},
                     {"oracle_polar", tolerances.oracle_polar},
                     {"oracle_cramer_w1", tolerances.oracle_cramer_w1},
                     {"oracle_order", tolerances.oracle_order}};
  j["oracle_n"] = oracle_n;
  j["threads"] = threads;
  j["debug"] = {{"corrupt_rhs", corrupt_rhs}};
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> commands{"dist", "deform-sweep", "noise-sweep", "bound-check", "oracle-check"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  if (dimension != 1 && dimension != 2) throw ConfigError("dimension must be 1 or 2");
  if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("R must be positive");
  if (n < 4 || n % 2 != 0) throw ConfigError("n must be an even integer >= 4, got " + std::to_string(n));
  if (ps.empty()) throw ConfigError("the p list is empty");
  for (double p : ps) {
    if (!(p >= 1.0)) throw ConfigError("p values must be >= 1, got " + format_double(p));
  }
  if (sweep.count < 1) throw ConfigError("sweep.count must be >= 1");
  if (!(sweep.min <= sweep.max)) throw ConfigError("sweep range is empty (min > max)");
  if (sweep.family == "dilate" && sweep.min < 1.0) throw ConfigError("dilation sweeps need alpha >= 1");
  if (sweep.family == "rotate" && (sweep.min < 0.0 || sweep.max >= kPi)) {
    throw ConfigError("rotation sweeps need 0 <= theta < pi");
  }
  if (sweep.family == "affine" && !sweep.deform) throw ConfigError("affine sweeps need sweep.deform");
  default_sweep(sweep.family);
  if (noise.trials < 1) throw ConfigError("noise.trials must be >= 1");
  if (noise.sigmas.empty()) throw ConfigError("noise.sigmas is empty");
  for (double s : noise.sigmas) {
    if (!(s >= 0.0)) throw ConfigError("noise sigmas must be nonnegative");
  }
  for (double w : blur_widths) {
    if (!(w > 0.0)) throw ConfigError("blur widths must be positive");
  }
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (oracle_n < 8 || oracle_n % 2 != 0) throw ConfigError("oracle_n must be an even integer >= 8");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!(tolerances.polar > 0.0) || !(tolerances.mean > 0.0) || !(tolerances.bound_slack >= 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  for (const PhantomConfig* p : {&source, &target}) {
    if (p->file) continue;
    try {
      p->spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("phantom: ") + e.what());
    }
    if (dimension == 1) {
      for (const Vec2& c : p->spec.centers) {
        if (c.y != 0.0) throw ConfigError("1D phantoms need centers with y == 0");
      }
    }
  }
}

// ---------------------------------------------------------------- tables

void ResultTable::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match the table header");
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

double ResultTable::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const long long* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column " + name + " is not numeric");
}

const std::string& ResultTable::text(std::size_t row, const std::string& name) const {
  return std::get<std::string>(rows.at(row).at(column(name)));
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
              out += v;
            } else if constexpr (std::is_same_v<T, double>) {
              out += format_double(v);
            } else {
              out += std::to_string(v);
            }
          },
          row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string ResultTable::to_json(const std::string& config_json) const {
  ordered_json doc;
  auto parsed = ordered_json::parse(config_json, nullptr, false);
  doc["config"] = parsed.is_discarded() ? ordered_json(config_json) : parsed;
  doc["columns"] = columns;
  doc["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              r[columns[c]] = std::isfinite(v) ? ordered_json(v) : ordered_json(format_double(v));
            } else {
              r[columns[c]] = v;
            }
          },
          row[c]);
    }
    doc["rows"].push_back(r);
  }
  return doc.dump(2) + "\n";
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson needs two equal series of length >= 2");
  const double count = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / count;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / count;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------- dist

CommandResult cmd_dist(const ExperimentConfig& config) {
  config.validate();
  const auto ps = pnorms(config);
  auto load = [&](const PhantomConfig& ph) -> AnyField {
    if (ph.file) {
      AnyField f = load_field(*ph.file);
      if (static_cast<int>(f.index()) + 1 != config.dimension) {
        throw ConfigError("field file " + *ph.file + " does not match dimension " + std::to_string(config.dimension));
      }
      return f;
    }
    if (config.dimension == 1) return sample_mixture(ph.spec, Grid1D(-config.R, config.R, config.n));
    return sample_mixture(ph.spec, Grid2D(config.R, config.n));
  };
  const AnyField x = load(config.source), y = load(config.target);

  CommandResult result;
  result.table.columns = {"metric", "p", "value", "status"};
  std::vector<double> cramer, wasserstein, lebesgue;
  std::string w_status = "ok";

  auto run = [&](const auto& fx, const auto& fy, auto cramer_fn, auto wasserstein_fn) {
    try {
      require_same_grid(fx, fy);
    } catch (const GridMismatch& e) {
      throw ConfigError(e.what());
    }
    cramer = cramer_fn(fx, fy);
    try {
      wasserstein = wasserstein_fn(fx, fy);
    } catch (const std::invalid_argument& e) {
      w_status = clean_message(e.what());
      wasserstein.assign(ps.size(), kNaN);
    }
    for (PNorm p : ps) lebesgue.push_back(lebesgue_distance(fx, fy, p));
  };

  std::string prefix;
  if (config.dimension == 1) {
    run(std::get<Field1D>(x), std::get<Field1D>(y),
        [&](const Field1D& a, const Field1D& b) {
          std::vector<double> v;
          for (PNorm p : ps) v.push_back(discrete_cramer_1d(a, b, p, cramer_options(config)));
          return v;
        },
        [&](const Field1D& a, const Field1D& b) { return wasserstein_1d(a, b, ps); });
  } else {
    prefix = "sliced_";
    run(std::get<Field2D>(x), std::get<Field2D>(y),
        [&](const Field2D& a, const Field2D& b) { return discrete_sliced_cramer_2d(a, b, ps, cramer_options(config)); },
        [&](const Field2D& a, const Field2D& b) { return sliced_wasserstein_2d(a, b, ps, wasserstein_options(config)); });
  }
  for (std::size_t q = 0; q < ps.size(); ++q) result.table.add({prefix + "cramer", config.ps[q], cramer[q], "ok"});
  for (std::size_t q = 0; q < ps.size(); ++q) {
    result.table.add({prefix + "wasserstein", config.ps[q], wasserstein[q], w_status});
  }
  for (std::size_t q = 0; q < ps.size(); ++q) result.table.add({"lebesgue", config.ps[q], lebesgue[q], "ok"});
  return result;
}

// ---------------------------------------------------------------- sweeps

namespace {

/// Sliced Cramer bound on D(f, f_Phi) for one deformation: the general
/// bound and, when the family has one, its special-case bound.
struct SweepBounds {
  MainBounds main;
  std::vector<std::pair<std::string, double>> special;
};

SweepBounds sweep_bounds(const SweepConfig& sweep, double delta, const Deformation& d,
                         const DeformationNorms& norms, const DirectionSet& eta, PNorm p, double radius) {
  SweepBounds out{bound_main(norms, d, eta, p), {}};
  if (sweep.family == "translate") {
    const auto t = bound_translation(d.offset(), p, norms.mixed_p, norms.mixed_p_inf);
    out.special = {{"translation-sup", t[0]}, {"translation-mean", t[1]}};
  } else if (sweep.family == "rotate") {
    out.special = {{"rotation", bound_rotation(delta, p, norms.mixed_p, radius)}};
  } else if (sweep.family == "dilate") {
    out.special = {{"dilation", bound_dilation(delta, p, norms.mixed_p, radius)}};
  }
  return out;
}

double smallest(const SweepBounds& b) {
  double m = b.main.min();
  for (const auto& [_, v] : b.special) m = std::min(m, v);
  return m;
}

/// Shared state of the deformation commands.
struct SweepContext {
  Grid2D grid;
  Field2D f, g;
  PolarSpectrum sf, sg;
  double radius;
  DirectionSet eta = DirectionSet::uniform();
  std::optional<ProjectionNorms> projections;
  double l1 = 0.0;

  SweepContext(const ExperimentConfig& c, bool with_norms)
      : grid(c.R, c.n),
        f(sample_mixture(c.source.spec, grid)),
        g(sample_mixture(c.target.spec, grid)),
        sf(spectrum_of(f, c)),
        sg(spectrum_of(g, c)),
        radius(c.source.spec.support_radius()) {
    if (with_norms) {
      projections.emplace(f, eta);
      l1 = lp_norm(f, PNorm(1));
    }
  }

  DeformationNorms norms(PNorm p) const { return DeformationNorms::compute(*projections, l1, p); }
};

}  // namespace

CommandResult cmd_deform_sweep(const ExperimentConfig& config) {
  config.validate();
  require_analytic(config);
  const auto ps = pnorms(config);
  const SweepContext ctx(config, true);
  const auto deltas = config.sweep.parameters();
  const auto sw_opts = wasserstein_options(config);
  const std::size_t np = ps.size();

  struct Point {
    std::vector<double> sc_t, sc_s, sw_t, sw_s, leb_t, leb_s, bound_sc;
    double eps_inf = 0.0;
  };
  std::vector<Point> points(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), [&](int i) {
    const auto d = config.sweep.at(deltas[i], ctx.radius);
    const auto fd = sample_push_forward(config.source.spec, d, ctx.grid);
    const auto s = spectrum_of(fd, config);
    Point& pt = points[i];
    pt.sc_t = sc_between(s, ctx.sg, ps);
    pt.sc_s = sc_between(s, ctx.sf, ps);
    pt.sw_t = sliced_wasserstein_from_spectra(s, ctx.sg, config.R, ps, sw_opts);
    pt.sw_s = sliced_wasserstein_from_spectra(s, ctx.sf, config.R, ps, sw_opts);
    for (PNorm p : ps) {
      pt.leb_t.push_back(lebesgue_distance(fd, ctx.g, p));
      pt.leb_s.push_back(lebesgue_distance(fd, ctx.f, p));
      pt.bound_sc.push_back(smallest(sweep_bounds(config.sweep, deltas[i], d, ctx.norms(p), ctx.eta, p, ctx.radius)));
    }
    pt.eps_inf = displacement_sup(d);
  });

  CommandResult result;
  result.table.columns = {"family", "index", "delta", "metric", "p", "to_target", "to_source", "bound"};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const Point& pt = points[i];
    const auto idx = static_cast<long long>(i);
    for (std::size_t q = 0; q < np; ++q) {
      result.table.add({config.sweep.family, idx, deltas[i], "sliced_cramer", config.ps[q], pt.sc_t[q], pt.sc_s[q],
                        pt.bound_sc[q]});
    }
    for (std::size_t q = 0; q < np; ++q) {
      result.table.add({config.sweep.family, idx, deltas[i], "sliced_wasserstein", config.ps[q], pt.sw_t[q],
                        pt.sw_s[q], pt.eps_inf});
    }
    for (std::size_t q = 0; q < np; ++q) {
      result.table.add(
          {config.sweep.family, idx, deltas[i], "lebesgue", config.ps[q], pt.leb_t[q], pt.leb_s[q], kNaN});
    }
  }
  return result;
}

CommandResult cmd_noise_sweep(const ExperimentConfig& config) {
  config.validate();
  require_analytic(config);
  const auto ps = pnorms(config);
  const SweepContext ctx(config, false);
  const auto deltas = config.sweep.parameters();
  const int trials = config.noise.trials;
  const std::size_t np = ps.size();

  // Unit-sigma noise difference (source noise minus target noise) per trial;
  // every sigma reuses it by linearity.
  const auto unit = NoiseModel2D::constant(ctx.grid, 1.0, config.seed);
  std::vector<std::optional<Field2D>> noise(static_cast<std::size_t>(trials));
  std::vector<std::optional<PolarSpectrum>> noise_spectra(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](int k) {
    Field2D z = -1.0 * sample_noise(unit, ctx.grid, static_cast<std::uint32_t>(k), 1);
    if (config.noise.noisy_source) z = z + sample_noise(unit, ctx.grid, static_cast<std::uint32_t>(k), 0);
    noise_spectra[k] = spectrum_of(z, config);
    noise[k] = std::move(z);
  });

  const std::size_t ns = config.noise.sigmas.size();
  // values[delta][sigma][metric * np + q] -> (mean, std_err)
  std::vector<std::vector<std::vector<Moments>>> values(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), [&](int i) {
    const auto d = config.sweep.at(deltas[i], ctx.radius);
    const auto fd = sample_push_forward(config.source.spec, d, ctx.grid);
    const auto diff = spectrum_of(fd, config).combined(1.0, ctx.sg, -1.0);
    auto& out = values[i];
    out.assign(ns, std::vector<Moments>(2 * np));
    for (std::size_t s = 0; s < ns; ++s) {
      const double sigma = config.noise.sigmas[s];
      if (sigma == 0.0) {
        const auto sc = sliced_volterra_norms(diff, ps);
        for (std::size_t q = 0; q < np; ++q) {
          out[s][q] = {sc[q], 0.0};
          out[s][np + q] = {lebesgue_distance(fd, ctx.g, ps[q]), 0.0};
        }
        continue;
      }
      std::vector<std::vector<double>> samples(2 * np, std::vector<double>(static_cast<std::size_t>(trials)));
      for (int k = 0; k < trials; ++k) {
        const auto sc = sliced_volterra_norms(diff.combined(1.0, *noise_spectra[k], sigma), ps);
        const auto noisy = fd + sigma * *noise[k];
        for (std::size_t q = 0; q < np; ++q) {
          samples[q][k] = sc[q];
          samples[np + q][k] = lebesgue_distance(noisy, ctx.g, ps[q]);
        }
      }
      for (std::size_t m = 0; m < 2 * np; ++m) out[s][m] = moments(samples[m]);
    }
  });

  CommandResult result;
  result.table.columns = {"family", "index", "delta", "sigma", "metric", "p", "mean_distance", "std_err", "trials"};
  const char* metrics[] = {"sliced_cramer", "lebesgue"};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    for (std::size_t s = 0; s < ns; ++s) {
      const double sigma = config.noise.sigmas[s];
      const long long m_trials = sigma == 0.0 ? 1 : trials;
      for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t q = 0; q < np; ++q) {
          const Moments& v = values[i][s][m * np + q];
          result.table.add({config.sweep.family, static_cast<long long>(i), deltas[i], sigma, metrics[m], config.ps[q],
                            v.mean, v.std_err, m_trials});
        }
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------- bounds

CommandResult cmd_bound_check(const ExperimentConfig& config) {
  config.validate();
  require_analytic(config);
  const auto ps = pnorms(config);
  const std::size_t np = ps.size();
  const SweepContext ctx(config, true);
  const auto sw_opts = wasserstein_options(config);
  const double scale = config.corrupt_rhs ? 0.5 : 1.0;

  CommandResult result;
  result.table.columns = {"bound", "family", "delta", "p", "lhs", "rhs", "margin"};
  double worst = kInf;
  auto emit = [&](const std::string& bound, const std::string& family, double delta, double p, double lhs,
                  double rhs) {
    rhs *= scale;
    const double margin = margin_of(lhs, rhs);
    worst = std::min(worst, margin);
    result.table.add({bound, family, delta, p, lhs, rhs, margin});
  };

  std::vector<SweepConfig> sweeps;
  if (config.sweep.explicit_family) {
    sweeps.push_back(config.sweep);
  } else {
    for (const char* family : {"translate", "rotate", "dilate"}) {
      sweeps.push_back(default_sweep(family));
      sweeps.back().count = config.sweep.count;
    }
  }

  // 1D monotone maps act on the x marginal of the source.
  const auto spec1 = x_marginal(config.source.spec);
  const Grid1D grid1(-config.R, config.R, config.n);
  const auto f1 = sample_mixture(spec1, grid1);
  const double radius1 = spec1.support_radius();

  for (const SweepConfig& sweep : sweeps) {
    const auto deltas = sweep.parameters();
    struct Point {
      std::vector<double> sc, sw, mono;
      std::vector<SweepBounds> bounds;
      std::vector<double> mono_rhs;
      double eps_inf = 0.0;
    };
    std::vector<Point> points(deltas.size());
    const bool monotone = sweep.family == "translate" || sweep.family == "dilate";
    parallel_for(static_cast<int>(deltas.size()), [&](int i) {
      const auto d = sweep.at(deltas[i], ctx.radius);
      const auto s = spectrum_of(sample_push_forward(config.source.spec, d, ctx.grid), config);
      Point& pt = points[i];
      pt.sc = sc_between(s, ctx.sf, ps);
      pt.sw = sliced_wasserstein_from_spectra(s, ctx.sf, config.R, ps, sw_opts);
      pt.eps_inf = displacement_sup(d);
      for (PNorm p : ps) pt.bounds.push_back(sweep_bounds(sweep, deltas[i], d, ctx.norms(p), ctx.eta, p, ctx.radius));
      if (monotone) {
        const double slope = sweep.family == "dilate" ? deltas[i] : 1.0;
        const double shift = sweep.family == "translate" ? deltas[i] * sweep.direction.x : 0.0;
        std::vector<double> v(static_cast<std::size_t>(config.n));
        for (int j = 0; j < config.n; ++j) v[j] = slope * spec1.evaluate(slope * grid1.node(j) + shift);
        const Field1D moved(grid1, std::move(v));
        for (PNorm p : ps) {
          pt.mono.push_back(discrete_cramer_1d(f1, moved, p, cramer_options(config)));
          pt.mono_rhs.push_back(bound_monotone_1d(slope, shift, radius1, p, lp_norm(f1, p)));
        }
      }
    });
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      const Point& pt = points[i];
      for (std::size_t q = 0; q < np; ++q) {
        const double p = config.ps[q];
        const auto& b = pt.bounds[q];
        emit("main-sup", sweep.family, deltas[i], p, pt.sc[q], b.main.sup_displacement);
        emit("main-mean", sweep.family, deltas[i], p, pt.sc[q], b.main.mean_displacement);
        emit("main-mass", sweep.family, deltas[i], p, pt.sc[q], b.main.mass);
        for (const auto& [name, rhs] : b.special) emit(name, sweep.family, deltas[i], p, pt.sc[q], rhs);
        emit("wasserstein-displacement", sweep.family, deltas[i], p, pt.sw[q], pt.eps_inf);
        if (monotone) emit("monotone-1d", sweep.family, deltas[i], p, pt.mono[q], pt.mono_rhs[q]);
      }
    }
  }

  if (!config.sweep.explicit_family) {
    const auto clean_sc = sc_between(ctx.sf, ctx.sg, ps);
    const auto clean_sw = sliced_wasserstein_from_spectra(ctx.sf, ctx.sg, config.R, ps, sw_opts);
    const auto& widths = config.blur_widths;
    struct Blur {
      std::vector<double> sc, sw, factor;
      double mass;
    };
    std::vector<Blur> blurs(widths.size());
    parallel_for(static_cast<int>(widths.size()), [&](int i) {
      const auto w = sample_mixture(GaussianMixtureSpec{{{0.0, 0.0}}, {1.0}, widths[i], true}, ctx.grid);
      const auto sfw = spectrum_of(convolve2d(ctx.f, w), config);
      const auto sgw = spectrum_of(convolve2d(ctx.g, w), config);
      const ProjectionNorms wn(w, ctx.eta);
      Blur& b = blurs[i];
      b.sc = sc_between(sfw, sgw, ps);
      b.sw = sliced_wasserstein_from_spectra(sfw, sgw, config.R, ps, sw_opts);
      for (PNorm p : ps) b.factor.push_back(wn.mixed(PNorm(1), p));
      b.mass = lp_norm(w, PNorm(1));
    });
    for (std::size_t i = 0; i < widths.size(); ++i) {
      for (std::size_t q = 0; q < np; ++q) {
        emit("convolution", "blur", widths[i], config.ps[q], blurs[i].sc[q], blurs[i].factor[q] * clean_sc[q]);
        emit("convolution-wasserstein", "blur", widths[i], config.ps[q], blurs[i].sw[q], blurs[i].mass * clean_sw[q]);
      }
    }
  }

  result.exit_code = worst < -config.tolerances.bound_slack ? kExitViolation : kExitSuccess;
  return result;
}

// ---------------------------------------------------------------- oracles

CommandResult cmd_oracle_check(const ExperimentConfig& config) {
  config.validate();
  CommandResult result;
  result.table.columns = {"oracle", "detail", "value", "tolerance", "pass"};
  bool ok = true;
  auto emit = [&](const std::string& oracle, const std::string& detail, double value, double tol, bool pass) {
    ok = ok && pass;
    result.table.add({oracle, detail, value, tol, pass ? "yes" : "no"});
  };

  {
    const Grid2D grid(config.R, config.oracle_n);
    const auto x = sample_noise(NoiseModel2D::constant(grid, 1.0, config.seed), grid, 0, 7);
    const auto angles = default_angles(config.oracle_n);
    const auto direct = polar_coefficients_direct(x, angles);
    const auto fast = polar_coefficients_fast(x, angles, config.tolerances.polar);
    double err = 0.0, scale = 0.0;
    for (std::size_t l = 0; l < angles.size(); ++l) {
      for (int k = -config.oracle_n / 2; k < config.oracle_n / 2; ++k) {
        err = std::max(err, std::abs(fast.at(l, k) - direct.at(l, k)));
        scale = std::max(scale, std::abs(direct.at(l, k)));
      }
    }
    emit("polar-fast-vs-direct", "n=" + std::to_string(config.oracle_n), err / scale, config.tolerances.oracle_polar,
         err / scale <= config.tolerances.oracle_polar);
  }

  {
    const auto ps = pnorms(config);
    std::vector<std::vector<double>> rel(ps.size());
    std::vector<double> sizes;
    CramerOptions quiet;
    quiet.mean_tolerance = kInf;
    for (int n : kOracleSizes) {
      const Grid1D grid(-2.0, 2.0, n);
      std::vector<double> v(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) v[j] = smooth_signal(grid.node(j));
      const Field1D x(grid, std::move(v));
      sizes.push_back(n);
      for (std::size_t q = 0; q < ps.size(); ++q) {
        const double oracle = oracle_volterra_norm(x, ps[q]);
        rel[q].push_back(std::abs(discrete_volterra_norm_1d(x, ps[q], quiet) - oracle) / oracle);
      }
    }
    for (std::size_t q = 0; q < ps.size(); ++q) {
      const auto fit = fit_loglog(sizes, rel[q]);
      const double order = fit ? -fit->slope : kNaN;
      emit("volterra-vs-cumsum", "p=" + format_double(config.ps[q]) + " n=512 relative", rel[q].back(), kNaN, true);
      emit("volterra-vs-cumsum-order", "p=" + format_double(config.ps[q]), order, config.tolerances.oracle_order,
           order >= config.tolerances.oracle_order);
    }
  }

  {
    const Grid1D grid(-1.0, 1.0, kOraclePairSize);
    double worst = 0.0;
    for (int k = 0; k < kOraclePairs; ++k) {
      const auto x = random_density(grid, config.seed, 2 * k), y = random_density(grid, config.seed, 2 * k + 1);
      const double c1 = discrete_cramer_1d(x, y, PNorm(1));
      const double w1 = wasserstein_1d(x, y, PNorm(1));
      worst = std::max(worst, std::abs(c1 - w1) / w1);
    }
    emit("cramer1-vs-w1", std::to_string(kOraclePairs) + " pairs n=" + std::to_string(kOraclePairSize), worst,
         config.tolerances.oracle_cramer_w1, worst <= config.tolerances.oracle_cramer_w1);
  }

  result.exit_code = ok ? kExitSuccess : kExitViolation;
  return result;
}

CommandResult run_command(const ExperimentConfig& config) {
  if (config.command == "dist") return cmd_dist(config);
  if (config.command == "deform-sweep") return cmd_deform_sweep(config);
  if (config.command == "noise-sweep") return cmd_noise_sweep(config);
  if (config.command == "bound-check") return cmd_bound_check(config);
  if (config.command == "oracle-check") return cmd_oracle_check(config);
  throw ConfigError("unknown command '" + config.command + "'");
}

}  // namespace scm

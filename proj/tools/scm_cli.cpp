#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "scm/experiment.hpp"
#include "scm/field_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

struct Overrides {
  std::string config_path, out, format, p_list, deform;
  std::optional<std::uint64_t> seed;
  std::optional<int> n, trials, threads;
  bool corrupt_rhs = false;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "RNG seed (SCM_SEED in the environment also sets it)");
  cmd->add_option("--n", o.n, "grid size (even)");
  cmd->add_option("--p", o.p_list, "comma-separated exponents, e.g. 1,2,10 or inf");
  cmd->add_option("--deform", o.deform, "translate:vx,vy | rotate:theta | dilate:alpha | affine:a11,a12,a21,a22,b1,b2");
  cmd->add_option("--trials", o.trials, "noise trials per point");
  cmd->add_option("--threads", o.threads, "worker threads (0: runtime default)");
  cmd->add_flag("--debug-corrupt-rhs", o.corrupt_rhs, "halve every bound (harness self-test)")->group("");
}

std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "inf" || item == "infinity") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw scm::ConfigError("--p: cannot parse '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw scm::ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t parse_seed(const char* text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || text[used] != '\0') throw scm::ConfigError(std::string("SCM_SEED is not an integer: ") + text);
  return v;
}

scm::ExperimentConfig resolve(const std::string& command, const Overrides& o) {
  auto config = o.config_path.empty() ? scm::ExperimentConfig() : scm::ExperimentConfig::from_json(read_file(o.config_path));
  config.command = command;
  if (const char* env = std::getenv("SCM_SEED")) config.seed = parse_seed(env);
  if (o.seed) config.seed = *o.seed;
  if (!o.out.empty()) config.out_path = o.out;
  if (!o.format.empty()) config.format = o.format;
  if (o.n) config.n = *o.n;
  if (!o.p_list.empty()) config.ps = parse_p_list(o.p_list);
  if (!o.deform.empty()) config.set_deform(o.deform);
  if (o.trials) config.noise.trials = *o.trials;
  if (o.threads) config.threads = *o.threads;
  if (o.corrupt_rhs) config.corrupt_rhs = true;
  config.validate();
  return config;
}

void write_output(const scm::ExperimentConfig& config, const scm::ResultTable& table) {
  const std::string text = config.format == "json" ? table.to_json(config.to_json()) : table.to_csv();
  if (config.out_path.empty() || config.out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(config.out_path, std::ios::binary);
  if (!out) throw scm::ConfigError("cannot write " + config.out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliced Cramer distance experiments"};
  app.require_subcommand(1);
  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"dist", "distances between the source and target fields"},
      {"deform-sweep", "distances along a one-parameter deformation family"},
      {"noise-sweep", "deformation sweep against noisy targets"},
      {"bound-check", "measured distances against the deformation and convolution bounds"},
      {"oracle-check", "fast paths against their direct oracles"},
  };
  for (const auto& [name, help] : commands) add_common_options(app.add_subcommand(name, help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : scm::kExitConfig;
  }

  try {
    const auto config = resolve(app.get_subcommands().front()->get_name(), o);
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
    const auto result = scm::run_command(config);
    write_output(config, result.table);
    return result.exit_code;
  } catch (const scm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return scm::kExitConfig;
  } catch (const scm::FieldFormatError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return scm::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

// rgflow: running-coupling solvers over a mu^2 grid.
//
//   rgflow run     <config.json> [--methods all|m1,m2] [grid flags] [--format csv|json] [--out file]
//   rgflow compare <config.json> [--reference odeOracle|rootOracle] [--flow model|full] [--max-dev tol]
//   rgflow pade    <config.json> [--show] [--format text|json]
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure (no output written).

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rgflow/config.hpp"
#include "rgflow/report.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridFlags {
  std::optional<double> mu_min;
  std::optional<double> mu_max;
  std::optional<int> points;
  std::optional<std::string> spacing;
};

struct SeriesFlags {
  std::optional<int> kmax;
  std::optional<double> tol;
};

struct OutputFlags {
  std::string format;
  std::string out;
  bool reproducible = false;
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--mu-min", g.mu_min, "Lowest mu^2 of the grid")->check(CLI::PositiveNumber);
  cmd->add_option("--mu-max", g.mu_max, "Highest mu^2 of the grid")->check(CLI::PositiveNumber);
  cmd->add_option("--points", g.points, "Number of grid points")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", g.spacing, "Grid spacing in mu^2")->check(CLI::IsMember({"log", "linear"}));
}

void add_series_flags(CLI::App* cmd, SeriesFlags& s) {
  cmd->add_option("--kmax", s.kmax, "Series truncation limit (overrides RGFLOW_KMAX)")->check(CLI::PositiveNumber);
  cmd->add_option("--series-tol", s.tol, "Series stopping tolerance (overrides RGFLOW_TOL)")
      ->check(CLI::PositiveNumber);
}

template <typename T>
std::optional<T> env_number(const char* name) {
  const char* text = std::getenv(name);
  if (!text || !*text) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text, &end);
  if (errno != 0 || end == text || *end != '\0' || !(v > 0.0))
    throw UsageError(std::string(name) + " must be a positive number, got '" + text + "'");
  if constexpr (std::is_integral_v<T>) {
    if (v != static_cast<double>(static_cast<T>(v))) throw UsageError(std::string(name) + " must be an integer");
  }
  return static_cast<T>(v);
}

// Precedence: flag, then environment, then library default.
rgflow::SolverOptions solver_options(const SeriesFlags& flags) {
  rgflow::SolverOptions opts;
  if (auto k = flags.kmax ? flags.kmax : env_number<int>("RGFLOW_KMAX")) opts.series.k_max = *k;
  if (auto t = flags.tol ? flags.tol : env_number<double>("RGFLOW_TOL")) opts.series.tau = *t;
  return opts;
}

std::vector<double> grid_for(const rgflow::TheoryConfig& cfg, const GridFlags& flags) {
  rgflow::GridSpec spec = cfg.grid.value_or(rgflow::GridSpec{10.0, 1.0e4, 20, true});
  if (flags.mu_min) spec.mu_sq_min = *flags.mu_min;
  if (flags.mu_max) spec.mu_sq_max = *flags.mu_max;
  if (flags.points) spec.points = *flags.points;
  if (flags.spacing) spec.log_spacing = *flags.spacing == "log";
  if (spec.mu_sq_max < spec.mu_sq_min) throw UsageError("--mu-max must not be below --mu-min");
  return rgflow::make_grid(spec);
}

std::vector<rgflow::Method> parse_methods(const std::vector<std::string>& names,
                                          const std::vector<rgflow::Method>& all) {
  if (names.empty()) throw UsageError("empty method list");
  if (names.size() == 1 && names[0] == "all") return all;
  std::vector<rgflow::Method> out;
  for (const std::string& n : names) {
    if (n.empty()) throw UsageError("empty method name");
    out.push_back(rgflow::Method::parse(n));
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Running-coupling solvers: closed forms, series inversion and reference oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("rgflow ") + rgflow::kToolVersion);

  std::string config_path;
  GridFlags grid;
  SeriesFlags series;
  OutputFlags output;
  std::vector<std::string> method_names;

  CLI::App* run = app.add_subcommand("run", "Evaluate methods over a mu^2 grid");
  run->add_option("config", config_path, "Theory configuration (JSON)")->required();
  run->add_option("--methods", method_names, "Comma-separated methods, or 'all'")
      ->delimiter(',')
      ->expected(0, -1);
  add_grid_flags(run, grid);
  add_series_flags(run, series);
  output.format = "csv";
  run->add_option("--format", output.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--out", output.out, "Output file (default stdout)");
  run->add_flag("--reproducible", output.reproducible, "Omit the timestamp from JSON output");

  std::string reference = "odeOracle";
  std::string flow = "model";
  std::optional<double> max_dev;
  std::string compare_format = "text";
  CLI::App* compare = app.add_subcommand("compare", "Deviation of each method from a reference oracle");
  compare->add_option("config", config_path, "Theory configuration (JSON)")->required();
  compare->add_option("--methods", method_names, "Comma-separated methods (default: every closed form)")
      ->delimiter(',')
      ->expected(0, -1);
  compare->add_option("--reference", reference, "Reference oracle")->check(CLI::IsMember({"odeOracle", "rootOracle"}));
  compare->add_option("--flow", flow, "model: oracle integrates each method's own flow; full: the full beta")
      ->check(CLI::IsMember({"model", "full"}));
  compare->add_option("--max-dev", max_dev, "Largest relative deviation accepted")->check(CLI::PositiveNumber);
  add_grid_flags(compare, grid);
  add_series_flags(compare, series);
  compare->add_option("--format", compare_format, "Output format")->check(CLI::IsMember({"text", "json"}));
  compare->add_option("--out", output.out, "Output file (default stdout)");
  compare->add_flag("--reproducible", output.reproducible, "Omit the timestamp from JSON output");

  bool show = false;
  std::string pade_format = "text";
  CLI::App* pade = app.add_subcommand("pade", "Show the rational approximant used for the configured loop order");
  pade->add_option("config", config_path, "Theory configuration (JSON)")->required();
  pade->add_flag("--show", show, "Also print denominator roots and partial-fraction weights");
  pade->add_option("--format", pade_format, "Output format")->check(CLI::IsMember({"text", "json"}));
  pade->add_option("--out", output.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const rgflow::TheoryConfig cfg = rgflow::load_config(config_path);
    std::ostringstream text;

    if (*run) {
      const rgflow::SolverOptions opts = solver_options(series);
      if (run->count("--methods") > 0 && method_names.empty()) throw UsageError("empty method list");
      const auto all = rgflow::available_methods(cfg.beta);
      const auto methods = method_names.empty() ? all : parse_methods(method_names, all);
      const rgflow::RunReport report = rgflow::evaluate_run(cfg, methods, grid_for(cfg, grid), opts);
      if (output.format == "csv")
        rgflow::write_run_csv(report, text);
      else
        text << rgflow::run_json(report, output.reproducible).dump(2) << "\n";
    } else if (*compare) {
      const rgflow::SolverOptions opts = solver_options(series);
      if (compare->count("--methods") > 0 && method_names.empty()) throw UsageError("empty method list");
      const auto methods = method_names.empty() ? rgflow::closed_form_methods(cfg.beta)
                                     : parse_methods(method_names, rgflow::closed_form_methods(cfg.beta));
      const double tolerance = max_dev.value_or(cfg.compare_tolerance.value_or(1e-8));
      const rgflow::CompareReport report = rgflow::evaluate_compare(
          cfg, methods, rgflow::Method::parse(reference),
          flow == "model" ? rgflow::FlowMode::Model : rgflow::FlowMode::Full, grid_for(cfg, grid), tolerance, opts);
      if (compare_format == "text")
        rgflow::write_compare_text(report, text);
      else
        text << rgflow::compare_json(report, output.reproducible).dump(2) << "\n";
    } else if (*pade) {
      if (pade_format == "text")
        rgflow::write_pade_text(cfg, show, text);
      else
        text << rgflow::pade_json(cfg, show).dump(2) << "\n";
    }
    emit(text.str(), output.out);
    return 0;
  } catch (const rgflow::ConfigError& e) {
    std::cerr << "rgflow: invalid config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UsageError& e) {
    std::cerr << "rgflow: " << e.what() << "\n";
    return kExitValidation;
  } catch (const rgflow::Error& e) {
    std::cerr << "rgflow: " << e.what() << "\n";
    return e.kind() == rgflow::ErrorKind::InvalidArgument ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "rgflow: " << e.what() << "\n";
    return kExitNumerical;
  }
}

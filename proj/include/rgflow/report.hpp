#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgflow/config.hpp"
#include "rgflow/flow.hpp"

namespace rgflow {

inline constexpr const char* kToolVersion = "1.0.0";

std::vector<double> make_grid(const GridSpec& spec);

/// Lambda^2 the method uses for this theory: fitted through the reference
/// point when one is given, the configured value otherwise.
double method_lambda_sq(const TheoryConfig& cfg, Method method, const SolverOptions& options = {});

struct RunReport {
  std::string config_name;
  std::uint64_t config_hash = 0;
  std::vector<double> grid;
  std::vector<Method> methods;
  /// One entry per method, in method order.
  std::vector<double> lambda_sq;
  /// Grid-major: every method at grid[0], then grid[1], ...
  std::vector<RunResult> rows;
  SolverOptions options;
};

/// Evaluates every method at every grid point. Any solver error propagates;
/// fallbacks are recorded in the row diagnostics.
RunReport evaluate_run(const TheoryConfig& cfg, const std::vector<Method>& methods, const std::vector<double>& grid,
                       const SolverOptions& options = {});

enum class FlowMode {
  /// Each method against the oracle integrating the flow it solves exactly.
  Model,
  /// Every method against the oracle integrating the full beta polynomial.
  Full,
};

struct MethodDeviation {
  Method method;
  double max_rel = 0.0;
  double mean_rel = 0.0;
  bool pass = false;
  /// Rows whose diagnostics carry warnings.
  int flagged_points = 0;
};

struct CompareReport {
  std::string config_name;
  std::uint64_t config_hash = 0;
  Method reference;
  FlowMode flow = FlowMode::Model;
  double tolerance = 1e-8;
  std::vector<double> grid;
  std::vector<MethodDeviation> deviations;
  SolverOptions options;

  bool pass() const;
};

CompareReport evaluate_compare(const TheoryConfig& cfg, const std::vector<Method>& methods, Method reference,
                               FlowMode flow, const std::vector<double>& grid, double tolerance,
                               const SolverOptions& options = {});

/// %.17g rendering used by every writer.
std::string format_real(double v);
std::string hash_string(std::uint64_t hash);

void write_run_csv(const RunReport& report, std::ostream& out);
nlohmann::ordered_json run_json(const RunReport& report, bool reproducible);

void write_compare_text(const CompareReport& report, std::ostream& out);
nlohmann::ordered_json compare_json(const CompareReport& report, bool reproducible);

/// Approximant chosen for the configured loop order, with its denominator
/// roots and the log form of the inverse-coupling antiderivative.
nlohmann::ordered_json pade_json(const TheoryConfig& cfg, bool show);
void write_pade_text(const TheoryConfig& cfg, bool show, std::ostream& out);

}  // namespace rgflow

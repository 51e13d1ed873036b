#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rgflow/beta_function.hpp"

namespace rgflow {

/// Malformed or inconsistent theory configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReferencePoint {
  double mu0_sq = 0.0;
  double x0 = 0.0;
};

struct GridSpec {
  double mu_sq_min = 0.0;
  double mu_sq_max = 0.0;
  int points = 0;
  bool log_spacing = true;
};

/// Theory description read from a JSON document:
///
///   {
///     "name": "...",
///     "beta0": 1.0,
///     "c": [c1, ..., cN],          // c0 = 1 implied
///     "c0": 1.0,                   // optional, must equal 1
///     "reference": {"mu0_sq": ..., "x0": ...}   // or "lambda_sq": ...
///     "grid": {"mu_sq_min": ..., "mu_sq_max": ..., "points": ..., "spacing": "log"},
///     "tolerances": {"compare": 1e-8},
///     "notes": "...", "provenance": "..."
///   }
struct TheoryConfig {
  std::string name;
  BetaFunction beta;
  std::optional<ReferencePoint> reference;
  std::optional<double> lambda_sq;
  std::optional<GridSpec> grid;
  std::optional<double> compare_tolerance;
  std::string notes;
  std::string provenance;
  /// FNV-1a of the document text as read.
  std::uint64_t hash = 0;
};

TheoryConfig parse_config(std::string_view text);
TheoryConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace rgflow

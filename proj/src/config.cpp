#include "rgflow/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rgflow {

namespace {

using nlohmann::json;

double positive(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double v = j.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + "." + key + " must be positive and finite");
  return v;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

GridSpec parse_grid(const json& g) {
  if (!g.is_object()) throw ConfigError("grid must be an object");
  reject_unknown(g, {"mu_sq_min", "mu_sq_max", "points", "spacing"}, "grid");
  GridSpec spec;
  spec.mu_sq_min = positive(g, "mu_sq_min", "grid");
  spec.mu_sq_max = positive(g, "mu_sq_max", "grid");
  if (spec.mu_sq_max < spec.mu_sq_min) throw ConfigError("grid.mu_sq_max must not be below grid.mu_sq_min");
  if (!g.contains("points") || !g.at("points").is_number_integer() || g.at("points").get<int>() < 1)
    throw ConfigError("grid.points must be a positive integer");
  spec.points = g.at("points").get<int>();
  if (g.contains("spacing")) {
    const json& s = g.at("spacing");
    if (s == "log")
      spec.log_spacing = true;
    else if (s == "linear")
      spec.log_spacing = false;
    else
      throw ConfigError("grid.spacing must be \"log\" or \"linear\"");
  }
  return spec;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

TheoryConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, {"name", "beta0", "c", "c0", "reference", "lambda_sq", "grid", "tolerances", "notes", "provenance"},
                 "config");

  TheoryConfig cfg;
  cfg.hash = fnv1a(text);

  if (!doc.contains("name") || !doc.at("name").is_string()) throw ConfigError("name must be a string");
  cfg.name = doc.at("name").get<std::string>();

  if (!doc.contains("beta0") || !doc.at("beta0").is_number()) throw ConfigError("beta0 must be a number");
  const double beta0 = doc.at("beta0").get<double>();
  if (beta0 == 0.0 || !std::isfinite(beta0)) throw ConfigError("beta0 must be finite and nonzero");

  if (doc.contains("c0")) {
    if (!doc.at("c0").is_number() || doc.at("c0").get<double>() != 1.0)
      throw ConfigError("c0 must equal 1 (the beta function is normalized by beta0)");
  }
  if (!doc.contains("c") || !doc.at("c").is_array()) throw ConfigError("c must be an array of c1..cN");
  std::vector<double> c{1.0};
  for (const json& v : doc.at("c")) {
    if (!v.is_number()) throw ConfigError("c entries must be numbers");
    const double value = v.get<double>();
    if (!std::isfinite(value)) throw ConfigError("c entries must be finite");
    c.push_back(value);
  }
  cfg.beta = BetaFunction(beta0, std::move(c));

  const bool has_ref = doc.contains("reference");
  const bool has_lambda = doc.contains("lambda_sq");
  if (has_ref == has_lambda) throw ConfigError("exactly one of reference and lambda_sq must be given");
  if (has_ref) {
    const json& r = doc.at("reference");
    if (!r.is_object()) throw ConfigError("reference must be an object");
    reject_unknown(r, {"mu0_sq", "x0"}, "reference");
    cfg.reference = ReferencePoint{positive(r, "mu0_sq", "reference"), positive(r, "x0", "reference")};
  } else {
    cfg.lambda_sq = positive(doc, "lambda_sq", "config");
  }

  if (doc.contains("grid")) cfg.grid = parse_grid(doc.at("grid"));

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    reject_unknown(t, {"compare"}, "tolerances");
    if (t.contains("compare")) cfg.compare_tolerance = positive(t, "compare", "tolerances");
  }

  for (const char* key : {"notes", "provenance"}) {
    if (!doc.contains(key)) continue;
    if (!doc.at(key).is_string()) throw ConfigError(std::string(key) + " must be a string");
    (std::string_view(key) == "notes" ? cfg.notes : cfg.provenance) = doc.at(key).get<std::string>();
  }
  return cfg;
}

TheoryConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace rgflow

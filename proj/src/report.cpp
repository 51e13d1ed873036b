#include "rgflow/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <thread>

#include "rgflow/oracle.hpp"
#include "rgflow/pade.hpp"

namespace rgflow {

namespace {

using nlohmann::ordered_json;

// Runs fn(0..n-1) over a small worker pool. Errors are rethrown by lowest
// index so failures report the same way on every run.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json settings_json(const SolverOptions& o) {
  return {{"kmax", o.series.k_max},
          {"series_tol", o.series.tau},
          {"ode_rel_tol", o.ode.rel_tol},
          {"ode_abs_tol", o.ode.abs_tol},
          {"ode_max_steps", o.ode.max_steps}};
}

ordered_json header_json(const std::string& command, const std::string& name, std::uint64_t hash,
                         const SolverOptions& options, bool reproducible) {
  ordered_json j;
  j["tool"] = "rgflow";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = {{"name", name}, {"hash", hash_string(hash)}};
  j["settings"] = settings_json(options);
  if (!reproducible) j["generated_at"] = utc_timestamp();
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

ordered_json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

double lambda_for_full_flow(const TheoryConfig& cfg, const SolverOptions& options) {
  return method_lambda_sq(cfg, {MethodKind::RootOracle, 0}, options);
}

// ODE oracle values on the grid for the given flow. Without a reference point
// the integration starts from the root oracle at the largest grid scale.
std::vector<double> ode_values(const TheoryConfig& cfg, const FlowModel& flow, double lambda_sq,
                               const std::vector<double>& grid, const SolverOptions& options,
                               std::string* seed_note) {
  if (cfg.reference) return ode_run(flow, cfg.reference->mu0_sq, cfg.reference->x0, grid, options.ode);
  const double mu_seed = *std::max_element(grid.begin(), grid.end());
  const double x_seed = solve_root_oracle(flow, ScaleSpec::at(flow.beta0, lambda_sq, mu_seed).u).x;
  *seed_note = "odeOracle seeded from rootOracle at mu_sq = " + format_real(mu_seed);
  return ode_run(flow, mu_seed, x_seed, grid, options.ode);
}

}  // namespace

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hash_string(std::uint64_t hash) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

std::vector<double> make_grid(const GridSpec& spec) {
  if (spec.points < 1) fail(ErrorKind::InvalidArgument, "grid needs at least one point");
  if (!(spec.mu_sq_min > 0.0) || !(spec.mu_sq_max >= spec.mu_sq_min))
    fail(ErrorKind::InvalidArgument, "grid needs 0 < mu_sq_min <= mu_sq_max");
  std::vector<double> grid(static_cast<std::size_t>(spec.points));
  if (spec.points == 1) {
    grid[0] = spec.mu_sq_min;
    return grid;
  }
  const double lo = spec.log_spacing ? std::log(spec.mu_sq_min) : spec.mu_sq_min;
  const double hi = spec.log_spacing ? std::log(spec.mu_sq_max) : spec.mu_sq_max;
  for (int i = 0; i < spec.points; ++i) {
    const double v = lo + (hi - lo) * i / (spec.points - 1);
    grid[static_cast<std::size_t>(i)] = spec.log_spacing ? std::exp(v) : v;
  }
  grid.front() = spec.mu_sq_min;
  grid.back() = spec.mu_sq_max;
  return grid;
}

double method_lambda_sq(const TheoryConfig& cfg, Method method, const SolverOptions& options) {
  if (!cfg.reference) return *cfg.lambda_sq;
  if (method.kind == MethodKind::OdeOracle) method = {MethodKind::RootOracle, 0};
  return lambda_from_reference(method, cfg.beta, cfg.reference->mu0_sq, cfg.reference->x0, options);
}

RunReport evaluate_run(const TheoryConfig& cfg, const std::vector<Method>& methods, const std::vector<double>& grid,
                       const SolverOptions& options) {
  if (methods.empty()) fail(ErrorKind::InvalidArgument, "no methods requested");
  RunReport report;
  report.config_name = cfg.name;
  report.config_hash = cfg.hash;
  report.grid = grid;
  report.methods = methods;
  report.options = options;
  for (const Method& m : methods) report.lambda_sq.push_back(method_lambda_sq(cfg, m, options));

  const std::size_t nm = methods.size();
  report.rows.resize(grid.size() * nm);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < nm; ++j) report.rows[i * nm + j] = {grid[i], methods[j], 0.0, {}};

  for (std::size_t j = 0; j < nm; ++j) {
    if (methods[j].kind != MethodKind::OdeOracle) continue;
    std::string note;
    const std::vector<double> xs =
        ode_values(cfg, FlowModel::from_beta(cfg.beta), report.lambda_sq[j], grid, options, &note);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      RunResult& row = report.rows[i * nm + j];
      row.x = xs[i];
      if (!note.empty()) row.diagnostics.warnings.push_back(note);
    }
  }

  parallel_for(report.rows.size(), [&](std::size_t idx) {
    RunResult& row = report.rows[idx];
    if (row.method.kind == MethodKind::OdeOracle) return;
    const double u = ScaleSpec::at(cfg.beta.beta0, report.lambda_sq[idx % nm], row.mu_sq).u;
    const Solution s = solve(row.method, cfg.beta, u, options);
    row.x = s.x;
    row.diagnostics = s.diagnostics;
  });
  return report;
}

bool CompareReport::pass() const {
  return !deviations.empty() &&
         std::all_of(deviations.begin(), deviations.end(), [](const MethodDeviation& d) { return d.pass; });
}

CompareReport evaluate_compare(const TheoryConfig& cfg, const std::vector<Method>& methods, Method reference,
                               FlowMode flow, const std::vector<double>& grid, double tolerance,
                               const SolverOptions& options) {
  if (methods.empty()) fail(ErrorKind::InvalidArgument, "no methods requested");
  if (!reference.is_oracle()) fail(ErrorKind::InvalidArgument, "reference must be odeOracle or rootOracle");
  CompareReport report;
  report.config_name = cfg.name;
  report.config_hash = cfg.hash;
  report.reference = reference;
  report.flow = flow;
  report.tolerance = tolerance;
  report.grid = grid;
  report.options = options;

  auto reference_values = [&](const FlowModel& model, double lambda_sq) {
    if (reference.kind == MethodKind::OdeOracle) {
      std::string note;
      return ode_values(cfg, model, lambda_sq, grid, options, &note);
    }
    std::vector<double> xs(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      xs[i] = solve_root_oracle(model, ScaleSpec::at(model.beta0, lambda_sq, grid[i]).u).x;
    });
    return xs;
  };

  std::vector<double> full_reference;
  if (flow == FlowMode::Full)
    full_reference = reference_values(FlowModel::from_beta(cfg.beta), lambda_for_full_flow(cfg, options));

  for (const Method& m : methods) {
    if (m.is_oracle()) fail(ErrorKind::InvalidArgument, "compare: " + m.name() + " is a reference, not a method");
    const double lambda_sq = method_lambda_sq(cfg, m, options);
    const std::vector<double> ref =
        flow == FlowMode::Full ? full_reference : reference_values(model_flow(m, cfg.beta), lambda_sq);

    std::vector<Solution> sols(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      sols[i] = solve(m, cfg.beta, ScaleSpec::at(cfg.beta.beta0, lambda_sq, grid[i]).u, options);
    });

    MethodDeviation d;
    d.method = m;
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double dev = std::abs(sols[i].x - ref[i]) / std::abs(ref[i]);
      d.max_rel = std::max(d.max_rel, dev);
      sum += dev;
      if (!sols[i].diagnostics.warnings.empty()) ++d.flagged_points;
    }
    d.mean_rel = sum / static_cast<double>(grid.size());
    d.pass = d.max_rel <= tolerance;
    report.deviations.push_back(d);
  }
  return report;
}

void write_run_csv(const RunReport& report, std::ostream& out) {
  out << "mu_sq,method,x,residual,kmax,branch,warnings\n";
  for (const RunResult& r : report.rows) {
    out << format_real(r.mu_sq) << ',' << csv_field(r.method.name()) << ',' << format_real(r.x) << ','
        << format_real(r.diagnostics.residual) << ',' << r.diagnostics.k_max << ',' << csv_field(r.diagnostics.branch)
        << ',' << csv_field(join(r.diagnostics.warnings, " | ")) << '\n';
  }
}

ordered_json run_json(const RunReport& report, bool reproducible) {
  ordered_json j = header_json("run", report.config_name, report.config_hash, report.options, reproducible);
  j["grid"] = report.grid;
  ordered_json lambdas = ordered_json::object();
  for (std::size_t m = 0; m < report.methods.size(); ++m) lambdas[report.methods[m].name()] = report.lambda_sq[m];
  j["lambda_sq"] = lambdas;
  ordered_json rows = ordered_json::array();
  for (const RunResult& r : report.rows) {
    rows.push_back({{"mu_sq", r.mu_sq},
                    {"method", r.method.name()},
                    {"x", r.x},
                    {"residual", r.diagnostics.residual},
                    {"kmax", r.diagnostics.k_max},
                    {"branch", r.diagnostics.branch},
                    {"warnings", r.diagnostics.warnings}});
  }
  j["rows"] = rows;
  return j;
}

void write_compare_text(const CompareReport& report, std::ostream& out) {
  out << "reference: " << report.reference.name() << " ("
      << (report.flow == FlowMode::Model ? "each method's own flow" : "full beta") << ")\n";
  out << "grid: " << report.grid.size() << " points, mu_sq in [" << format_real(report.grid.front()) << ", "
      << format_real(report.grid.back()) << "]\n";
  char tol[32];
  std::snprintf(tol, sizeof tol, "%g", report.tolerance);
  out << "tolerance: " << tol << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-24s %-24s %-8s %s\n", "method", "max_rel_dev", "mean_rel_dev", "verdict",
                "flagged");
  out << line;
  for (const MethodDeviation& d : report.deviations) {
    std::snprintf(line, sizeof line, "%-16s %-24s %-24s %-8s %d\n", d.method.name().c_str(),
                  format_real(d.max_rel).c_str(), format_real(d.mean_rel).c_str(), d.pass ? "PASS" : "FAIL",
                  d.flagged_points);
    out << line;
  }
  out << "verdict: " << (report.pass() ? "PASS" : "FAIL") << "\n";
}

ordered_json compare_json(const CompareReport& report, bool reproducible) {
  ordered_json j = header_json("compare", report.config_name, report.config_hash, report.options, reproducible);
  j["reference"] = report.reference.name();
  j["flow"] = report.flow == FlowMode::Model ? "model" : "full";
  j["tolerance"] = report.tolerance;
  j["grid"] = report.grid;
  ordered_json methods = ordered_json::array();
  for (const MethodDeviation& d : report.deviations) {
    methods.push_back({{"method", d.method.name()},
                       {"max_rel_dev", d.max_rel},
                       {"mean_rel_dev", d.mean_rel},
                       {"flagged_points", d.flagged_points},
                       {"verdict", d.pass ? "PASS" : "FAIL"}});
  }
  j["methods"] = methods;
  j["verdict"] = report.pass() ? "PASS" : "FAIL";
  return j;
}

ordered_json pade_json(const TheoryConfig& cfg, bool show) {
  const PadeApproximant p = pade_for_loop_order(cfg.beta);
  ordered_json j;
  j["name"] = cfg.name;
  j["loops"] = cfg.beta.loops();
  j["order"] = "[" + std::to_string(p.order_n) + "/" + std::to_string(p.order_m) + "]";
  j["numerator"] = std::vector<double>(p.num_coeffs.begin(), p.num_coeffs.end());
  j["denominator"] = std::vector<double>(p.den_coeffs.begin(), p.den_coeffs.end());
  if (p.order_m == 0) j["reduction"] = "none";
  if (!show) return j;

  ordered_json roots = ordered_json::array();
  if (p.order_m > 0) {
    const RootSet rs = poly_roots(p.denominator());
    for (int i = 0; i < rs.count(); ++i) roots.push_back(complex_json(rs.roots(i)));
  }
  j["denominator_roots"] = roots;

  const InverseFlow inv = inverse_flow(pade_model(cfg.beta.beta0, p));
  ordered_json form;
  form["polynomial"] = std::vector<double>(inv.form.poly_part.coeffs().begin(), inv.form.poly_part.coeffs().end());
  ordered_json logs = ordered_json::array();
  for (const LogTerm& t : inv.form.log_terms)
    logs.push_back({{"offset", complex_json(t.offset)}, {"weight", complex_json(t.weight)}});
  form["log_terms"] = logs;
  ordered_json poles = ordered_json::array();
  for (const PoleTerm& t : inv.form.pole_terms) poles.push_back({{"order", t.order}, {"coeff", t.coeff}});
  form["pole_terms"] = poles;
  j["inverse_coupling_form"] = form;
  j["physical_branch_y_min"] = inv.y_low;
  return j;
}

void write_pade_text(const TheoryConfig& cfg, bool show, std::ostream& out) {
  const ordered_json j = pade_json(cfg, show);
  out << "theory: " << cfg.name << "\n";
  out << "loops: " << cfg.beta.loops() << "\n";
  out << "approximant: " << j["order"].get<std::string>();
  if (j.contains("reduction")) out << " (beta polynomial used as is)";
  out << "\n";
  auto print_coeffs = [&](const char* label, const ordered_json& arr) {
    out << label << ":";
    for (const auto& v : arr) out << ' ' << format_real(v.get<double>());
    out << "\n";
  };
  print_coeffs("numerator", j["numerator"]);
  print_coeffs("denominator", j["denominator"]);
  if (!show) return;
  out << "denominator roots:";
  if (j["denominator_roots"].empty()) out << " none";
  out << "\n";
  for (const auto& r : j["denominator_roots"])
    out << "  " << format_real(r["re"].get<double>()) << " " << format_real(r["im"].get<double>()) << "i\n";
  out << "inverse-coupling antiderivative, u = Y + sum w ln(Y + a) + sum d / Y^j:\n";
  for (const auto& t : j["inverse_coupling_form"]["log_terms"]) {
    out << "  a = " << format_real(t["offset"]["re"].get<double>()) << " " << format_real(t["offset"]["im"].get<double>())
        << "i, w = " << format_real(t["weight"]["re"].get<double>()) << " "
        << format_real(t["weight"]["im"].get<double>()) << "i\n";
  }
  for (const auto& t : j["inverse_coupling_form"]["pole_terms"])
    out << "  j = " << t["order"].get<int>() << ", d = " << format_real(t["coeff"].get<double>()) << "\n";
  out << "physical branch: Y > " << format_real(j["physical_branch_y_min"].get<double>()) << "\n";
}

}  // namespace rgflow

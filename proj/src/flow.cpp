#include "rgflow/flow.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "rgflow/pade.hpp"

namespace rgflow {

namespace {

using cd = std::complex<double>;

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

double relative_residual(double f_value, double u) { return std::abs(f_value - u) / std::max(1.0, std::abs(u)); }

// Accept a series or closed-form Y only when it solves F(Y) = u on the physical branch.
bool verified(const InverseFlow& inv, double y, double u, std::string* why) {
  if (!std::isfinite(y)) {
    *why = "non-finite result";
    return false;
  }
  if (y <= inv.y_low) {
    *why = "result Y = " + format_double(y) + " lies below the physical branch (Y > " + format_double(inv.y_low) + ")";
    return false;
  }
  const double r = relative_residual(inv(y), u);
  if (r > 1e-10 * std::max(1.0, std::abs(y) / std::max(1.0, std::abs(u)))) {
    *why = "flow-equation residual " + format_double(r) + " too large";
    return false;
  }
  return true;
}

void check_reachable(const InverseFlow& inv, double u) {
  if (u <= inv.f_low) {
    if (inv.landau)
      fail(ErrorKind::LandauPole, "u = " + format_double(u) + " is at or below the Landau pole (u_min = " +
                                      format_double(inv.f_low) + ")");
    fail(ErrorKind::NoSolution, "u = " + format_double(u) + " is not reached on the physical branch");
  }
}

// Solves Y + w ln(Y + r) = u through W(sgn(w) e^L), L = (u + r)/w - ln|w|.
double lambert_form(double u, double w, double r, Branch branch, double* log_omega) {
  const double l = (u + r) / w - std::log(std::abs(w));
  if (log_omega) *log_omega = l;
  const double big_w = lambert_w_log(l, w > 0.0 ? 1 : -1, branch);
  return -r + w * big_w;
}

Solution lambert_solution(const FlowModel& model, double u, double w, double r, std::optional<Branch> branch) {
  const InverseFlow inv = inverse_flow(model);
  check_reachable(inv, u);
  Solution s;
  const Branch b = branch ? *branch : select_lambert_branch(w, r);
  const double y = lambert_form(u, w, r, b, &s.diagnostics.log_omega);
  if (!(y > inv.y_low))
    fail(ErrorKind::LandauPole, "closed form leaves the physical branch at u = " + format_double(u));
  s.x = 1.0 / y;
  s.diagnostics.branch = to_string(b);
  s.diagnostics.residual = relative_residual(y + w * std::log(y + r), u);
  return s;
}

Solution fallback_to_root(const FlowModel& model, double u, std::vector<std::string> warnings) {
  Solution s = solve_root_oracle(model, u);
  warnings.push_back("fell back to rootOracle");
  warnings.insert(warnings.end(), s.diagnostics.warnings.begin(), s.diagnostics.warnings.end());
  s.diagnostics.warnings = std::move(warnings);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Methods

Method Method::parse(std::string_view name) {
  if (name == "oneLoop") return {MethodKind::OneLoop, 0};
  if (name == "twoLoopW") return {MethodKind::TwoLoopW, 0};
  if (name == "threeLoopW") return {MethodKind::ThreeLoopW, 0};
  if (name == "fourLoopSeries") return {MethodKind::FourLoopSeries, 0};
  if (name == "genericSeries") return {MethodKind::GenericSeries, 0};
  if (name == "odeOracle") return {MethodKind::OdeOracle, 0};
  if (name == "rootOracle") return {MethodKind::RootOracle, 0};
  constexpr std::string_view prefix = "iterative(";
  if (name.starts_with(prefix) && name.ends_with(")")) {
    const std::string_view digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    int order = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && order >= 1 && order <= 4)
      return {MethodKind::Iterative, order};
  }
  fail(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string Method::name() const {
  switch (kind) {
    case MethodKind::OneLoop: return "oneLoop";
    case MethodKind::TwoLoopW: return "twoLoopW";
    case MethodKind::ThreeLoopW: return "threeLoopW";
    case MethodKind::FourLoopSeries: return "fourLoopSeries";
    case MethodKind::GenericSeries: return "genericSeries";
    case MethodKind::Iterative: return "iterative(" + std::to_string(order) + ")";
    case MethodKind::OdeOracle: return "odeOracle";
    case MethodKind::RootOracle: return "rootOracle";
  }
  return "unknown";
}

int Method::required_loops() const {
  switch (kind) {
    case MethodKind::OneLoop: return 1;
    case MethodKind::TwoLoopW: return 2;
    case MethodKind::ThreeLoopW: return 3;
    case MethodKind::FourLoopSeries: return 4;
    case MethodKind::GenericSeries: return 5;
    case MethodKind::Iterative: return order;
    case MethodKind::OdeOracle:
    case MethodKind::RootOracle: return 1;
  }
  return 1;
}

std::vector<Method> closed_form_methods(const BetaFunction& beta) {
  std::vector<Method> out;
  for (MethodKind k : {MethodKind::OneLoop, MethodKind::TwoLoopW, MethodKind::ThreeLoopW, MethodKind::FourLoopSeries,
                       MethodKind::GenericSeries}) {
    const Method m{k, 0};
    if (m.required_loops() <= beta.loops()) out.push_back(m);
  }
  return out;
}

std::vector<Method> available_methods(const BetaFunction& beta) {
  std::vector<Method> out = closed_form_methods(beta);
  for (int n = 2; n <= std::min(4, beta.loops()); ++n) out.push_back({MethodKind::Iterative, n});
  out.push_back({MethodKind::OdeOracle, 0});
  out.push_back({MethodKind::RootOracle, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Flow models and their inverse-coupling antiderivatives

FlowModel model_flow(Method method, const BetaFunction& beta) {
  if (method.required_loops() > beta.loops())
    fail(ErrorKind::InvalidArgument, method.name() + " needs " + std::to_string(method.required_loops()) +
                                         " beta coefficients, config has " + std::to_string(beta.loops()));
  switch (method.kind) {
    case MethodKind::OneLoop: return FlowModel{beta.beta0, Polynomial{1.0}, Polynomial{1.0}};
    case MethodKind::TwoLoopW: return FlowModel{beta.beta0, Polynomial{1.0, beta.coeff(1)}, Polynomial{1.0}};
    case MethodKind::ThreeLoopW: return pade_model(beta.beta0, pade(beta.c, 1, 1));
    case MethodKind::FourLoopSeries: return pade_model(beta.beta0, pade(beta.c, 1, 2));
    case MethodKind::GenericSeries: return pade_model(beta.beta0, pade_for_loop_order(beta));
    case MethodKind::Iterative: return FlowModel::from_beta(beta.truncated(method.order));
    case MethodKind::OdeOracle:
    case MethodKind::RootOracle: return FlowModel::from_beta(beta);
  }
  return FlowModel::from_beta(beta);
}

InverseFlow inverse_flow(const FlowModel& model) {
  const RationalFunction integrand = model.inverse_integrand();
  InverseFlow inv;
  inv.form = antiderivative_logform(integrand, model.zero_pole_order());

  // Lower end: the largest of 0, the real zeros of the integrand (where the
  // coupling's flow has a pole) and its real singularities (fixed points).
  double y_low = 0.0;
  bool at_singularity = false;
  double singular_weight = 0.0;
  if (integrand.num.degree() >= 1) {
    const RootSet zeros = poly_roots(integrand.num);
    for (int i = 0; i < zeros.count(); ++i) {
      const cd z = zeros.roots(i);
      const bool cancelled = std::any_of(inv.form.cancelled_roots.begin(), inv.form.cancelled_roots.end(),
                                         [&](cd c) { return std::abs(c - z) <= 1e-8 * std::max(1.0, std::abs(z)); });
      if (z.imag() == 0.0 && !cancelled && z.real() > y_low) y_low = z.real();
    }
  }
  for (const LogTerm& t : inv.form.log_terms) {
    if (t.offset.imag() != 0.0) continue;
    const double s = -t.offset.real();
    if (s > y_low || (s == y_low && !at_singularity)) {
      y_low = s;
      at_singularity = true;
      singular_weight = t.weight.real();
    }
  }
  inv.y_low = y_low;
  // Inverse powers of Y dominate at 0 and drive F to -inf there whenever the
  // integrand is positive above 0.
  const bool pole_at_low = y_low == 0.0 && !inv.form.pole_terms.empty();
  if (pole_at_low || (at_singularity && singular_weight > 0.0)) {
    inv.f_low = -INFINITY;
    inv.landau = false;
  } else {
    inv.f_low = inv(y_low);
    inv.landau = true;
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Closed forms

Branch select_lambert_branch(double weight, double offset) {
  if (weight > 0.0) return Branch::principal;
  constexpr double u_probe = 1e6;
  for (Branch b : {Branch::minus_one, Branch::principal}) {
    try {
      const double y = lambert_form(u_probe, weight, offset, b, nullptr);
      const double x = 1.0 / y;
      if (x > 0.0 && std::abs(x * u_probe - 1.0) < 0.01) return b;
    } catch (const Error&) {
    }
  }
  fail(ErrorKind::NoSolution, "no Lambert W branch approaches 1/u at large u");
}

Solution solve_one_loop(const BetaFunction&, double u) {
  if (!(u > 0.0)) fail(ErrorKind::LandauPole, "one-loop coupling requires u > 0, got u = " + format_double(u));
  Solution s;
  s.x = 1.0 / u;
  return s;
}

Solution solve_two_loop(const BetaFunction& beta, double u, std::optional<Branch> branch) {
  const double c1 = beta.coeff(1);
  if (c1 == 0.0) {
    Solution s = solve_one_loop(beta, u);
    s.diagnostics.warnings.push_back("c1 = 0: two-loop flow reduces to one loop");
    return s;
  }
  return lambert_solution(model_flow({MethodKind::TwoLoopW, 0}, beta), u, -c1, c1, branch);
}

Solution solve_three_loop(const BetaFunction& beta, double u, std::optional<Branch> branch) {
  const PadeApproximant p = pade(beta.c, 1, 1);
  const double a1 = p.num_coeffs(1);
  const double a2 = p.den_coeffs(1);
  if (a1 == a2) {
    Solution s = solve_one_loop(beta, u);
    s.diagnostics.warnings.push_back("[1/1] numerator and denominator coincide: flow reduces to one loop");
    return s;
  }
  return lambert_solution(pade_model(beta.beta0, p), u, a2 - a1, a1, branch);
}

Solution solve_four_loop(const BetaFunction& beta, double u, const SolverOptions& options) {
  const PadeApproximant p = pade(beta.c, 1, 2);
  const FlowModel model = pade_model(beta.beta0, p);
  const double a1 = p.num_coeffs(1);
  const double a2 = p.den_coeffs(1);
  const double a3 = p.den_coeffs(2);
  std::vector<std::string> warnings;

  const InverseFlow inv = inverse_flow(model);
  check_reachable(inv, u);

  if (a1 != 0.0) {
    const double big_a = a2 - a1 - a3 / a1;
    if (big_a != 0.0) {
      const double big_b = a3 / (big_a * a1);
      const double big_c = a1 / big_a;
      const double log_omega = u / big_a - (1.0 + big_b) * std::log(std::abs(big_a));
      if (big_a > 0.0 && big_c < 0.0) {
        try {
          const SeriesSolution z = four_loop_series(big_b, big_c, log_omega, options.series);
          const double y = big_a * z.value().real();
          std::string why;
          if (verified(inv, y, u, &why)) {
            Solution s;
            s.x = 1.0 / y;
            s.diagnostics.k_max = z.k_max;
            s.diagnostics.residual = z.residual / std::max(1.0, std::abs(z.value()));
            s.diagnostics.branch = "base=-C";
            s.diagnostics.log_omega = log_omega;
            return s;
          }
          warnings.push_back("four-loop series rejected: " + why);
        } catch (const Error& e) {
          warnings.push_back(std::string("four-loop series: ") + e.what());
        }
      } else {
        warnings.push_back("preferred representation needs A > 0 and C < 0 (A = " + format_double(big_a) +
                           ", C = " + format_double(big_c) + ")");
      }
    } else {
      warnings.push_back("A = 0: no four-loop representation");
    }
  } else {
    warnings.push_back("a1 = 0: [1/2] numerator is trivial");
  }

  try {
    Solution s = solve_series_model(model, u, options);
    warnings.push_back("used alternate expansion point " + s.diagnostics.branch);
    warnings.insert(warnings.end(), s.diagnostics.warnings.begin(), s.diagnostics.warnings.end());
    s.diagnostics.warnings = std::move(warnings);
    return s;
  } catch (const Error& e) {
    warnings.push_back(e.what());
  }
  return fallback_to_root(model, u, std::move(warnings));
}

Solution solve_series_model(const FlowModel& model, double u, const SolverOptions& options) {
  const InverseFlow inv = inverse_flow(model);
  check_reachable(inv, u);
  const PartialFractionForm& form = inv.form;
  if (!form.pole_terms.empty())
    fail(ErrorKind::InvalidArgument, "series solver: antiderivative has 1/Y^j terms");
  if (form.poly_part.degree() != 1 || form.poly_part[1] != 1.0 || form.poly_part[0] != 0.0)
    fail(ErrorKind::InvalidArgument, "series solver: antiderivative must grow like Y");

  Solution s;
  if (form.log_terms.empty()) {
    s.x = 1.0 / u;
    return s;
  }

  struct Candidate {
    std::size_t index;
    double spread;
  };
  const std::size_t n = form.log_terms.size();
  std::vector<Candidate> candidates;
  for (std::size_t m = 0; m < n; ++m) {
    const LogTerm& base = form.log_terms[m];
    if (base.offset.imag() != 0.0 || base.weight.real() == 0.0) continue;
    const double wm = base.weight.real();
    const double a = -base.offset.real() / wm;
    double spread = INFINITY;
    for (std::size_t l = 0; l < n; ++l)
      if (l != m) spread = std::min(spread, std::abs(cd(a) + form.log_terms[l].offset / wm));
    candidates.push_back({m, spread});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& p, const Candidate& q) { return p.spread > q.spread; });

  const double total_weight = form.total_log_weight();
  std::vector<std::string> notes;
  for (const Candidate& cand : candidates) {
    const LogTerm& base = form.log_terms[cand.index];
    const double wm = base.weight.real();
    const double rm = base.offset.real();
    GeneralizedLambertEquation eq;
    eq.a = -rm / wm;
    bool all_real = true;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == cand.index) continue;
      eq.roots.push_back(form.log_terms[l].offset / wm);
      eq.exponents.push_back(form.log_terms[l].weight / wm);
      all_real = all_real && form.log_terms[l].offset.imag() == 0.0;
    }
    const double log_abs_c = u / wm - (total_weight / wm) * std::log(std::abs(wm));
    const std::string label = "base=" + format_double(-rm);
    if (log_abs_c > 700.0) {
      notes.push_back(label + ": forcing e^" + format_double(log_abs_c) + " outside the series region");
      continue;
    }

    for (bool complex_mode : {false, true}) {
      if (!complex_mode && !all_real) continue;
      SolverOptions opts = options;
      opts.series.complex_mode = complex_mode;
      if (!complex_mode) {
        eq.c = (wm > 0.0 ? 1.0 : -1.0) * std::exp(log_abs_c);
      } else {
        eq.c = std::exp(cd(u / wm) - (total_weight / wm) * std::log(cd(wm)));
      }
      try {
        const SeriesSolution sol = generic_series(eq, opts.series);
        const double y = wm * sol.value().real();
        std::string why;
        if (verified(inv, y, u, &why)) {
          s.x = 1.0 / y;
          s.diagnostics.k_max = sol.k_max;
          s.diagnostics.residual = sol.residual / std::max(1.0, std::abs(sol.value()));
          s.diagnostics.branch = label + (complex_mode ? " (complex mode)" : "");
          s.diagnostics.log_omega = log_abs_c;
          s.diagnostics.warnings = notes;
          if (complex_mode) s.diagnostics.warnings.push_back("series evaluated in complex mode");
          return s;
        }
        notes.push_back(label + (complex_mode ? " complex" : "") + ": " + why);
      } catch (const Error& e) {
        notes.push_back(label + (complex_mode ? " complex" : "") + ": " + e.what());
      }
    }
  }
  std::string all = "series solver: no expansion point verified";
  for (const std::string& note : notes) all += "; " + note;
  fail(ErrorKind::NoConvergence, all);
}

Solution solve_generic(const BetaFunction& beta, double u, const SolverOptions& options) {
  const FlowModel model = pade_model(beta.beta0, pade_for_loop_order(beta));
  try {
    return solve_series_model(model, u, options);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LandauPole || e.kind() == ErrorKind::NoSolution ||
        e.kind() == ErrorKind::RepeatedRoots)
      throw;
    return fallback_to_root(model, u, {e.what()});
  }
}

Solution solve_root_oracle(const FlowModel& model, double u) {
  const InverseFlow inv = inverse_flow(model);
  check_reachable(inv, u);
  const double lo = std::isinf(inv.f_low) ? inv.y_low + 1e-12 * std::max(1.0, std::abs(inv.y_low)) : inv.y_low;
  double span = std::max(1.0, std::abs(u));
  while (inv(inv.y_low + span) <= u) {
    span *= 2.0;
    if (!std::isfinite(span)) fail(ErrorKind::NoBracket, "root oracle: F(Y) never exceeds u");
  }
  const RootSolveResult r = root_solve(inv.form, u, {lo, inv.y_low + span});
  Solution s;
  s.x = 1.0 / r.y;
  s.diagnostics.residual = relative_residual(inv(r.y), u);
  s.diagnostics.branch = "physical";
  s.diagnostics.warnings = r.warnings;
  return s;
}

// ---------------------------------------------------------------------------
// Iterative solutions

double iterative_solution(const BetaFunction& beta, double u, int order) {
  if (order < 1 || order > 4) fail(ErrorKind::InvalidArgument, "iterative order must be 1..4");
  if (order > beta.loops())
    fail(ErrorKind::InvalidArgument, "iterative(" + std::to_string(order) + ") needs more beta coefficients");
  if (!(u > 1.0)) fail(ErrorKind::DomainError, "iterative solutions need u > 1");
  if (order == 1) return 1.0 / u;

  const double c1 = beta.coeff(1);
  const double y2 = u + c1 * std::log(u);
  if (!(y2 > 0.0)) fail(ErrorKind::DomainError, "iterative(2): u + c1 ln u <= 0");
  const double x2 = 1.0 / y2;
  if (order == 2) return x2;

  const double c2 = beta.coeff(2);
  const double y3 = u - c1 * std::log(x2) + (c1 * c1 - c2) * x2;
  if (!(y3 > 0.0)) fail(ErrorKind::DomainError, "iterative(3): inverse coupling <= 0");
  const double x3 = 1.0 / y3;
  if (order == 3) return x3;

  const double c3 = beta.coeff(3);
  const double y4 = u - c1 * std::log(x3) + (c1 * c1 - c2) * x3 - 0.5 * (c3 - 2.0 * c1 * c2 + c1 * c1 * c1) * x3 * x3;
  if (!(y4 > 0.0)) fail(ErrorKind::DomainError, "iterative(4): inverse coupling <= 0");
  return 1.0 / y4;
}

// ---------------------------------------------------------------------------
// Dispatch and Lambda fits

Solution solve(Method method, const BetaFunction& beta, double u, const SolverOptions& options) {
  if (method.required_loops() > beta.loops())
    fail(ErrorKind::InvalidArgument, method.name() + " needs more beta coefficients than configured");
  switch (method.kind) {
    case MethodKind::OneLoop: return solve_one_loop(beta, u);
    case MethodKind::TwoLoopW: return solve_two_loop(beta, u);
    case MethodKind::ThreeLoopW: return solve_three_loop(beta, u);
    case MethodKind::FourLoopSeries: return solve_four_loop(beta, u, options);
    case MethodKind::GenericSeries: return solve_generic(beta, u, options);
    case MethodKind::Iterative: return {iterative_solution(beta, u, method.order), {}};
    case MethodKind::RootOracle: return solve_root_oracle(FlowModel::from_beta(beta), u);
    case MethodKind::OdeOracle: break;
  }
  fail(ErrorKind::InvalidArgument, "odeOracle needs a reference point; use ode_run");
}

double lambda_from_reference(Method method, const BetaFunction& beta, double mu0_sq, double x0,
                             const SolverOptions&) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) fail(ErrorKind::InvalidArgument, "lambda_from_reference: x0 must be positive");
  if (!(mu0_sq > 0.0) || !std::isfinite(mu0_sq))
    fail(ErrorKind::InvalidArgument, "lambda_from_reference: mu0_sq must be positive");
  const double y0 = 1.0 / x0;
  double u0 = 0.0;

  if (method.kind == MethodKind::Iterative) {
    auto g = [&](double u) { return 1.0 / iterative_solution(beta, u, method.order) - y0; };
    auto no_derivative = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
    auto defined = [&](double u, double* value) {
      try {
        *value = g(u);
        return std::isfinite(*value);
      } catch (const Error&) {
        return false;
      }
    };
    double hi = std::max(10.0, 2.0 * y0 + 10.0);
    double ghi = 0.0;
    int expansions = 0;
    while ((!defined(hi, &ghi) || ghi <= 0.0) && ++expansions < 60) hi *= 2.0;
    if (!(ghi > 0.0)) fail(ErrorKind::NoSolution, method.name() + " does not reach x0 = " + format_double(x0));
    // Walk down towards u = 1 until the iterate drops below 1/x0.
    double lo = hi;
    bool bracketed = false;
    for (double u = hi; u - 1.0 > 1e-12;) {
      const double next = 1.0 + 0.97 * (u - 1.0);
      double value = 0.0;
      if (defined(next, &value)) {
        if (value <= 0.0) {
          lo = next;
          bracketed = true;
          break;
        }
        hi = next;
      }
      u = next;
    }
    if (!bracketed) fail(ErrorKind::NoSolution, method.name() + " does not reach x0 = " + format_double(x0));
    u0 = safeguarded_newton(g, no_derivative, lo, hi, 1e-14 * std::max(1.0, y0));
  } else {
    const InverseFlow inv = inverse_flow(model_flow(method, beta));
    if (!(y0 > inv.y_low))
      fail(ErrorKind::NoSolution, "x0 = " + format_double(x0) + " lies beyond the physical branch of " + method.name());
    u0 = inv(y0);
  }
  return std::exp(std::log(mu0_sq) - u0 / beta.beta0);
}

}  // namespace rgflow

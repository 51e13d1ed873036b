// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance <path-to-rgflow-cli> <configs-dir>
//
// Exit status is nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "rgflow/config.hpp"
#include "rgflow/flow.hpp"
#include "rgflow/inversion.hpp"
#include "rgflow/lambert_w.hpp"
#include "rgflow/oracle.hpp"
#include "rgflow/pade.hpp"
#include "rgflow/partial_fractions.hpp"
#include "rgflow/report.hpp"

using namespace rgflow;
using testing_support::Rng;
using cd = std::complex<double>;

namespace {

// Collects the worst observed error and any violated bound for one criterion.
class Check {
 public:
  void bound(const std::string& what, double value, double limit) {
    worst_[what] = std::max(worst_[what], value);
    if (!(value <= limit) && failures_.size() < 5) {
      std::ostringstream m;
      m << what << " = " << value << " > " << limit;
      failures_.push_back(m.str());
    }
    if (!(value <= limit)) ++failed_;
  }
  void require(const std::string& what, bool ok) {
    if (ok) {
      ++passed_requirements_;
    } else {
      ++failed_;
      if (failures_.size() < 5) failures_.push_back(what);
    }
  }
  void note(const std::string& what, const std::vector<double>& values) {
    std::ostringstream s;
    s << what << ":";
    for (double v : values) s << " " << v;
    notes_.push_back(s.str());
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    if (!ok()) {
      s << failed_ << " violation(s): ";
      for (std::size_t i = 0; i < failures_.size(); ++i) s << (i ? "; " : "") << failures_[i];
    } else {
      const char* sep = "";
      for (const auto& [name, v] : worst_) {
        s << sep << "max " << name << " " << v;
        sep = ", ";
      }
      if (passed_requirements_ > 0) s << sep << passed_requirements_ << " exact checks held";
    }
    for (const std::string& n : notes_) s << " [" << n << "]";
    return s.str();
  }

 private:
  std::map<std::string, double> worst_;
  std::vector<std::string> notes_;
  long passed_requirements_ = 0;
  std::vector<std::string> failures_;
  long failed_ = 0;
};

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

// Couplings of a flow model at the given u values (Lambda^2 = 1).
std::vector<double> ode_in_u(const FlowModel& model, double u_seed, double x_seed, const std::vector<double>& us) {
  std::vector<double> mus;
  for (double u : us) mus.push_back(std::exp(u / model.beta0));
  OdeSettings tight;
  tight.rel_tol = 1e-12;
  tight.abs_tol = 1e-16;
  return ode_run(model, std::exp(u_seed / model.beta0), x_seed, mus, tight);
}

const BetaFunction kQcd(23.0 / 3.0, {1.0, 5.043478260869565, 23.596618357487937, 629.4986515814211, 2017.9059453974362});

// ---------------------------------------------------------------------------

void pade_reconstruction(Check& check) {
  Rng rng(0xacc00001);
  int accepted = 0;
  while (accepted < 200) {
    const int n = rng.integer(0, 8);
    const int m = rng.integer(0, 8 - n);
    std::vector<double> series = rng.reals(n + m + 1, -5.0, 5.0);
    series[0] = 1.0;
    PadeApproximant p;
    try {
      p = pade(series, n, m);
    } catch (const Error& e) {
      check.require("only SingularPade may reject a series", e.kind() == ErrorKind::SingularPade);
      continue;
    }
    ++accepted;
    const Eigen::VectorXd e = p.expansion(n + m);
    for (int k = 0; k <= n + m; ++k)
      check.bound("re-expansion error", std::abs(e(k) - series[static_cast<std::size_t>(k)]), 1e-10);
  }

  auto coeff_gap = [](const PadeApproximant& a, const PadeApproximant& b) {
    const double scale = std::max({1.0, a.num_coeffs.cwiseAbs().maxCoeff(), a.den_coeffs.cwiseAbs().maxCoeff()});
    return std::max((a.num_coeffs - b.num_coeffs).cwiseAbs().maxCoeff(),
                    (a.den_coeffs - b.den_coeffs).cwiseAbs().maxCoeff()) /
           scale;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const double c1 = rng.signed_magnitude(0.2, 5.0);
    const double c2 = rng.uniform(-5.0, 5.0);
    const double c3 = rng.uniform(-5.0, 5.0);
    check.bound("[1/1] closed form vs solve", coeff_gap(pade_1_1(c1, c2), pade({1.0, c1, c2}, 1, 1)), 1e-12);
    if (std::abs(c2 - c1 * c1) < 0.1) continue;
    check.bound("[1/2] closed form vs solve", coeff_gap(pade_1_2(c1, c2, c3), pade({1.0, c1, c2, c3}, 1, 2)), 1e-12);
  }
}

void lambert_w_checks(Check& check) {
  constexpr double inv_e = 0.36787944117144233;
  auto defect = [](double z, Branch b) {
    const double w = lambert_w(z, b);
    return std::abs(w * std::exp(w) - z) / std::max(std::abs(z), 1.0);
  };
  // Principal branch: offsets from -1/e, then log-spaced positive arguments.
  for (int i = 0; i < 500; ++i) {
    const double z = -inv_e + std::pow(10.0, -9.0 + 9.0 * i / 499.0) * (inv_e - 1e-12);
    check.bound("identity defect W0", defect(z, Branch::principal), 1e-13);
  }
  for (int i = 0; i < 500; ++i) {
    const double z = std::pow(10.0, -12.0 + 18.0 * i / 499.0);
    check.bound("identity defect W0", defect(z, Branch::principal), 1e-13);
  }
  for (int i = 0; i < 1000; ++i) {
    const double z = i < 500 ? -inv_e + std::pow(10.0, -9.0 + 8.0 * i / 499.0) * inv_e
                             : -std::pow(10.0, -9.0 + 8.5 * (i - 500) / 499.0);
    check.bound("identity defect W-1", defect(z, Branch::minus_one), 1e-13);
  }

  for (int i = 0; i <= 200; ++i) {
    const double z = -0.2 + 0.4 * i / 200.0;
    double sum = 0.0;
    for (int n = 30; n >= 1; --n) sum = (sum + w_series_coefficient(n)) * z;
    check.bound("30-term series vs iteration", std::abs(sum - lambert_w(z, Branch::principal)), 1e-10);
  }

  for (int n = 1; n <= 12; ++n) {
    const long long factorial = testing_support::factorial(n);
    const long long expected = (n % 2 == 1 ? 1 : -1) * testing_support::ipow(n, n - 1);  // -(-n)^n / n
    const long double r = lagrange_invert<long double>([](const auto& w) { return w * exp(w); }, 0.0L, n);
    check.require("lagrange_invert integer at n = " + std::to_string(n), std::llround(r) == expected);
    check.require("w_n n! integer at n = " + std::to_string(n),
                  std::llround(w_series_coefficient(n) * static_cast<double>(factorial)) == expected);
  }
}

void two_loop_exactness(Check& check) {
  for (double c1 : {-1.0, 0.5, 2.0})
    for (double beta0 : {0.5, 1.0}) {
      const BetaFunction beta(beta0, {1.0, c1});
      const std::vector<double> us = linspace(5.0, 100.0, 20);
      // Lambda is fixed by an arbitrary reference point; the ODE starts there.
      const double mu0_sq = 91.0, x0 = 0.1 / beta0;
      const double lambda_sq = lambda_from_reference(Method::parse("twoLoopW"), beta, mu0_sq, x0);
      std::vector<double> mus;
      for (double u : us) mus.push_back(lambda_sq * std::exp(u / beta0));
      OdeSettings tight;
      tight.rel_tol = 1e-12;
      tight.abs_tol = 1e-16;
      const std::vector<double> ode = ode_run(beta, mu0_sq, x0, mus, tight);
      for (std::size_t i = 0; i < us.size(); ++i)
        check.bound("relative deviation", rel(solve_two_loop(beta, us[i]).x, ode[i]), 1e-8);
    }
}

void three_loop_exactness(Check& check) {
  for (const BetaFunction& beta : {BetaFunction(1.0, {1.0, 2.0, 3.0}), BetaFunction(0.5, {1.0, -1.0, 0.7}),
                                   BetaFunction(23.0 / 3.0, {1.0, 5.043478260869565, 23.596618357487937})}) {
    const FlowModel model = model_flow(Method::parse("threeLoopW"), beta);
    const InverseFlow inverse = inverse_flow(model);
    const std::vector<double> us = linspace(5.0, 100.0, 20);
    const double seed = solve_three_loop(beta, 100.0).x;
    const std::vector<double> ode = ode_in_u(model, 100.0, seed, us);
    for (std::size_t i = 0; i < us.size(); ++i) {
      const double x = solve_three_loop(beta, us[i]).x;
      check.bound("vs ODE on the [1/1] flow", rel(x, ode[i]), 1e-8);
      const double y0 = 1.0 / x;
      const RootSolveResult r = root_solve(inverse.form, us[i], {std::max(inverse.y_low, 0.5 * y0), 2.0 * y0});
      check.bound("vs root_solve", rel(x, 1.0 / r.y), 1e-10);
    }
  }
}

testing_support::Real newton_root(double a, double c, const std::vector<double>& roots, const std::vector<double>& exps) {
  using testing_support::Real;
  auto f = [&](Real v) {
    Real log_f = -v;
    for (std::size_t l = 0; l < roots.size(); ++l) log_f -= exps[l] * std::log(v + roots[l]);
    return a + c * std::exp(log_f) - v;
  };
  Real start = a;
  start += f(start);
  return testing_support::newton(f, start);
}

PartialFractionForm logform(Polynomial poly, std::vector<LogTerm> logs) {
  PartialFractionForm f;
  f.kind = FormKind::Antiderivative;
  f.poly_part = std::move(poly);
  f.log_terms = std::move(logs);
  return f;
}

void four_loop_series_checks(Check& check) {
  Rng rng(0xacc00005);
  for (int trial = 0; trial < 50; ++trial) {
    const double minus_c = rng.uniform(2.0, 20.0);
    const double b = rng.uniform(-1.0, 2.0);
    // First series term Omega e^{C} (-C)^{-B}, kept at most 0.1 in absolute size.
    const double first = rng.log_uniform(1e-3, 0.1);
    const double log_omega = std::log(first) + minus_c + b * std::log(minus_c);
    const SeriesSolution s = four_loop_series(b, -minus_c, log_omega);
    const double z = s.value().real();
    // (C + z) z^B = Omega e^{-z}, compared in logs.
    const double log_lhs = std::log(std::abs(z - minus_c)) + b * std::log(z);
    check.bound("residual", std::abs(std::expm1(log_lhs - (log_omega - z))), 1e-10);
    // z + ln(z + C) + B ln z = ln Omega
    const PartialFractionForm f = logform(Polynomial{0.0, 1.0}, {{-minus_c, 1.0}, {0.0, b}});
    const RootSolveResult r = root_solve(f, log_omega, {minus_c + 0.1 * first, minus_c + 10.0 * first});
    check.bound("vs root_solve", rel(z, r.y), 1e-9);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double minus_c = rng.uniform(2.0, 20.0);
    const double first = rng.log_uniform(1e-3, 0.1);
    const double log_omega = std::log(first) + minus_c;
    const double z = four_loop_series(0.0, -minus_c, log_omega).value().real();
    check.bound("B = 0 vs W", rel(z, minus_c + lambert_w(first, Branch::principal)), 1e-10);
  }
}

void generic_series_checks(Check& check) {
  Rng rng(0xacc00006);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(5.0, 20.0);
    const std::vector<double> roots = rng.reals(2, -2.0, 5.0), exps = rng.reals(2, -1.0, 1.0);
    double log_f = -a;
    for (int l = 0; l < 2; ++l) log_f -= exps[static_cast<std::size_t>(l)] * std::log(a + roots[static_cast<std::size_t>(l)]);
    const double first = rng.log_uniform(1e-4, 0.1);
    const double c = first / std::exp(log_f);
    const SeriesSolution s = generic_series({a, c, {roots[0], roots[1]}, {exps[0], exps[1]}});
    const double v = s.value().real();
    // v + ln(v - a) + sum e_l ln(v + r_l) = ln c
    const PartialFractionForm f =
        logform(Polynomial{0.0, 1.0}, {{-a, 1.0}, {roots[0], exps[0]}, {roots[1], exps[1]}});
    const RootSolveResult r = root_solve(f, std::log(c), {a + 0.1 * first, a + 10.0 * first});
    check.bound("n = 2 vs root_solve", rel(v, r.y), 1e-9);
    check.bound("n = 2 vs extended Newton", rel(v, static_cast<double>(newton_root(a, c, roots, exps))), 1e-9);
  }
  for (double b : {0.5, -0.8, 1.0, 2.3}) {
    const double a = 6.0;
    const GeneralizedLambertEquation eq{a, 0.05 * std::exp(a) * std::pow(a, b), {0.0}, {b}};
    const SeriesSolution g = generic_series(eq);
    const SeriesSolution o = solve_offset_lambert(eq);
    check.require("at least ten terms", g.terms.size() >= 10 && o.terms.size() >= 10);
    for (std::size_t k = 0; k < std::min({std::size_t{10}, g.terms.size(), o.terms.size()}); ++k)
      check.bound("single root term gap", std::abs(g.terms[k] - o.terms[k]) / std::abs(o.terms[k]), 1e-12);
  }
}

void iterative_ordering(Check& check) {
  const BetaFunction beta(1.0, {1.0, 2.0, 3.0});
  const FlowModel full = FlowModel::from_beta(beta);
  std::vector<double> scaled;
  for (double u : {10.0, 100.0, 1000.0}) {
    const double truth = solve_root_oracle(full, u).x;
    const double dev_iter = std::abs(iterative_solution(beta, u, 3) - truth);
    const double dev_exact = std::abs(solve_three_loop(beta, u).x - truth);
    check.require("iterative(3) further from the oracle than threeLoopW at u = " + std::to_string(u),
                  dev_iter > dev_exact);
    const double l = std::log(u);
    scaled.push_back((dev_iter / truth) / (l * l * l / (u * u * u)));
  }
  // Ratio test: each step in u changes the relative deviation by the predicted
  // ratio up to a factor 3 either way.
  for (std::size_t i = 1; i < scaled.size(); ++i) {
    const double r = scaled[i] / scaled[i - 1];
    check.bound("observed/predicted ratio mismatch", std::max(r, 1.0 / r), 3.0);
  }
  check.note("relative deviation / (ln^3 u / u^3) at u = 10, 100, 1000", scaled);
}

struct RandomRational {
  RationalFunction r;
  int pole_order;
  std::vector<double> singular_points;
};

RandomRational random_rational(Rng& rng, int max_degree) {
  const int p = rng.integer(0, 2);
  const int n_real = rng.integer(0, std::max(0, max_degree - p));
  const int n_pairs = rng.integer(0, std::max(0, (max_degree - p - n_real) / 2));
  std::vector<double> real_offsets = rng.separated(n_real, -4.0, 4.0, 0.4);
  for (double& a : real_offsets)
    if (std::abs(a) < 0.3) a += a < 0 ? -0.4 : 0.4;
  Polynomial den = Polynomial::monomial(p);
  std::vector<double> singular{0.0};
  for (double a : real_offsets) {
    den = den * Polynomial{a, 1.0};
    singular.push_back(-a);
  }
  for (int i = 0; i < n_pairs; ++i) {
    const double re = rng.uniform(-3.0, 3.0);
    const double im = rng.uniform(0.5, 2.5) + i;
    den = den * Polynomial{re * re + im * im, 2.0 * re, 1.0};
  }
  if (den.degree() == 0) den = Polynomial{1.0};
  const int num_degree = rng.integer(0, max_degree);
  Eigen::VectorXd nc = Eigen::VectorXd::NullaryExpr(num_degree + 1, [&] { return rng.uniform(-3.0, 3.0); });
  nc(num_degree) = rng.signed_magnitude(0.5, 3.0);
  return {RationalFunction(Polynomial(nc), den), p, singular};
}

void antiderivative_identities(Check& check) {
  Rng rng(0xacc00008);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomRational rr = random_rational(rng, 5);
    const PartialFractionForm f = antiderivative_logform(rr.r, rr.pole_order);
    int checked = 0;
    while (checked < 50) {
      const double y = rng.uniform(-6.0, 6.0);
      double gap = INFINITY;
      for (double s : rr.singular_points) gap = std::min(gap, std::abs(y - s));
      if (gap < 0.2) continue;
      ++checked;
      const double d =
          testing_support::derivative([&](double s) { return evaluate_antiderivative(f, s); }, y, 0.02 * gap);
      const double exact = rr.r(y);
      check.bound("derivative mismatch", std::abs(d - exact) / std::max(1.0, std::abs(exact)), 1e-8);
    }
  }
}

void lambda_round_trip(Check& check) {
  Rng rng(0xacc00009);
  const std::vector<Method> methods = available_methods(kQcd);
  for (int trial = 0; trial < 20; ++trial) {
    TheoryConfig cfg;
    cfg.name = "round trip";
    cfg.beta = kQcd;
    cfg.reference = ReferencePoint{rng.log_uniform(4.0, 1e6), rng.uniform(0.005, 0.05) / kQcd.beta0};
    const RunReport report = evaluate_run(cfg, methods, {cfg.reference->mu0_sq});
    for (const RunResult& row : report.rows)
      check.bound("x0 mismatch (" + row.method.name() + ")", rel(row.x, cfg.reference->x0), 1e-10);
  }
}

struct Outcome {
  int status = -1;
  std::string out;
};

Outcome shell(const std::string& cmd) {
  Outcome r;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

void cli_determinism(Check& check, const std::string& cli, const std::string& configs) {
  for (const char* name : {"two_loop_demo", "three_loop_demo", "four_loop_demo", "qcd_nf5"}) {
    const std::string path = "'" + configs + "/" + name + ".json'";
    for (const char* format : {"csv", "json"}) {
      const std::string cmd = "'" + cli + "' run " + path + " --reproducible --format " + format;
      const Outcome a = shell(cmd), b = shell(cmd);
      check.require(std::string(name) + " run exits 0", a.status == 0 && b.status == 0);
      check.require(std::string(name) + " " + format + " output is byte-identical", !a.out.empty() && a.out == b.out);
    }
  }
  for (const char* name : {"two_loop_demo", "three_loop_demo", "four_loop_demo"}) {
    const Outcome r = shell("'" + cli + "' compare '" + configs + "/" + name + ".json'");
    check.require(std::string(name) + " compare exits 0", r.status == 0);
    check.require(std::string(name) + " compare verdict PASS", r.out.find("\nverdict: PASS\n") != std::string::npos);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <rgflow-cli> <configs-dir>\n";
    return 2;
  }
  const std::string cli = argv[1], configs = argv[2];

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"Pade reconstruction", pade_reconstruction},
      {"Lambert W", lambert_w_checks},
      {"two-loop exactness", two_loop_exactness},
      {"three-loop exactness", three_loop_exactness},
      {"four-loop series", four_loop_series_checks},
      {"generic series", generic_series_checks},
      {"iterative vs exact ordering", iterative_ordering},
      {"antiderivative identities", antiderivative_identities},
      {"Lambda round trip", lambda_round_trip},
      {"CLI determinism", [&](Check& c) { cli_determinism(c, cli, configs); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check.require(std::string("exception: ") + e.what(), false);
    }
    std::cout << (check.ok() ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << check.summary() << std::endl;
    if (!check.ok()) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rgflow/beta_function.hpp"
#include "rgflow/partial_fractions.hpp"

namespace rgflow {

struct OdeSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  long max_steps = 1000000;
};

/// Integrates dx/dt = -beta0 x^2 num(x)/den(x) in t = ln mu^2 from (mu0_sq, x0)
/// to every target with a Dormand-Prince 5(4) pair. Results follow the input
/// order of the targets.
std::vector<double> ode_run(const FlowModel& model, double mu0_sq, double x0, const std::vector<double>& mu_sq_targets,
                            const OdeSettings& settings = {});

inline std::vector<double> ode_run(const BetaFunction& beta, double mu0_sq, double x0,
                                   const std::vector<double>& mu_sq_targets, const OdeSettings& settings = {}) {
  return ode_run(FlowModel::from_beta(beta), mu0_sq, x0, mu_sq_targets, settings);
}

struct Interval {
  double lo;
  double hi;
};

struct RootSolveResult {
  double y = 0.0;
  /// Every root found in the searched interval, ascending; more than one
  /// triggers a MultiRoot warning.
  std::vector<double> roots;
  std::vector<std::string> warnings;
};

/// Solves evaluate_antiderivative(logform, y) = target near the hint. The hint
/// is widened geometrically (up to 1e3 times) without crossing a real
/// singularity of the form.
RootSolveResult root_solve(const PartialFractionForm& logform, double target, Interval bracket_hint);

/// Newton steps kept inside a sign-changing bracket, with bisection whenever
/// a step leaves it or stalls. Stops once |f| <= ftol or the bracket has
/// collapsed to rounding level.
double safeguarded_newton(const std::function<double(double)>& f, const std::function<double(double)>& df, double lo,
                          double hi, double ftol);

}  // namespace rgflow

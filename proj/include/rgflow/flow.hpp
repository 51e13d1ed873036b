#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgflow/beta_function.hpp"
#include "rgflow/inversion.hpp"
#include "rgflow/lambert_w.hpp"
#include "rgflow/oracle.hpp"
#include "rgflow/partial_fractions.hpp"

namespace rgflow {

enum class MethodKind { OneLoop, TwoLoopW, ThreeLoopW, FourLoopSeries, GenericSeries, Iterative, OdeOracle, RootOracle };

struct Method {
  MethodKind kind = MethodKind::OneLoop;
  /// Order of the iterative solution; unused otherwise.
  int order = 0;

  /// Accepts oneLoop, twoLoopW, threeLoopW, fourLoopSeries, genericSeries,
  /// iterative(N) for N in 1..4, odeOracle, rootOracle.
  static Method parse(std::string_view name);
  std::string name() const;
  /// Loop count (number of c_k including c_0) the method needs.
  int required_loops() const;
  bool is_oracle() const { return kind == MethodKind::OdeOracle || kind == MethodKind::RootOracle; }

  bool operator==(const Method&) const = default;
};

/// Every method the beta function has coefficients for, in report order.
std::vector<Method> available_methods(const BetaFunction& beta);
/// The analytic solvers among them (no iterative, no oracles).
std::vector<Method> closed_form_methods(const BetaFunction& beta);

struct ScaleSpec {
  double lambda_sq = 1.0;
  double mu_sq = 1.0;
  double u = 0.0;

  static ScaleSpec at(double beta0, double lambda_sq, double mu_sq) {
    const double ratio = mu_sq / lambda_sq;
    const double log_ratio = std::isnormal(ratio) ? std::log(ratio) : std::log(mu_sq) - std::log(lambda_sq);
    return {lambda_sq, mu_sq, beta0 * log_ratio};
  }
};

struct Diagnostics {
  int k_max = 0;
  /// Relative residual of the transcendental equation actually solved.
  double residual = 0.0;
  std::string branch;
  /// ln Omega of the representation in use; NaN when there is none.
  double log_omega = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

struct Solution {
  double x = 0.0;
  Diagnostics diagnostics;
};

struct RunResult {
  double mu_sq = 0.0;
  Method method;
  double x = 0.0;
  Diagnostics diagnostics;
};

struct SolverOptions {
  SeriesOptions series;
  OdeSettings ode;
};

/// Antiderivative u = F(Y) of the inverse-coupling integrand of a flow, with
/// the physical branch (y_low, inf) on which F increases monotonically.
struct InverseFlow {
  PartialFractionForm form;
  double y_low = 0.0;
  /// lim F(Y) as Y -> y_low from above; -inf at an infrared fixed point.
  double f_low = 0.0;
  /// Whether the lower end is a pole of the coupling (Landau) or a fixed point.
  bool landau = true;

  double operator()(double y) const { return evaluate_antiderivative(form, y); }
};

InverseFlow inverse_flow(const FlowModel& model);

/// Flow whose exact solution the method represents.
FlowModel model_flow(Method method, const BetaFunction& beta);

Solution solve_one_loop(const BetaFunction& beta, double u);
Solution solve_two_loop(const BetaFunction& beta, double u, std::optional<Branch> branch = std::nullopt);
Solution solve_three_loop(const BetaFunction& beta, double u, std::optional<Branch> branch = std::nullopt);
Solution solve_four_loop(const BetaFunction& beta, double u, const SolverOptions& options = {});
Solution solve_generic(const BetaFunction& beta, double u, const SolverOptions& options = {});

/// Series solution of an arbitrary rational flow, trying each real
/// singularity as expansion point; throws NoConvergence when none verifies.
Solution solve_series_model(const FlowModel& model, double u, const SolverOptions& options = {});

/// Bracketed root of F(Y) = u on the physical branch.
Solution solve_root_oracle(const FlowModel& model, double u);

/// Iterates of increasing order obtained by substituting lower-order
/// solutions into the asymptotic form of the flow equation.
double iterative_solution(const BetaFunction& beta, double u, int order);

/// Dispatch for every method except odeOracle, which needs a reference point.
Solution solve(Method method, const BetaFunction& beta, double u, const SolverOptions& options = {});
inline Solution solve(Method method, const BetaFunction& beta, const ScaleSpec& scale, const SolverOptions& options = {}) {
  return solve(method, beta, scale.u, options);
}

/// Lambda^2 for which the method's solution passes through (mu0_sq, x0).
double lambda_from_reference(Method method, const BetaFunction& beta, double mu0_sq, double x0,
                             const SolverOptions& options = {});

/// Branch of the two- and three-loop closed forms that tends to 1/u as u grows.
Branch select_lambert_branch(double weight, double offset);

}  // namespace rgflow

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rgflow/beta_function.hpp"
#include "rgflow/polynomial.hpp"

namespace rgflow {

/// [N/M] rational approximant (1 + a_1 x + ... + a_N x^N) / (1 + b_1 x + ... + b_M x^M).
struct PadeApproximant {
  Eigen::VectorXd num_coeffs;
  Eigen::VectorXd den_coeffs;
  int order_n = 0;
  int order_m = 0;

  Polynomial numerator() const { return Polynomial(num_coeffs); }
  Polynomial denominator() const { return Polynomial(den_coeffs); }
  double operator()(double x) const { return numerator()(x) / denominator()(x); }

  /// Taylor coefficients of num/den through the given order.
  Eigen::VectorXd expansion(int order) const;
};

struct PadeOptions {
  /// Reciprocal condition bound for the denominator system.
  double max_condition = 1e12;
  /// Absolute bound on re-expansion residuals.
  double reexpansion_tol = 1e-10;
};

/// Approximant from series[0..N+M] with series[0] = 1, solved from the
/// denominator normal equations. An ill-conditioned system is accepted only
/// when its minimum-norm solution still reproduces the series.
PadeApproximant pade(const std::vector<double>& series, int n, int m, const PadeOptions& options = {});

/// Closed forms for the two smallest near-diagonal cases.
PadeApproximant pade_1_1(double c1, double c2);
PadeApproximant pade_1_2(double c1, double c2, double c3);

/// Reduction used by the solvers: N coefficients beyond c_0 give [n/n] for
/// N = 2n and [m/m+1] for N = 2m + 1 ([1/0], the polynomial itself, for N = 1).
PadeApproximant pade_for_loop_order(const BetaFunction& beta, const PadeOptions& options = {});

/// Flow whose loop factor is the approximant.
FlowModel pade_model(double beta0, const PadeApproximant& p);

}  // namespace rgflow

#pragma once

#include <cmath>
#include <vector>

#include "rgflow/error.hpp"
#include "rgflow/polynomial.hpp"

namespace rgflow {

/// dx/dt = -beta0 x^2 (c_0 + c_1 x + ... + c_N x^N), t = ln mu^2, c_0 = 1.
/// N + 1 is the loop order.
struct BetaFunction {
  double beta0 = 1.0;
  std::vector<double> c{1.0};

  BetaFunction() = default;
  BetaFunction(double b0, std::vector<double> coeffs) : beta0(b0), c(std::move(coeffs)) { validate(); }

  void validate() const {
    if (!(beta0 != 0.0) || !std::isfinite(beta0)) fail(ErrorKind::InvalidArgument, "beta0 must be finite and nonzero");
    if (c.empty() || c[0] != 1.0) fail(ErrorKind::InvalidArgument, "c[0] must equal 1");
    for (double v : c)
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "beta coefficients must be finite");
  }

  int loops() const { return static_cast<int>(c.size()); }
  /// c_k, or 0 beyond the stored order.
  double coeff(int k) const { return k < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(k)] : 0.0; }

  /// The same flow truncated to the given loop count.
  BetaFunction truncated(int loop_count) const {
    std::vector<double> out(c.begin(), c.begin() + std::min<std::ptrdiff_t>(loop_count, loops()));
    return BetaFunction(beta0, std::move(out));
  }

  Polynomial polynomial() const { return Polynomial(Eigen::Map<const Eigen::VectorXd>(c.data(), loops()).eval()); }
};

/// Flow with a rational loop factor: dx/dt = -beta0 x^2 num(x)/den(x).
/// num(0) = den(0) = 1. The plain beta polynomial is num = c, den = 1.
struct FlowModel {
  double beta0 = 1.0;
  Polynomial num{1.0};
  Polynomial den{1.0};

  static FlowModel from_beta(const BetaFunction& beta) { return {beta.beta0, beta.polynomial(), Polynomial{1.0}}; }

  double rhs(double x) const { return -beta0 * x * x * num(x) / den(x); }

  /// Degree used to clear 1/Y powers in the inverse-coupling integrand.
  int clearing_degree() const { return std::max(num.degree(), den.degree()); }

  /// du/dY = 1/P(1/Y) as a rational function of Y = 1/x, with u = beta0 t + const.
  RationalFunction inverse_integrand() const {
    const int k = clearing_degree();
    return RationalFunction(den.reversed(k), num.reversed(k));
  }

  /// Order of the zero root carried by the inverse-integrand denominator.
  int zero_pole_order() const { return clearing_degree() - num.degree(); }
};

}  // namespace rgflow

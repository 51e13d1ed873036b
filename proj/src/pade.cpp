#include "rgflow/pade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rgflow {

Eigen::VectorXd PadeApproximant::expansion(int order) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(order + 1);
  for (int k = 0; k <= order; ++k) {
    double acc = k <= order_n ? num_coeffs(k) : 0.0;
    for (int j = 1; j <= std::min(k, order_m); ++j) acc -= den_coeffs(j) * e(k - j);
    e(k) = acc;
  }
  return e;
}

namespace {

PadeApproximant assemble(const std::vector<double>& series, int n, int m, const Eigen::VectorXd& b) {
  PadeApproximant p;
  p.order_n = n;
  p.order_m = m;
  p.den_coeffs = Eigen::VectorXd::Zero(m + 1);
  p.den_coeffs(0) = 1.0;
  p.den_coeffs.tail(m) = b;
  p.num_coeffs = Eigen::VectorXd::Zero(n + 1);
  for (int k = 0; k <= n; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= std::min(k, m); ++j) acc += p.den_coeffs(j) * series[static_cast<std::size_t>(k - j)];
    p.num_coeffs(k) = acc;
  }
  return p;
}

double reexpansion_error(const PadeApproximant& p, const std::vector<double>& series) {
  const int order = p.order_n + p.order_m;
  const Eigen::VectorXd e = p.expansion(order);
  double worst = 0.0;
  for (int k = 0; k <= order; ++k) worst = std::max(worst, std::abs(e(k) - series[static_cast<std::size_t>(k)]));
  return worst;
}

}  // namespace

PadeApproximant pade(const std::vector<double>& series, int n, int m, const PadeOptions& options) {
  if (n < 0 || m < 0) fail(ErrorKind::InvalidArgument, "pade: negative order");
  if (static_cast<int>(series.size()) < n + m + 1) fail(ErrorKind::InvalidArgument, "pade: series too short for [N/M]");
  if (series[0] != 1.0) fail(ErrorKind::InvalidArgument, "pade: series[0] must be 1");

  if (m == 0) return assemble(series, n, 0, Eigen::VectorXd());

  auto c = [&](int k) { return k >= 0 ? series[static_cast<std::size_t>(k)] : 0.0; };
  Eigen::MatrixXd h(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 1; j <= m; ++j) h(i, j - 1) = c(n + 1 + i - j);
    rhs(i) = -c(n + 1 + i);
  }

  // Absolute for coefficients up to 10, relative beyond.
  double scale = 10.0;
  for (int k = 0; k <= n + m; ++k) scale = std::max(scale, std::abs(c(k)));
  const double tol = options.reexpansion_tol * scale / 10.0;

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
  if (lu.isInvertible() && lu.rcond() * options.max_condition >= 1.0) {
    Eigen::VectorXd b = lu.solve(rhs);
    b += lu.solve(rhs - h * b);
    PadeApproximant p = assemble(series, n, m, b);
    if (reexpansion_error(p, series) <= tol) return p;
  }

  // Degenerate table entry: the minimum-norm solution is kept only if it
  // still reproduces the series (e.g. a series that terminates early).
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(h);
  PadeApproximant p = assemble(series, n, m, cod.solve(rhs));
  if (p.den_coeffs.allFinite() && reexpansion_error(p, series) <= tol) return p;
  fail(ErrorKind::SingularPade, "pade: [" + std::to_string(n) + "/" + std::to_string(m) +
                                    "] system is singular (condition estimate " +
                                    std::to_string(lu.rcond() > 0.0 ? 1.0 / lu.rcond() : INFINITY) + ")");
}

PadeApproximant pade_1_1(double c1, double c2) {
  if (c1 == 0.0) fail(ErrorKind::SingularPade, "[1/1] requires c1 != 0");
  PadeApproximant p;
  p.order_n = 1;
  p.order_m = 1;
  p.num_coeffs = Eigen::Vector2d(1.0, c1 - c2 / c1);
  p.den_coeffs = Eigen::Vector2d(1.0, -c2 / c1);
  return p;
}

PadeApproximant pade_1_2(double c1, double c2, double c3) {
  // Matching x^2 and x^3 of (1 + c1 x + c2 x^2 + c3 x^3)(1 + b1 x + b2 x^2).
  const double det = c2 - c1 * c1;
  if (det == 0.0) fail(ErrorKind::SingularPade, "[1/2] requires c2 != c1^2");
  const double b1 = (c1 * c2 - c3) / det;
  const double b2 = -c2 - c1 * b1;
  PadeApproximant p;
  p.order_n = 1;
  p.order_m = 2;
  p.num_coeffs = Eigen::Vector2d(1.0, c1 + b1);
  p.den_coeffs = Eigen::Vector3d(1.0, b1, b2);
  return p;
}

PadeApproximant pade_for_loop_order(const BetaFunction& beta, const PadeOptions& options) {
  const int big_n = beta.loops() - 1;
  if (big_n == 0) return pade(beta.c, 0, 0, options);
  if (big_n == 1) return pade(beta.c, 1, 0, options);
  if (big_n % 2 == 0) return pade(beta.c, big_n / 2, big_n / 2, options);
  return pade(beta.c, big_n / 2, big_n / 2 + 1, options);
}

FlowModel pade_model(double beta0, const PadeApproximant& p) { return {beta0, p.numerator(), p.denominator()}; }

}  // namespace rgflow

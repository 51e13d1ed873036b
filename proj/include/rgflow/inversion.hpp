#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rgflow/error.hpp"
#include "rgflow/taylor_series.hpp"

namespace rgflow {

/// v = a + c e^{-v} / prod_l (v + roots_l)^{exponents_l}.
struct GeneralizedLambertEquation {
  std::complex<double> a;
  std::complex<double> c;
  std::vector<std::complex<double>> roots;
  std::vector<std::complex<double>> exponents;

  /// Right-hand side minus v at the given point (principal powers).
  std::complex<double> defect(std::complex<double> v) const;
};

struct SeriesSolution {
  std::complex<double> base;
  /// terms[k-1] is the full order-k increment.
  std::vector<std::complex<double>> terms;
  int k_max = 0;
  bool converged = false;
  /// |defect| of the defining equation at the summed value.
  double residual = 0.0;

  std::complex<double> value() const;
};

struct SeriesOptions {
  /// Stop once |term| <= tau |partial sum|.
  double tau = 1e-14;
  int k_max = 64;
  /// Evaluate powers of negative or complex bases on the principal branch
  /// instead of rejecting them; the result must come out real to 1e-10.
  bool complex_mode = false;
};

/// n-th coefficient of the inverse series r(z) = a + sum_n r_n (z - f(a))^n / n!
/// of z = f(r), i.e. d^{n-1}/dr^{n-1} ((r - a)/(f(r) - f(a)))^n at r = a.
/// f is applied to truncated Taylor series, so coefficients are exact up to
/// rounding at any order.
template <typename Scalar, typename F>
Scalar lagrange_invert(F&& f, Scalar a, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "lagrange_invert: n must be positive");
  using Series = TaylorSeries<Scalar>;
  const Series fs = f(Series::variable(a, n));
  // q(s) = (f(a + s) - f(a)) / s, truncated at order n - 1.
  Series q(n - 1);
  for (int k = 0; k < n; ++k) q[k] = fs[k + 1];
  using std::abs;
  const double scale = std::max(1.0, static_cast<double>(abs(fs[0])));
  if (static_cast<double>(abs(q[0])) <= 1e-12 * scale)
    fail(ErrorKind::DerivativeVanishes, "lagrange_invert: f'(a) vanishes");
  const Series inv = powi(q, -n);
  Scalar factorial = Scalar(1);
  for (int k = 2; k < n; ++k) factorial *= static_cast<double>(k);
  return factorial * inv[n - 1];
}

/// Same coefficient for a black-box analytic function, whose Taylor
/// coefficients are estimated by trapezoidal quadrature on a circle of the
/// given radius around a.
std::complex<double> lagrange_invert(const std::function<std::complex<double>(std::complex<double>)>& f,
                                     std::complex<double> a, std::complex<double> f_at_a, int n,
                                     double radius = 0.25);

/// v = a + c e^{-v} / v^b by the explicit double-sum series.
SeriesSolution solve_offset_lambert(const GeneralizedLambertEquation& eq, const SeriesOptions& options = {});

/// (C + z) z^B = Omega e^{-z}, expanded around z = -C. Omega is passed as its
/// logarithm so large scale ratios do not overflow.
SeriesSolution four_loop_series(double b, double c, double log_omega, const SeriesOptions& options = {});

/// Any number of roots, via the multinomial expansion of the derivatives.
SeriesSolution generic_series(const GeneralizedLambertEquation& eq, const SeriesOptions& options = {});

}  // namespace rgflow

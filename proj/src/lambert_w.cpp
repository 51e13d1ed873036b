#include "rgflow/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rgflow/error.hpp"

namespace rgflow {

namespace {

// 1/e split into a double and its rounding remainder so z + 1/e keeps its
// low-order bits near the branch point.
constexpr double kInvEHi = 0.36787944117144233;
constexpr double kInvELo = -1.2428753672788363e-17;

double branch_point_series(double p) {
  // w = -1 + p - p^2/3 + 11/72 p^3 - ... with p = +-sqrt(2 e (z + 1/e)).
  constexpr double k[] = {-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0, -221.0 / 8505.0};
  double acc = 0.0;
  for (int i = 6; i >= 0; --i) acc = acc * p + k[i];
  return acc;
}

double halley(double z, double w) {
  // Near the branch point the step is dominated by rounding in w e^w - z, so
  // the iteration also stops once the residual sits at that rounding level.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 50; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (std::abs(f) <= 2.0 * eps * std::max(std::abs(z), std::abs(w * ew))) return w;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) return w;
  }
  fail(ErrorKind::NoConvergence, "lambert_w: Halley iteration did not converge for z = " + std::to_string(z));
}

// Newton on w + ln|w| = log_abs_z, for arguments beyond the double range.
double log_newton(double log_abs_z, double w) {
  for (int iter = 0; iter < 50; ++iter) {
    const double h = w + std::log(std::abs(w)) - log_abs_z;
    const double step = h / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-15 * std::abs(w)) return w;
  }
  fail(ErrorKind::NoConvergence, "lambert_w_log: iteration did not converge");
}

}  // namespace

const char* to_string(Branch b) { return b == Branch::principal ? "principal" : "minus_one"; }

double w_series_coefficient(int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "w_series_coefficient: n must be positive");
  if (n > 170) fail(ErrorKind::Overflow, "w_series_coefficient: n! overflows for n > 170");
  // -(-n)^n / (n! n) = (-1)^(n-1) n^(n-1) / n! = (-1)^(n-1) prod_{i=2..n} n/i.
  double mag = 1.0;
  for (int i = 2; i <= n; ++i) mag *= static_cast<double>(n) / i;
  return n % 2 == 1 ? mag : -mag;
}

double lambert_w(double z, Branch branch) {
  if (!std::isfinite(z)) fail(ErrorKind::DomainError, "lambert_w: non-finite argument");
  double d = (z + kInvEHi) + kInvELo;
  if (d < 0.0) {
    if (d < -4.0 * std::numeric_limits<double>::epsilon() * kInvEHi)
      fail(ErrorKind::DomainError, "lambert_w: argument below -1/e");
    d = 0.0;
  }
  const double sign = branch == Branch::principal ? 1.0 : -1.0;
  if (branch == Branch::minus_one && z >= 0.0) fail(ErrorKind::DomainError, "lambert_w: minus_one branch needs z < 0");
  if (z == 0.0) return 0.0;

  const double p = sign * std::sqrt(2.0 * std::numbers::e * d);
  if (d < 1e-10) return branch_point_series(p);

  double w;
  if (d < 0.25) {
    w = branch_point_series(p);
  } else if (branch == Branch::minus_one) {
    const double l1 = std::log(-z);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  } else if (z <= 3.0) {
    w = std::log1p(z);
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  w = halley(z, w);
  if (branch == Branch::principal ? w < -1.0 : w > -1.0) w = -1.0;
  return w;
}

double lambert_w_log(double log_abs_z, int sign, Branch branch) {
  if (sign != 1 && sign != -1) fail(ErrorKind::InvalidArgument, "lambert_w_log: sign must be +1 or -1");
  if (std::isnan(log_abs_z)) fail(ErrorKind::DomainError, "lambert_w_log: NaN argument");
  if (std::abs(log_abs_z) < 700.0) return lambert_w(sign * std::exp(log_abs_z), branch);

  if (sign > 0) {
    if (branch == Branch::minus_one) fail(ErrorKind::DomainError, "lambert_w_log: minus_one branch needs z < 0");
    if (log_abs_z < 0.0) return std::exp(log_abs_z);
    const double l = log_abs_z;
    return log_newton(l, l - std::log(l) + std::log(l) / l);
  }
  if (log_abs_z > 0.0) fail(ErrorKind::DomainError, "lambert_w_log: argument below -1/e");
  if (branch == Branch::principal) return -std::exp(log_abs_z);
  const double l = log_abs_z;
  return log_newton(l, l - std::log(-l));
}

}  // namespace rgflow

#include "rgflow/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rgflow/special.hpp"

namespace rgflow {

namespace {

using cd = std::complex<double>;

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }
bool is_real(cd v) { return v.imag() == 0.0; }

// Sums values in descending magnitude with compensation.
template <typename T>
T ordered_sum(std::vector<T>& values) {
  std::sort(values.begin(), values.end(), [](const T& x, const T& y) { return std::abs(x) > std::abs(y); });
  CompensatedSum<T> acc;
  for (const T& v : values) acc.add(v);
  return acc.value();
}

// Shared truncation loop: next(k) yields the order-k increment.
template <typename NextTerm>
SeriesSolution sum_series(cd base, const SeriesOptions& options, NextTerm&& next) {
  if (options.k_max < 1) fail(ErrorKind::InvalidArgument, "series: k_max must be positive");
  SeriesSolution out;
  out.base = base;
  CompensatedSum<cd> partial;
  partial.add(base);
  for (int k = 1; k <= options.k_max; ++k) {
    const cd term = next(k);
    if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
      fail(ErrorKind::NoConvergence, "series: term " + std::to_string(k) + " is not finite");
    out.terms.push_back(term);
    partial.add(term);
    out.k_max = k;
    if (std::abs(term) <= options.tau * std::abs(partial.value())) {
      out.converged = true;
      return out;
    }
  }
  fail(ErrorKind::NoConvergence, "series: terms did not fall below tolerance within k_max = " +
                                     std::to_string(options.k_max));
}

void check_real_result(const SeriesSolution& s) {
  const cd v = s.value();
  if (std::abs(v.imag()) > 1e-10 * std::abs(v))
    fail(ErrorKind::NegativeBase, "series: complex-mode result has a non-negligible imaginary part");
}

// Offset-Lambert increment with real parameters, in the log domain with
// explicit sign tracking: v = a + sign_c e^{log_abs_c} e^{-v} / v^b.
double offset_term_real(int k, double a, double b, double log_abs_c, int sign_c) {
  if (sign_c == 0) return 0.0;
  const double kd = k;
  const double log_abs_a = std::log(std::abs(a));
  // -(-c)^k carries the sign -(-sign_c)^k.
  const int prefactor_sign = (sign_c > 0 && k % 2 == 1) ? 1 : -1;
  std::vector<double> parts;
  parts.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const int n = k - 1 - j;
    const auto [log_poch, sign_poch] = log_abs_pochhammer(kd * b, n);
    if (sign_poch == 0) continue;
    const double power = kd * b + n;
    int sign = prefactor_sign * sign_poch;
    if (a < 0.0 && static_cast<long long>(std::llround(power)) % 2 != 0) sign = -sign;
    const double log_mag = kd * log_abs_c + j * std::log(kd) + log_poch - kd * a - power * log_abs_a -
                           std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::log(kd);
    parts.push_back(sign * std::exp(log_mag));
  }
  return ordered_sum(parts);
}

cd offset_term_complex(int k, cd a, cd b, cd log_c) {
  const double kd = k;
  const cd log_a = std::log(a);
  const cd log_minus_c = log_c + cd(0.0, std::numbers::pi);
  std::vector<cd> parts;
  parts.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const int n = k - 1 - j;
    const cd log_poch = log_pochhammer(kd * b, n);
    if (std::isinf(log_poch.real())) continue;
    const cd log_mag = kd * log_minus_c + j * std::log(kd) + log_poch - kd * a - (kd * b + double(n)) * log_a -
                       std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::log(kd);
    parts.push_back(-std::exp(log_mag));
  }
  return ordered_sum(parts);
}

}  // namespace

cd GeneralizedLambertEquation::defect(cd v) const {
  cd log_f = -v;
  for (std::size_t l = 0; l < roots.size(); ++l) log_f -= exponents[l] * std::log(v + roots[l]);
  return a + c * std::exp(log_f) - v;
}

cd SeriesSolution::value() const {
  std::vector<cd> all(terms.begin(), terms.end());
  all.push_back(base);
  return ordered_sum(all);
}

cd lagrange_invert(const std::function<cd(cd)>& f, cd a, cd f_at_a, int n, double radius) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "lagrange_invert: n must be positive");
  if (!(radius > 0.0)) fail(ErrorKind::InvalidArgument, "lagrange_invert: radius must be positive");
  const int samples = std::max(64, 8 * n);
  std::vector<cd> values(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) {
    const double theta = 2.0 * std::numbers::pi * m / samples;
    values[static_cast<std::size_t>(m)] = f(a + radius * std::polar(1.0, theta)) - f_at_a;
  }
  // Taylor coefficients 1..n of f(a + s) - f(a).
  TaylorSeries<cd> q(n - 1);
  for (int k = 1; k <= n; ++k) {
    cd acc = 0.0;
    for (int m = 0; m < samples; ++m)
      acc += values[static_cast<std::size_t>(m)] * std::polar(1.0, -2.0 * std::numbers::pi * k * m / samples);
    q[k - 1] = acc / (samples * std::pow(radius, k));
  }
  const double scale = std::max(1.0, std::abs(f_at_a));
  if (std::abs(q[0]) <= 1e-12 * scale) fail(ErrorKind::DerivativeVanishes, "lagrange_invert: f'(a) vanishes");
  const TaylorSeries<cd> inv = powi(q, -n);
  double factorial = 1.0;
  for (int k = 2; k < n; ++k) factorial *= k;
  return factorial * inv[n - 1];
}

SeriesSolution solve_offset_lambert(const GeneralizedLambertEquation& eq, const SeriesOptions& options) {
  if (eq.roots.size() != 1 || eq.exponents.size() != 1 || eq.roots[0] != cd(0.0))
    fail(ErrorKind::InvalidArgument, "solve_offset_lambert: expects the single root 0");
  const cd a = eq.a;
  const cd b = eq.exponents[0];
  if (a == cd(0.0)) fail(ErrorKind::InvalidArgument, "solve_offset_lambert: a must be nonzero");

  SeriesSolution s;
  if (!options.complex_mode) {
    if (!is_real(a) || !is_real(b) || !is_real(eq.c))
      fail(ErrorKind::NegativeBase, "solve_offset_lambert: complex parameters need complex mode");
    if (a.real() < 0.0 && !is_integer(b.real()))
      fail(ErrorKind::NegativeBase, "solve_offset_lambert: negative base with non-integer exponent");
    const double c = eq.c.real();
    const double log_abs_c = c == 0.0 ? 0.0 : std::log(std::abs(c));
    const int sign_c = (c > 0.0) - (c < 0.0);
    s = sum_series(a, options,
                   [&](int k) { return cd(offset_term_real(k, a.real(), b.real(), log_abs_c, sign_c)); });
  } else {
    if (eq.c == cd(0.0)) {
      s = sum_series(a, options, [](int) { return cd(0.0); });
    } else {
      const cd log_c = std::log(eq.c);
      s = sum_series(a, options, [&](int k) { return offset_term_complex(k, a, b, log_c); });
    }
  }
  s.residual = std::abs(eq.defect(s.value()));
  return s;
}

SeriesSolution four_loop_series(double b, double c, double log_omega, const SeriesOptions& options) {
  const double a = -c;
  if (a == 0.0) fail(ErrorKind::InvalidArgument, "four_loop_series: C must be nonzero");
  if (!std::isfinite(log_omega) && log_omega != -INFINITY)
    fail(ErrorKind::InvalidArgument, "four_loop_series: invalid log Omega");
  if (a < 0.0 && !is_integer(b)) fail(ErrorKind::NegativeBase, "four_loop_series: -C <= 0 with non-integer B");

  const int sign_omega = log_omega == -INFINITY ? 0 : 1;
  SeriesSolution s = sum_series(a, options, [&](int k) { return cd(offset_term_real(k, a, b, log_omega, sign_omega)); });
  const double z = s.value().real();
  double forcing = sign_omega == 0 ? 0.0 : std::exp(log_omega - z - b * std::log(std::abs(z)));
  if (z < 0.0 && std::llround(b) % 2 != 0) forcing = -forcing;
  s.residual = std::abs(a + forcing - z);
  return s;
}

SeriesSolution generic_series(const GeneralizedLambertEquation& eq, const SeriesOptions& options) {
  const std::size_t n = eq.roots.size();
  if (eq.exponents.size() != n) fail(ErrorKind::InvalidArgument, "generic_series: roots and exponents differ in length");

  std::vector<cd> shifted(n);
  for (std::size_t l = 0; l < n; ++l) {
    shifted[l] = eq.a + eq.roots[l];
    if (shifted[l] == cd(0.0)) fail(ErrorKind::InvalidArgument, "generic_series: expansion point on a singularity");
  }
  if (!options.complex_mode) {
    bool real = is_real(eq.a) && is_real(eq.c);
    for (std::size_t l = 0; l < n; ++l) real = real && is_real(eq.roots[l]) && is_real(eq.exponents[l]);
    if (!real) fail(ErrorKind::NegativeBase, "generic_series: complex parameters need complex mode");
    for (std::size_t l = 0; l < n; ++l)
      if (shifted[l].real() < 0.0 && !is_integer(eq.exponents[l].real()))
        fail(ErrorKind::NegativeBase, "generic_series: negative base with non-integer exponent");
  }

  const bool trivial = eq.c == cd(0.0);
  const cd log_minus_c = trivial ? cd(0.0) : std::log(-eq.c);
  std::vector<cd> log_shifted(n);
  for (std::size_t l = 0; l < n; ++l) log_shifted[l] = std::log(shifted[l]);

  auto term = [&](int k) -> cd {
    if (trivial) return 0.0;
    const double kd = k;
    cd log_g = kd * log_minus_c - kd * eq.a - std::log(kd);
    for (std::size_t l = 0; l < n; ++l) log_g -= kd * eq.exponents[l] * log_shifted[l];
    const cd g = -std::exp(log_g);

    // Normalized derivative factors: exponential k^j/j!, root l (k c_l)_j/j! (a+a_l)^{-j}.
    const int top = k - 1;
    std::vector<std::vector<cd>> factor(n + 1, std::vector<cd>(static_cast<std::size_t>(top + 1)));
    for (std::size_t l = 0; l < n; ++l) {
      factor[l][0] = 1.0;
      for (int j = 1; j <= top; ++j)
        factor[l][static_cast<std::size_t>(j)] = factor[l][static_cast<std::size_t>(j - 1)] *
                                                 (kd * eq.exponents[l] + double(j - 1)) / (double(j) * shifted[l]);
    }
    factor[n][0] = 1.0;
    for (int j = 1; j <= top; ++j) factor[n][static_cast<std::size_t>(j)] = factor[n][static_cast<std::size_t>(j - 1)] * kd / double(j);

    std::vector<cd> parts;
    for_each_composition(top, static_cast<int>(n + 1), [&](std::span<const int> j) {
      cd p = 1.0;
      for (std::size_t l = 0; l <= n; ++l) p *= factor[l][static_cast<std::size_t>(j[l])];
      parts.push_back(p);
    });
    return g * ordered_sum(parts);
  };

  SeriesSolution s = sum_series(eq.a, options, term);
  if (options.complex_mode) check_real_result(s);
  s.residual = std::abs(eq.defect(s.value()));
  return s;
}

}  // namespace rgflow

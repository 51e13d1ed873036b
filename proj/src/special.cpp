#include "rgflow/special.hpp"

#include <cmath>

#include "rgflow/error.hpp"

namespace rgflow {

namespace {

// Sign of Gamma(y) for y not a non-positive integer.
int gamma_sign(double y) {
  if (y > 0.0) return 1;
  const double poles_crossed = std::ceil(-y);
  return std::fmod(poles_crossed, 2.0) == 0.0 ? 1 : -1;
}

bool is_nonpositive_integer(double y) { return y <= 0.0 && y == std::floor(y); }

}  // namespace

std::pair<double, int> log_abs_pochhammer(double x, int n) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "pochhammer: negative length");
  if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "pochhammer: non-finite base");
  if (n == 0) return {0.0, 1};

  // A non-positive integer base makes the product hit zero once it reaches 0.
  if (is_nonpositive_integer(x) && -x < n) return {-INFINITY, 0};

  if (n <= 128) {
    double log_mag = 0.0;
    int sign = 1;
    for (int i = 0; i < n; ++i) {
      const double f = x + i;
      log_mag += std::log(std::abs(f));
      if (f < 0.0) sign = -sign;
    }
    return {log_mag, sign};
  }
  if (is_nonpositive_integer(x)) {
    // Both Gamma values sit on poles; the finite product is the definition.
    double log_mag = 0.0;
    int sign = 1;
    for (int i = 0; i < n; ++i) {
      log_mag += std::log(std::abs(x + i));
      if (x + i < 0.0) sign = -sign;
    }
    return {log_mag, sign};
  }
  return {std::lgamma(x + n) - std::lgamma(x), gamma_sign(x + n) * gamma_sign(x)};
}

double pochhammer(double x, int n) {
  if (n >= 0 && n <= 128 && std::isfinite(x)) {
    double acc = 1.0;
    for (int i = 0; i < n; ++i) acc *= x + i;
    return acc;
  }
  const auto [log_mag, sign] = log_abs_pochhammer(x, n);
  return sign == 0 ? 0.0 : sign * std::exp(log_mag);
}

std::complex<double> log_pochhammer(std::complex<double> x, int n) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "pochhammer: negative length");
  std::complex<double> acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> f = x + static_cast<double>(i);
    if (f == std::complex<double>(0.0)) return {-INFINITY, 0.0};
    acc += std::log(f);
  }
  return acc;
}

namespace {

void compose(std::vector<int>& j, std::size_t pos, int remaining,
             const std::function<void(std::span<const int>)>& visit) {
  if (pos + 1 == j.size()) {
    j[pos] = remaining;
    visit(j);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    j[pos] = v;
    compose(j, pos + 1, remaining - v, visit);
  }
}

}  // namespace

void for_each_composition(int total, int parts, const std::function<void(std::span<const int>)>& visit) {
  if (total < 0 || parts < 1) fail(ErrorKind::InvalidArgument, "for_each_composition: bad arguments");
  std::vector<int> j(static_cast<std::size_t>(parts), 0);
  compose(j, 0, total, visit);
}

double multinomial(std::span<const int> parts) {
  // Product of binomials, each built incrementally so intermediates stay exact
  // while they fit in 53 bits.
  double value = 1.0;
  int running = 0;
  for (int p : parts) {
    if (p < 0) fail(ErrorKind::InvalidArgument, "multinomial: negative part");
    for (int i = 1; i <= p; ++i) {
      ++running;
      value = value * running / i;
    }
  }
  return value;
}

}  // namespace rgflow

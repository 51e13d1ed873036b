#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "rgflow/error.hpp"

namespace rgflow {

/// Truncated power series c_0 + c_1 s + ... + c_n s^n. All arithmetic keeps the
/// truncation order of the left operand; mixing orders is a caller error.
/// Arithmetic on these values is how derivatives of composed functions are
/// obtained exactly, to any order, without finite differences.
template <typename Scalar>
class TaylorSeries {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit TaylorSeries(int order, Scalar constant = Scalar(0)) : c_(Coefficients::Zero(order + 1)) {
    c_(0) = constant;
  }
  explicit TaylorSeries(Coefficients c) : c_(std::move(c)) {}

  /// The expansion variable x0 + s.
  static TaylorSeries variable(Scalar x0, int order) {
    TaylorSeries t(order, x0);
    if (order >= 1) t.c_(1) = Scalar(1);
    return t;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const Coefficients& coeffs() const { return c_; }
  Scalar operator[](int k) const { return k <= order() ? c_(k) : Scalar(0); }
  Scalar& operator[](int k) { return c_(k); }

  TaylorSeries& operator+=(const TaylorSeries& o) {
    c_ += o.c_.head(c_.size());
    return *this;
  }
  TaylorSeries& operator-=(const TaylorSeries& o) {
    c_ -= o.c_.head(c_.size());
    return *this;
  }
  TaylorSeries& operator*=(const TaylorSeries& o) { return *this = *this * o; }
  TaylorSeries& operator/=(const TaylorSeries& o) { return *this = *this / o; }

  friend TaylorSeries operator+(TaylorSeries a, const TaylorSeries& b) { return a += b; }
  friend TaylorSeries operator-(TaylorSeries a, const TaylorSeries& b) { return a -= b; }
  friend TaylorSeries operator-(TaylorSeries a) {
    a.c_ = -a.c_;
    return a;
  }
  friend TaylorSeries operator+(TaylorSeries a, Scalar s) {
    a.c_(0) += s;
    return a;
  }
  friend TaylorSeries operator+(Scalar s, TaylorSeries a) { return a + s; }
  friend TaylorSeries operator-(TaylorSeries a, Scalar s) {
    a.c_(0) -= s;
    return a;
  }
  friend TaylorSeries operator-(Scalar s, TaylorSeries a) { return (-a) + s; }
  friend TaylorSeries operator*(TaylorSeries a, Scalar s) {
    a.c_ *= s;
    return a;
  }
  friend TaylorSeries operator*(Scalar s, TaylorSeries a) { return a * s; }
  friend TaylorSeries operator/(TaylorSeries a, Scalar s) {
    a.c_ /= s;
    return a;
  }

  friend TaylorSeries operator*(const TaylorSeries& a, const TaylorSeries& b) {
    const int n = a.order();
    TaylorSeries out(n);
    for (int k = 0; k <= n; ++k) {
      Scalar acc = Scalar(0);
      for (int j = 0; j <= k; ++j) acc += a[j] * b[k - j];
      out.c_(k) = acc;
    }
    return out;
  }

  friend TaylorSeries operator/(const TaylorSeries& a, const TaylorSeries& b) {
    if (b[0] == Scalar(0)) fail(ErrorKind::InvalidArgument, "TaylorSeries: division by series with zero constant term");
    const int n = a.order();
    TaylorSeries out(n);
    for (int k = 0; k <= n; ++k) {
      Scalar acc = a[k];
      for (int j = 1; j <= k; ++j) acc -= b[j] * out.c_(k - j);
      out.c_(k) = acc / b[0];
    }
    return out;
  }

  friend TaylorSeries operator/(Scalar s, const TaylorSeries& b) { return TaylorSeries(b.order(), s) / b; }

  friend TaylorSeries exp(const TaylorSeries& a) {
    using std::exp;
    const int n = a.order();
    TaylorSeries out(n, exp(a[0]));
    for (int k = 1; k <= n; ++k) {
      Scalar acc = Scalar(0);
      for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * out.c_(k - j);
      out.c_(k) = acc / static_cast<double>(k);
    }
    return out;
  }

  friend TaylorSeries log(const TaylorSeries& a) {
    using std::log;
    if (a[0] == Scalar(0)) fail(ErrorKind::DomainError, "TaylorSeries: log of series with zero constant term");
    const int n = a.order();
    TaylorSeries out(n, log(a[0]));
    for (int k = 1; k <= n; ++k) {
      Scalar acc = a[k];
      for (int j = 1; j < k; ++j) acc -= static_cast<double>(j) / static_cast<double>(k) * out.c_(j) * a[k - j];
      out.c_(k) = acc / a[0];
    }
    return out;
  }

  /// a^p for non-integer p by the J.C.P. Miller recurrence.
  friend TaylorSeries pow(const TaylorSeries& a, Scalar p) {
    using std::pow;
    if (a[0] == Scalar(0)) fail(ErrorKind::DomainError, "TaylorSeries: pow of series with zero constant term");
    const int n = a.order();
    TaylorSeries out(n, pow(a[0], p));
    for (int k = 1; k <= n; ++k) {
      Scalar acc = Scalar(0);
      for (int j = 1; j <= k; ++j)
        acc += (p * static_cast<double>(j) - static_cast<double>(k - j)) * a[j] * out.c_(k - j);
      out.c_(k) = acc / (static_cast<double>(k) * a[0]);
    }
    return out;
  }

  /// Integer powers, including negative ones, by repeated squaring.
  friend TaylorSeries powi(const TaylorSeries& a, int p) {
    if (p < 0) return Scalar(1) / powi(a, -p);
    TaylorSeries result(a.order(), Scalar(1));
    TaylorSeries base = a;
    while (p > 0) {
      if (p & 1) result = result * base;
      base = base * base;
      p >>= 1;
    }
    return result;
  }

 private:
  Coefficients c_;
};

}  // namespace rgflow

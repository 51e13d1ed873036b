#pragma once

#include <complex>
#include <initializer_list>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rgflow/error.hpp"

namespace rgflow {

namespace detail {
template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
}  // namespace detail

template <typename T>
inline constexpr bool is_complex_v = detail::is_complex<T>::value;

/// Dense polynomial with ascending coefficients: coeffs()[k] multiplies y^k.
/// Trailing exact zeros are dropped on construction, so degree() is the true
/// degree; the zero polynomial keeps a single zero coefficient.
template <typename Scalar>
class BasicPolynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicPolynomial() : coeffs_(Coefficients::Zero(1)) {}
  explicit BasicPolynomial(Coefficients coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  BasicPolynomial(std::initializer_list<Scalar> coeffs) : coeffs_(static_cast<Eigen::Index>(coeffs.size())) {
    Eigen::Index k = 0;
    for (const Scalar& c : coeffs) coeffs_(k++) = c;
    trim();
  }

  static BasicPolynomial monomial(int power, Scalar coeff = Scalar(1)) {
    Coefficients c = Coefficients::Zero(power + 1);
    c(power) = coeff;
    return BasicPolynomial(std::move(c));
  }

  /// Monic polynomial with the given zeros, prod (y - z_k).
  static BasicPolynomial from_roots(const std::vector<Scalar>& zeros, Scalar leading = Scalar(1)) {
    Coefficients c = Coefficients::Zero(static_cast<Eigen::Index>(zeros.size()) + 1);
    c(0) = leading;
    Eigen::Index deg = 0;
    for (const Scalar& z : zeros) {
      ++deg;
      for (Eigen::Index k = deg; k >= 1; --k) c(k) = c(k - 1) - z * c(k);
      c(0) = -z * c(0);
    }
    return BasicPolynomial(std::move(c));
  }

  const Coefficients& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }
  Scalar leading() const { return coeffs_(coeffs_.size() - 1); }

  Scalar operator[](int k) const {
    return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_(k) : Scalar(0);
  }

  /// Horner evaluation; the argument may be real or complex.
  template <typename T>
  auto operator()(const T& y) const {
    using R = decltype(Scalar() * T());
    R acc = R(0);
    for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * y + R(coeffs_(k));
    return acc;
  }

  BasicPolynomial derivative() const {
    if (degree() == 0) return BasicPolynomial();
    Coefficients c(coeffs_.size() - 1);
    for (Eigen::Index k = 1; k < coeffs_.size(); ++k) c(k - 1) = coeffs_(k) * static_cast<double>(k);
    return BasicPolynomial(std::move(c));
  }

  /// Antiderivative with zero constant term.
  BasicPolynomial integral() const {
    Coefficients c = Coefficients::Zero(coeffs_.size() + 1);
    for (Eigen::Index k = 0; k < coeffs_.size(); ++k) c(k + 1) = coeffs_(k) / static_cast<double>(k + 1);
    return BasicPolynomial(std::move(c));
  }

  /// Coefficient-reversed polynomial y^n p(1/y) for a chosen n >= degree().
  BasicPolynomial reversed(int n) const {
    Coefficients c = Coefficients::Zero(n + 1);
    for (int k = 0; k <= degree(); ++k) c(n - k) = coeffs_(k);
    return BasicPolynomial(std::move(c));
  }

  /// Sum of absolute coefficients; the scale used by residual tests.
  double norm1() const { return coeffs_.cwiseAbs().sum(); }

  friend BasicPolynomial operator+(const BasicPolynomial& p, const BasicPolynomial& q) {
    const Eigen::Index n = std::max(p.coeffs_.size(), q.coeffs_.size());
    Coefficients c = Coefficients::Zero(n);
    c.head(p.coeffs_.size()) += p.coeffs_;
    c.head(q.coeffs_.size()) += q.coeffs_;
    return BasicPolynomial(std::move(c));
  }
  friend BasicPolynomial operator-(const BasicPolynomial& p, const BasicPolynomial& q) {
    const Eigen::Index n = std::max(p.coeffs_.size(), q.coeffs_.size());
    Coefficients c = Coefficients::Zero(n);
    c.head(p.coeffs_.size()) += p.coeffs_;
    c.head(q.coeffs_.size()) -= q.coeffs_;
    return BasicPolynomial(std::move(c));
  }
  friend BasicPolynomial operator*(const BasicPolynomial& p, const BasicPolynomial& q) {
    Coefficients c = Coefficients::Zero(p.coeffs_.size() + q.coeffs_.size() - 1);
    for (Eigen::Index i = 0; i < p.coeffs_.size(); ++i)
      for (Eigen::Index j = 0; j < q.coeffs_.size(); ++j) c(i + j) += p.coeffs_(i) * q.coeffs_(j);
    return BasicPolynomial(std::move(c));
  }
  friend BasicPolynomial operator*(Scalar s, const BasicPolynomial& p) {
    return BasicPolynomial(Coefficients(s * p.coeffs_));
  }

 private:
  void trim() {
    if (coeffs_.size() == 0) {
      coeffs_ = Coefficients::Zero(1);
      return;
    }
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_(n - 1) == Scalar(0)) --n;
    coeffs_.conservativeResize(n);
  }

  Coefficients coeffs_;
};

using Polynomial = BasicPolynomial<double>;
using ComplexPolynomial = BasicPolynomial<std::complex<double>>;

/// num/den with den not identically zero.
struct RationalFunction {
  Polynomial num;
  Polynomial den;

  RationalFunction(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) fail(ErrorKind::InvalidArgument, "rational function with zero denominator");
  }

  template <typename T>
  auto operator()(const T& y) const {
    return num(y) / den(y);
  }
};

struct RootSet {
  Eigen::VectorXcd roots;
  std::vector<int> multiplicities;

  int count() const { return static_cast<int>(roots.size()); }
};

struct RootOptions {
  int max_iterations = 200;
  /// Residual bound relative to sum_k |c_k| max(1,|r|)^k.
  double residual_tol = 1e-10;
  /// Roots closer than this (relative to max(1,|r|)) are reported as one root
  /// with multiplicity.
  double cluster_tol = 1e-7;
};

template <typename Scalar>
std::pair<BasicPolynomial<Scalar>, BasicPolynomial<Scalar>> poly_divide(const BasicPolynomial<Scalar>& num,
                                                                        const BasicPolynomial<Scalar>& den);

/// All complex roots, sorted by (real, imag). Degree <= 2 uses closed forms;
/// higher degrees use Aberth-Ehrlich simultaneous iteration followed by one
/// Newton polish per root. Real input yields exactly real roots and exact
/// conjugate pairs.
template <typename Scalar>
RootSet poly_roots(const BasicPolynomial<Scalar>& p, const RootOptions& options = {});

/// |p(r)| scaled by sum_k |c_k| max(1,|r|)^k.
template <typename Scalar>
double scaled_residual(const BasicPolynomial<Scalar>& p, std::complex<double> r);

}  // namespace rgflow

#include "rgflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rgflow {

namespace {

using cd = std::complex<double>;

template <typename Scalar>
cd as_complex(Scalar v) {
  return cd(v);
}

template <typename Scalar>
std::vector<cd> closed_form_roots(const BasicPolynomial<Scalar>& p) {
  if (p.degree() == 1) return {-as_complex(p[0]) / as_complex(p[1])};

  const cd a = as_complex(p[2]);
  const cd b = as_complex(p[1]);
  const cd c = as_complex(p[0]);
  if constexpr (!is_complex_v<Scalar>) {
    const double disc = p[1] * p[1] - 4.0 * p[2] * p[0];
    if (disc < 0.0) {
      const double re = -p[1] / (2.0 * p[2]);
      const double im = std::sqrt(-disc) / (2.0 * std::abs(p[2]));
      return {cd(re, -im), cd(re, im)};
    }
    // Cancellation-free form.
    const double q = -0.5 * (p[1] + std::copysign(std::sqrt(disc), p[1]));
    if (q == 0.0) return {cd(0.0), cd(0.0)};
    return {cd(q / p[2]), cd(p[0] / q)};
  } else {
    const cd sq = std::sqrt(b * b - 4.0 * a * c);
    const cd q = -0.5 * (std::real(std::conj(b) * sq) >= 0.0 ? b + sq : b - sq);
    if (q == cd(0.0)) return {cd(0.0), cd(0.0)};
    return {q / a, c / q};
  }
}

template <typename Scalar>
std::vector<cd> aberth_roots(const BasicPolynomial<Scalar>& p, const RootOptions& options) {
  const int n = p.degree();
  const ComplexPolynomial pc(Eigen::VectorXcd(p.coeffs().template cast<cd>()));
  const ComplexPolynomial dp = pc.derivative();

  // Start on a circle whose radius matches the geometric mean of the root
  // moduli, rotated off the real axis so conjugate pairs can separate.
  const double radius = std::pow(std::abs(pc[0] / pc.leading()), 1.0 / n);
  const double r0 = (radius > 0.0 && std::isfinite(radius)) ? radius : 1.0;
  std::vector<cd> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n + 0.4;
    z[static_cast<std::size_t>(k)] = r0 * (1.0 + 0.01 * k) * cd(std::cos(theta), std::sin(theta));
  }

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    bool done = true;
    for (int k = 0; k < n; ++k) {
      const cd zk = z[static_cast<std::size_t>(k)];
      const cd pv = pc(zk);
      if (pv == cd(0.0)) continue;
      const cd ratio = pv / dp(zk);
      cd repulsion = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) repulsion += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
      const cd step = ratio / (1.0 - ratio * repulsion);
      z[static_cast<std::size_t>(k)] = zk - step;
      if (std::abs(step) > 1e-15 * std::max(1.0, std::abs(zk))) done = false;
    }
    if (done) break;
  }

  for (cd& zk : z) {
    const cd d = dp(zk);
    if (d != cd(0.0)) {
      const cd polished = zk - pc(zk) / d;
      if (std::isfinite(polished.real()) && std::isfinite(polished.imag()) &&
          std::abs(pc(polished)) <= std::abs(pc(zk)))
        zk = polished;
    }
  }
  return z;
}

// Snap nearly-real roots onto the axis and make complex roots of a real
// polynomial exact conjugate pairs.
void realify(std::vector<cd>& roots) {
  for (cd& r : roots)
    if (std::abs(r.imag()) <= 1e-12 * std::max(1.0, std::abs(r))) r = cd(r.real(), 0.0);

  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i] || roots[i].imag() <= 0.0) continue;
    std::size_t best = roots.size();
    double best_dist = 0.0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i || used[j] || roots[j].imag() >= 0.0) continue;
      const double d = std::abs(roots[j] - std::conj(roots[i]));
      if (best == roots.size() || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best == roots.size()) continue;
    const cd avg = 0.5 * (roots[i] + std::conj(roots[best]));
    roots[i] = avg;
    roots[best] = std::conj(avg);
    used[i] = used[best] = true;
  }
}

}  // namespace

template <typename Scalar>
std::pair<BasicPolynomial<Scalar>, BasicPolynomial<Scalar>> poly_divide(const BasicPolynomial<Scalar>& num,
                                                                        const BasicPolynomial<Scalar>& den) {
  using Poly = BasicPolynomial<Scalar>;
  using Coeffs = typename Poly::Coefficients;
  if (den.is_zero()) fail(ErrorKind::InvalidArgument, "poly_divide: zero divisor");

  const int dn = den.degree();
  const int nn = num.degree();
  if (nn < dn) return {Poly(), num};

  Coeffs rem = num.coeffs();
  Coeffs quot = Coeffs::Zero(nn - dn + 1);
  const Scalar lead = den.leading();
  for (int k = nn - dn; k >= 0; --k) {
    const Scalar q = rem(k + dn) / lead;
    quot(k) = q;
    for (int j = 0; j <= dn; ++j) rem(k + j) -= q * den[j];
    rem(k + dn) = Scalar(0);
  }
  Coeffs r = dn > 0 ? Coeffs(rem.head(dn)) : Coeffs::Zero(1);
  return {Poly(std::move(quot)), Poly(std::move(r))};
}

template <typename Scalar>
double scaled_residual(const BasicPolynomial<Scalar>& p, std::complex<double> r) {
  const double m = std::max(1.0, std::abs(r));
  double scale = 0.0;
  double mk = 1.0;
  for (int k = 0; k <= p.degree(); ++k) {
    scale += std::abs(p[k]) * mk;
    mk *= m;
  }
  const double value = std::abs(p(r));
  return scale > 0.0 ? value / scale : value;
}

template <typename Scalar>
RootSet poly_roots(const BasicPolynomial<Scalar>& p, const RootOptions& options) {
  if (p.degree() < 1) fail(ErrorKind::InvalidArgument, "poly_roots: degree must be at least 1");
  for (int k = 0; k <= p.degree(); ++k)
    if (!std::isfinite(std::abs(p[k]))) fail(ErrorKind::InvalidArgument, "poly_roots: non-finite coefficient");

  // Exact zero roots are split off first; they would stall the iteration.
  int zeros = 0;
  while (p[zeros] == Scalar(0)) ++zeros;
  std::vector<cd> roots(static_cast<std::size_t>(zeros), cd(0.0));
  if (p.degree() > zeros) {
    typename BasicPolynomial<Scalar>::Coefficients shifted = p.coeffs().tail(p.degree() + 1 - zeros);
    const BasicPolynomial<Scalar> q(std::move(shifted));
    const std::vector<cd> rest = q.degree() <= 2 ? closed_form_roots(q) : aberth_roots(q, options);
    roots.insert(roots.end(), rest.begin(), rest.end());
  }
  if constexpr (!is_complex_v<Scalar>) realify(roots);

  for (const cd& r : roots) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || scaled_residual(p, r) > options.residual_tol)
      fail(ErrorKind::IllConditioned, "poly_roots: residual check failed after iteration budget");
  }

  std::sort(roots.begin(), roots.end(), [](const cd& a, const cd& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  // Cluster coincident roots into one entry with multiplicity.
  std::vector<cd> distinct;
  std::vector<int> mult;
  std::vector<bool> taken(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (taken[i]) continue;
    cd sum = roots[i];
    int m = 1;
    taken[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (taken[j]) continue;
      if (std::abs(roots[j] - roots[i]) <= options.cluster_tol * std::max(1.0, std::abs(roots[i]))) {
        sum += roots[j];
        ++m;
        taken[j] = true;
      }
    }
    distinct.push_back(sum / static_cast<double>(m));
    mult.push_back(m);
  }

  RootSet out;
  out.roots = Eigen::Map<const Eigen::VectorXcd>(distinct.data(), static_cast<Eigen::Index>(distinct.size()));
  out.multiplicities = std::move(mult);
  return out;
}

template std::pair<Polynomial, Polynomial> poly_divide(const Polynomial&, const Polynomial&);
template std::pair<ComplexPolynomial, ComplexPolynomial> poly_divide(const ComplexPolynomial&, const ComplexPolynomial&);
template RootSet poly_roots(const Polynomial&, const RootOptions&);
template RootSet poly_roots(const ComplexPolynomial&, const RootOptions&);
template double scaled_residual(const Polynomial&, std::complex<double>);
template double scaled_residual(const ComplexPolynomial&, std::complex<double>);

}  // namespace rgflow

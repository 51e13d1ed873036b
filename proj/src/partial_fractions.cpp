#include "rgflow/partial_fractions.hpp"

#include <algorithm>
#include <cmath>

#include "rgflow/taylor_series.hpp"

namespace rgflow {

namespace {

using cd = std::complex<double>;

std::vector<cd> expand(const RootSet& rs) {
  std::vector<cd> out;
  for (int i = 0; i < rs.count(); ++i)
    for (int m = 0; m < rs.multiplicities[static_cast<std::size_t>(i)]; ++m) out.push_back(rs.roots(i));
  return out;
}

Polynomial real_part(const ComplexPolynomial& p) {
  return Polynomial(Eigen::VectorXd(p.coeffs().real()));
}

Polynomial shift_down(const Polynomial& p, int k) {
  if (k == 0) return p;
  return Polynomial(Eigen::VectorXd(p.coeffs().tail(p.degree() + 1 - k)));
}

bool is_real(cd z) { return z.imag() == 0.0; }

void realify_weights(std::vector<LogTerm>& terms) {
  for (LogTerm& t : terms)
    if (is_real(t.offset)) t.weight = cd(t.weight.real(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].offset.imag() <= 0.0) continue;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (terms[j].offset == std::conj(terms[i].offset)) {
        const cd w = 0.5 * (terms[i].weight + std::conj(terms[j].weight));
        terms[i].weight = w;
        terms[j].weight = std::conj(w);
      }
    }
  }
}

}  // namespace

double PartialFractionForm::total_log_weight() const {
  cd s = 0.0;
  for (const LogTerm& t : log_terms) s += t.weight;
  return s.real();
}

PartialFractionForm partial_fractions(const RationalFunction& r, int pole_at_zero_order,
                                      const PartialFractionOptions& options) {
  const int p = pole_at_zero_order;
  if (p < 0) fail(ErrorKind::InvalidArgument, "partial_fractions: negative pole order");
  const Polynomial& num = r.num;
  const Polynomial& den = r.den;
  if (den.degree() < p) fail(ErrorKind::InvalidArgument, "partial_fractions: denominator degree below pole order");

  const double den_scale = den.norm1();
  for (int i = 0; i < p; ++i)
    if (std::abs(den[i]) > 1e-14 * den_scale)
      fail(ErrorKind::InvalidArgument, "partial_fractions: denominator lacks the declared zero pole");
  if (p > 0 && std::abs(den[p]) <= 1e-14 * den_scale)
    fail(ErrorKind::RepeatedRoots, "partial_fractions: zero pole has higher order than declared");

  // Near-zero coefficients below the declared order are treated as part of the pole.
  const Polynomial reduced_den = shift_down(den, p);

  std::vector<cd> den_roots;
  if (reduced_den.degree() >= 1) {
    const RootSet rs = poly_roots(reduced_den);
    for (int m : rs.multiplicities)
      if (m > 1) fail(ErrorKind::RepeatedRoots, "partial_fractions: denominator has a repeated root");
    den_roots = expand(rs);
  }

  // Cancel common factors before taking residues.
  if (num.degree() >= 1 && !num.is_zero()) {
    std::vector<cd> num_roots = expand(poly_roots(num));
    std::vector<cd> all_den(static_cast<std::size_t>(p), cd(0.0));
    all_den.insert(all_den.end(), den_roots.begin(), den_roots.end());
    std::vector<cd> cancelled;
    for (auto it = num_roots.begin(); it != num_roots.end();) {
      auto match = std::find_if(all_den.begin(), all_den.end(), [&](cd d) {
        return std::abs(d - *it) <= options.gcd_tol * std::max(1.0, std::abs(d));
      });
      if (match != all_den.end()) {
        cancelled.push_back(*match);
        all_den.erase(match);
        it = num_roots.erase(it);
      } else {
        ++it;
      }
    }
    if (!cancelled.empty()) {
      const int new_p = static_cast<int>(std::count(all_den.begin(), all_den.end(), cd(0.0)));
      const Polynomial new_num = real_part(ComplexPolynomial::from_roots(num_roots, cd(num.leading())));
      const Polynomial new_den = real_part(ComplexPolynomial::from_roots(all_den, cd(den.leading())));
      PartialFractionForm form = partial_fractions(RationalFunction(new_num, new_den), new_p, options);
      form.cancelled_roots.insert(form.cancelled_roots.end(), cancelled.begin(), cancelled.end());
      return form;
    }
  }

  for (std::size_t i = 0; i < den_roots.size(); ++i) {
    const double mag = std::max(1.0, std::abs(den_roots[i]));
    if (p > 0 && std::abs(den_roots[i]) <= options.separation_tol * mag)
      fail(ErrorKind::RepeatedRoots, "partial_fractions: root collides with the zero pole");
    for (std::size_t j = i + 1; j < den_roots.size(); ++j)
      if (std::abs(den_roots[i] - den_roots[j]) <= options.separation_tol * mag)
        fail(ErrorKind::RepeatedRoots, "partial_fractions: denominator roots are not separated");
  }

  PartialFractionForm form;
  form.kind = FormKind::Integrand;
  form.poly_part = poly_divide(num, den).first;

  const Polynomial dden = den.derivative();
  for (const cd& rho : den_roots) form.log_terms.push_back({-rho, num(rho) / dden(rho)});

  if (p > 0) {
    // Principal part at the origin from the Taylor coefficients of num/D.
    TaylorSeries<double> ts_num(p - 1), ts_den(p - 1);
    for (int k = 0; k < p; ++k) {
      ts_num[k] = num[k];
      ts_den[k] = reduced_den[k];
    }
    const TaylorSeries<double> e = ts_num / ts_den;
    for (int j = 1; j <= p; ++j) {
      const double d = e[p - j];
      if (j == 1)
        form.log_terms.push_back({cd(0.0), cd(d)});
      else if (d != 0.0)
        form.pole_terms.push_back({j, d});
    }
  }

  realify_weights(form.log_terms);
  std::sort(form.log_terms.begin(), form.log_terms.end(), [](const LogTerm& a, const LogTerm& b) {
    return a.offset.real() != b.offset.real() ? a.offset.real() < b.offset.real() : a.offset.imag() < b.offset.imag();
  });
  return form;
}

PartialFractionForm integrate(const PartialFractionForm& integrand) {
  if (integrand.kind != FormKind::Integrand) fail(ErrorKind::InvalidArgument, "integrate: form is already an antiderivative");
  PartialFractionForm out;
  out.kind = FormKind::Antiderivative;
  out.poly_part = integrand.poly_part.integral();
  out.log_terms = integrand.log_terms;
  out.cancelled_roots = integrand.cancelled_roots;
  for (const PoleTerm& t : integrand.pole_terms) out.pole_terms.push_back({t.order - 1, -t.coeff / (t.order - 1)});
  return out;
}

PartialFractionForm antiderivative_logform(const RationalFunction& r, int pole_at_zero_order,
                                           const PartialFractionOptions& options) {
  return integrate(partial_fractions(r, pole_at_zero_order, options));
}

std::complex<double> evaluate_integrand(const PartialFractionForm& form, std::complex<double> y) {
  if (form.kind == FormKind::Integrand) {
    cd acc = form.poly_part(y);
    for (const LogTerm& t : form.log_terms) acc += t.weight / (y + t.offset);
    for (const PoleTerm& t : form.pole_terms) acc += t.coeff / std::pow(y, t.order);
    return acc;
  }
  cd acc = form.poly_part.derivative()(y);
  for (const LogTerm& t : form.log_terms) acc += t.weight / (y + t.offset);
  for (const PoleTerm& t : form.pole_terms) acc -= static_cast<double>(t.order) * t.coeff / std::pow(y, t.order + 1);
  return acc;
}

double evaluate_integrand(const PartialFractionForm& form, double y) {
  return evaluate_integrand(form, cd(y)).real();
}

std::complex<double> evaluate_antiderivative(const PartialFractionForm& form, std::complex<double> y) {
  if (form.kind != FormKind::Antiderivative)
    fail(ErrorKind::InvalidArgument, "evaluate_antiderivative: form is an integrand");
  cd acc = form.poly_part(y);
  for (const LogTerm& t : form.log_terms) acc += t.weight * std::log(y + t.offset);
  for (const PoleTerm& t : form.pole_terms) acc += t.coeff / std::pow(y, t.order);
  return acc;
}

double evaluate_antiderivative(const PartialFractionForm& form, double y) {
  if (form.kind != FormKind::Antiderivative)
    fail(ErrorKind::InvalidArgument, "evaluate_antiderivative: form is an integrand");
  double acc = form.poly_part(y);
  for (const LogTerm& t : form.log_terms) {
    if (is_real(t.offset))
      acc += t.weight.real() * std::log(std::abs(y + t.offset.real()));
    else
      acc += (t.weight * std::log(cd(y) + t.offset)).real();
  }
  for (const PoleTerm& t : form.pole_terms) acc += t.coeff / std::pow(y, t.order);
  return acc;
}

std::vector<double> real_singularities(const PartialFractionForm& form) {
  std::vector<double> s;
  for (const LogTerm& t : form.log_terms)
    if (is_real(t.offset)) s.push_back(-t.offset.real());
  if (!form.pole_terms.empty()) s.push_back(0.0);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace rgflow

#pragma once

#include <complex>
#include <vector>

#include "rgflow/polynomial.hpp"

namespace rgflow {

/// weight / (y + offset) in an integrand, weight * ln(y + offset) in an
/// antiderivative. The pole sits at y = -offset.
struct LogTerm {
  std::complex<double> offset;
  std::complex<double> weight;
};

/// coeff / y^order. Integrand forms carry orders >= 2 (the order-1 term is a
/// LogTerm at offset 0); antiderivative forms carry orders >= 1.
struct PoleTerm {
  int order;
  double coeff;
};

enum class FormKind { Integrand, Antiderivative };

/// Decomposition of a real rational function (or of its antiderivative) into
/// a polynomial part, simple-pole / logarithmic terms and a principal part at
/// the origin. Integration constants are never represented.
struct PartialFractionForm {
  FormKind kind = FormKind::Integrand;
  Polynomial poly_part;
  std::vector<LogTerm> log_terms;
  std::vector<PoleTerm> pole_terms;
  /// Roots removed from numerator and denominator as a common factor.
  std::vector<std::complex<double>> cancelled_roots;

  double total_log_weight() const;
};

struct PartialFractionOptions {
  /// Minimum root separation relative to max(1, |root|).
  double separation_tol = 1e-8;
  /// Numerator/denominator roots closer than this are cancelled.
  double gcd_tol = 1e-10;
};

/// Residue (cover-up) decomposition of r. The denominator must carry a zero
/// root of exactly the given multiplicity; its other roots must be simple.
PartialFractionForm partial_fractions(const RationalFunction& r, int pole_at_zero_order,
                                      const PartialFractionOptions& options = {});

/// Antiderivative of r in log form: integrated polynomial part, the same log
/// weights as the residues, and coeff/y^j terms from the principal part at 0.
PartialFractionForm antiderivative_logform(const RationalFunction& r, int pole_at_zero_order,
                                           const PartialFractionOptions& options = {});

/// Turns an integrand decomposition into its antiderivative.
PartialFractionForm integrate(const PartialFractionForm& integrand);

/// Recombined integrand value; valid for either kind (an antiderivative form
/// is differentiated term by term).
std::complex<double> evaluate_integrand(const PartialFractionForm& form, std::complex<double> y);
double evaluate_integrand(const PartialFractionForm& form, double y);

/// Antiderivative with principal-branch logarithms.
std::complex<double> evaluate_antiderivative(const PartialFractionForm& form, std::complex<double> y);

/// Real antiderivative on the real axis: ln|y + a| for real offsets and
/// 2 Re(w ln(y + a)) for conjugate pairs.
double evaluate_antiderivative(const PartialFractionForm& form, double y);

/// Real points where the form is singular (real offsets, and 0 when pole
/// terms are present), sorted ascending.
std::vector<double> real_singularities(const PartialFractionForm& form);

}  // namespace rgflow

#include "rgflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rgflow {

namespace {

// Dormand-Prince 5(4) tableau; the flow is autonomous so the nodes are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class FlowIntegrator {
 public:
  FlowIntegrator(const FlowModel& model, const OdeSettings& settings) : model_(model), settings_(settings) {}

  double rhs(double x) const {
    const double v = model_.rhs(x);
    if (!std::isfinite(v)) fail(ErrorKind::PoleEncountered, "ode_run: flow is singular at x = " + std::to_string(x));
    return v;
  }

  // Advances (t, x) to t_end exactly; the last step is clamped onto t_end.
  void advance(double& t, double& x, double t_end) {
    const double dir = t_end >= t ? 1.0 : -1.0;
    if (h_ == 0.0 || h_ * dir < 0.0) h_ = dir * std::min(0.01, std::abs(t_end - t));
    double k1 = rhs(x);
    while ((t_end - t) * dir > 0.0) {
      if (++steps_ > settings_.max_steps) fail(ErrorKind::StiffnessBudget, "ode_run: step budget exhausted");
      bool last = false;
      double h = h_;
      if ((t + h - t_end) * dir >= 0.0) {
        h = t_end - t;
        last = true;
      }
      const double k2 = rhs(x + h * a21 * k1);
      const double k3 = rhs(x + h * (a31 * k1 + a32 * k2));
      const double k4 = rhs(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const double k5 = rhs(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const double k6 = rhs(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const double x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double k7 = rhs(x_new);
      const double err_abs = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
      const double scale = settings_.abs_tol + settings_.rel_tol * std::max(std::abs(x), std::abs(x_new));
      const double err = err_abs / scale;

      if (!std::isfinite(x_new) || std::abs(x_new) > 1e12)
        fail(ErrorKind::PoleEncountered, "ode_run: coupling diverges near t = " + std::to_string(t));

      if (err <= 1.0) {
        t = last ? t_end : t + h;
        x = x_new;
        k1 = k7;
        // PI controller.
        double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.17) * std::pow(err_prev_, 0.04);
        factor = std::clamp(factor, 0.2, 5.0);
        err_prev_ = std::max(err, 1e-4);
        if (!last) h_ = h * factor;
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
      if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(t)))
        fail(ErrorKind::PoleEncountered, "ode_run: step size collapsed near t = " + std::to_string(t));
    }
  }

 private:
  const FlowModel& model_;
  OdeSettings settings_;
  double h_ = 0.0;
  double err_prev_ = 1e-4;
  long steps_ = 0;
};

}  // namespace

std::vector<double> ode_run(const FlowModel& model, double mu0_sq, double x0, const std::vector<double>& mu_sq_targets,
                            const OdeSettings& settings) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) fail(ErrorKind::InvalidArgument, "ode_run: x0 must be positive");
  if (!(mu0_sq > 0.0)) fail(ErrorKind::InvalidArgument, "ode_run: mu0_sq must be positive");
  if (!(settings.rel_tol > 0.0) || !(settings.abs_tol > 0.0) || settings.max_steps < 1)
    fail(ErrorKind::InvalidArgument, "ode_run: invalid settings");
  for (double m : mu_sq_targets)
    if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorKind::InvalidArgument, "ode_run: targets must be positive");

  const double t0 = std::log(mu0_sq);
  std::vector<double> out(mu_sq_targets.size(), x0);
  std::vector<std::size_t> order(mu_sq_targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return mu_sq_targets[i] < mu_sq_targets[j]; });

  // Upward sweep over targets above mu0, downward sweep over those below.
  {
    FlowIntegrator up(model, settings);
    double t = t0, x = x0;
    for (std::size_t idx : order) {
      if (mu_sq_targets[idx] <= mu0_sq) continue;
      up.advance(t, x, std::log(mu_sq_targets[idx]));
      out[idx] = x;
    }
  }
  {
    FlowIntegrator down(model, settings);
    double t = t0, x = x0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (mu_sq_targets[*it] >= mu0_sq) continue;
      down.advance(t, x, std::log(mu_sq_targets[*it]));
      out[*it] = x;
    }
  }
  return out;
}

double safeguarded_newton(const std::function<double(double)>& f, const std::function<double(double)>& df, double lo,
                          double hi, double ftol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) fail(ErrorKind::NoBracket, "safeguarded_newton: no sign change in bracket");
  if (flo > 0.0) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  // Invariant: f(lo) < 0 < f(hi); lo may exceed hi.
  double x = 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  double fx = f(x);
  double best = x, fbest = std::abs(fx);
  for (int iter = 0; iter < 400; ++iter) {
    if (std::abs(fx) <= ftol) return x;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    const double d = df(x);
    const bool newton_leaves = !std::isfinite(d) || d == 0.0 || ((x - hi) * d - fx) * ((x - lo) * d - fx) > 0.0;
    const bool too_slow = std::abs(2.0 * fx) > std::abs(dx_old * d);
    dx_old = dx;
    if (newton_leaves || too_slow) {
      dx = 0.5 * (hi - lo);
      x = lo + dx;
    } else {
      dx = fx / d;
      x -= dx;
    }
    if (std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
      break;
    fx = f(x);
    if (std::abs(fx) < fbest) {
      best = x;
      fbest = std::abs(fx);
    }
  }
  return best;
}

RootSolveResult root_solve(const PartialFractionForm& logform, double target, Interval bracket_hint) {
  if (logform.kind != FormKind::Antiderivative) fail(ErrorKind::InvalidArgument, "root_solve: expects an antiderivative form");
  double lo = std::min(bracket_hint.lo, bracket_hint.hi);
  double hi = std::max(bracket_hint.lo, bracket_hint.hi);
  if (!std::isfinite(lo) || !std::isfinite(hi)) fail(ErrorKind::InvalidArgument, "root_solve: non-finite hint");

  auto f = [&](double y) { return evaluate_antiderivative(logform, y) - target; };
  auto df = [&](double y) { return evaluate_integrand(logform, y); };

  // The segment between neighbouring singularities that holds the hint.
  const double mid0 = 0.5 * (lo + hi);
  double seg_lo = -INFINITY, seg_hi = INFINITY;
  for (double s : real_singularities(logform)) {
    if (s <= mid0) seg_lo = s;
    if (s > mid0 && seg_hi == INFINITY) seg_hi = s;
  }
  auto guard = [](double s) { return 1e-12 * std::max(1.0, std::abs(s)); };
  const double floor_y = std::isinf(seg_lo) ? seg_lo : seg_lo + guard(seg_lo);
  const double ceil_y = std::isinf(seg_hi) ? seg_hi : seg_hi - guard(seg_hi);
  lo = std::max(lo, floor_y);
  hi = std::min(hi, ceil_y);
  if (!(hi > lo)) fail(ErrorKind::InvalidArgument, "root_solve: hint lies on a singularity");
  const double mid = 0.5 * (lo + hi);

  RootSolveResult result;
  constexpr int kSamples = 256;
  std::vector<double> ys, fs;
  for (int attempt = 0;; ++attempt) {
    const double grow = std::min(1000.0, std::ldexp(1.0, attempt));
    const double cur_lo = std::max(floor_y, mid - (mid - lo) * grow);
    const double cur_hi = std::min(ceil_y, mid + (hi - mid) * grow);
    ys.clear();
    fs.clear();
    for (int i = 0; i <= kSamples; ++i) {
      const double y = cur_lo + (cur_hi - cur_lo) * i / kSamples;
      ys.push_back(y);
      fs.push_back(f(y));
    }
    for (int i = 0; i < kSamples; ++i) {
      const double fa = fs[static_cast<std::size_t>(i)], fb = fs[static_cast<std::size_t>(i + 1)];
      if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
      if (fa == 0.0) {
        result.roots.push_back(ys[static_cast<std::size_t>(i)]);
      } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
        result.roots.push_back(safeguarded_newton(f, df, ys[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i + 1)],
                                                  1e-12 * std::max(1.0, std::abs(target))));
      }
    }
    if (fs.back() == 0.0) result.roots.push_back(ys.back());
    if (!result.roots.empty()) break;
    if (grow >= 1000.0) break;
  }
  if (result.roots.empty()) fail(ErrorKind::NoBracket, "root_solve: no sign change within 1e3 times the hint");

  int sign_changes = 0;
  double prev = 0.0;
  for (double y : ys) {
    const double d = df(y);
    if (d != 0.0 && std::isfinite(d)) {
      if (prev != 0.0 && (d > 0.0) != (prev > 0.0)) ++sign_changes;
      prev = d;
    }
  }
  if (sign_changes > 0 || result.roots.size() > 1) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "MultiRoot: integrand changes sign in the bracket; roots";
    for (double r : result.roots) msg << ' ' << r;
    result.warnings.push_back(msg.str());
  }
  result.y = *std::min_element(result.roots.begin(), result.roots.end(),
                               [&](double p, double q) { return std::abs(p - mid) < std::abs(q - mid); });
  const double residual = std::abs(f(result.y));
  if (residual > 1e-12 * std::max(1.0, std::abs(target))) {
    std::ostringstream msg;
    msg << "residual " << residual << " above tolerance at rounding limit";
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace rgflow

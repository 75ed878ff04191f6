#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "varalg/errors.hpp"

namespace varalg {

// One component f_k of the nonlinearity, with optional closed-form primitive
// F_k(t) = int_0^t f_k(s) ds and derivative f_k'. Evaluation is pure and
// reentrant; instances are immutable and shareable.
struct ScalarFunction {
  std::function<double(double)> eval;
  std::function<double(double)> primitive;   // empty -> quadrature
  std::function<double(double)> derivative;  // empty -> finite differences
  std::string label;
  std::vector<double> kinks;  // known non-smooth points, ascending
};

// Componentwise nonlinearity f(u) = (f_1(u_1), ..., f_n(u_n))^t.
struct Nonlinearity {
  std::vector<ScalarFunction> components;
  int size() const { return static_cast<int>(components.size()); }
};

// F_k(t) by closed form when present, else adaptive Simpson on [0, t]
// (absolute tolerance 1e-10, at most 2^20 panel splits). Known kinks inside
// the range split the integration. Throws QuadratureBudgetExceeded.
double primitive_value(const ScalarFunction& f, double t);

// f_k'(s) by closed form when present, else central differences with
// h = max(1e-6, 1e-6 |s|); near a known kink the stencil is one-sided, away
// from the kink. Divergent or non-finite results return nullopt (the
// LargeDerivative sentinel); callers without a derivative fall back to
// gradient descent.
std::optional<double> derivative_value(const ScalarFunction& f, double s);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

// Sampling diagnostics for the growth hypotheses. Never proofs: limits cannot
// be decided by finitely many samples, so each check is three-valued with
// explicit margins (pass below 1e-3, fail above 1e-1; a strictly decreasing
// tail below the fail margin also passes, which covers logarithmic decay).
// An inconclusive verdict never blocks downstream computation.
struct HypothesisVerdict {
  Verdict h1;  // f_k(s)/s -> 0 as |s| -> inf
  std::vector<double> h1_decade_max;

  Verdict h1_star;  // |f_k(s)| <= c |s|^q with q in (0,1)
  double q = 0.0;   // fitted log-log slope over the top decades
  double c = 0.0;   // observed bound constant for the fitted q

  Verdict h2;  // exists nu0 > 1 with f_k(s)/|s|^{nu0} -> 0 as s -> 0
  std::vector<std::pair<double, Verdict>> h2_by_nu;

  Verdict h2_prime;  // f_k(s)/s -> 0 as s -> 0
  std::vector<double> h2_prime_decade_max;

  Verdict g3;  // limsup F_k(xi)/xi^2 < lambda_1/2
  double g3_limsup_estimate = 0.0;
  double g3_bound = 0.0;  // lambda_1 / 2
};

// Probes the hypotheses on a signed log grid |s| in [1e-8, 1e8], 64 points
// per decade. lambda1 > 0 feeds only the g3 comparison.
HypothesisVerdict probe_hypotheses(const Nonlinearity& F, double lambda1);

// Built-in nonlinearity families. Names:
//   ex37_sqrt        g_k(s) = k sqrt(s-2) for s >= 2, else 0
//   ex41_log         branchwise -i s^2 / i s/log(s) / i/e  (see below)
//   ex42_logistic_log  a(s) = log(1+s^2) for s > 0, else 0
//   power            f(s) = sign(s) |s|^q  (params: q; positive=1 truncates)
//   rational_sq      f(s) = s^2/(1+s^2)
//   custom_expr      params expr / expr_1..expr_n parsed by exprfn
// params always accept "n" (component count).
//
// ex41_log reproduces its displayed source, which is singular at s = 1; the
// implementation bridges u in [1-1e-6, 1+1e-6] by linear interpolation
// between the branch limits and the entry is flagged non-validated in its
// label. Its third branch (constant i/e) is discontinuous at s = e^i.
Nonlinearity catalog_make(const std::string& name,
                          const std::map<std::string, double>& params);

// custom_expr via explicit per-component expression strings.
Nonlinearity catalog_make_expr(const std::vector<std::string>& expressions);

}  // namespace varalg

#include "varalg/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varalg/exprfn.hpp"

namespace varalg {

namespace {

constexpr long kMaxSplits = 1L << 20;

struct QuadState {
  long splits = 0;
};

double simpson(double h, double fa, double fm, double fb) {
  return (fa + 4.0 * fm + fb) * (h / 6.0);
}

double adapt(const std::function<double(double)>& f, double a, double m,
             double b, double fa, double fm, double fb, double whole,
             double tol, int depth, QuadState& st) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(m - a, fa, flm, fm);
  const double right = simpson(b - m, fm, frm, fb);
  const double delta = left + right - whole;
  // Second condition: the requested tolerance sits below the roundoff floor
  // of the values involved; refining further only chases noise.
  if (std::abs(delta) <= 15.0 * tol || depth > 48 ||
      std::abs(delta) <=
          4e-16 * (std::abs(left) + std::abs(right) + std::abs(whole)))
    return left + right + delta / 15.0;
  st.splits += 2;
  if (st.splits > kMaxSplits)
    throw QuadratureBudgetExceeded(
        "adaptive quadrature exceeded 2^20 subdivisions (pathological "
        "integrand?)");
  return adapt(f, a, lm, m, fa, flm, fm, left, tol, depth + 1, st) +
         adapt(f, m, rm, b, fm, frm, fb, right, tol, depth + 1, st);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, QuadState& st) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  return adapt(f, a, m, b, fa, fm, fb, simpson(b - a, fa, fm, fb), tol, 0, st);
}

// Signed integral of f.eval over [a, b], split at known kinks so the
// adaptive rule only ever sees smooth pieces.
double integrate_split(const ScalarFunction& f, double a, double b, double tol,
                       QuadState& st) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double k : f.kinks)
    if (k > lo && k < hi) cuts.push_back(k);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  const double per = tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(f.eval, cuts[i], cuts[i + 1], per, st);
  return a <= b ? total : -total;
}

double quadrature_primitive(const ScalarFunction& f, double t) {
  QuadState st;
  return integrate_split(f, 0.0, t, 1e-10, st);
}

}  // namespace

double primitive_value(const ScalarFunction& f, double t) {
  if (f.primitive) return f.primitive(t);
  if (t == 0.0) return 0.0;
  return quadrature_primitive(f, t);
}

std::optional<double> derivative_value(const ScalarFunction& f, double s) {
  if (f.derivative) {
    const double v = f.derivative(s);
    if (std::isfinite(v)) return v;
    return std::nullopt;
  }

  const double h = std::max(1e-6, 1e-6 * std::abs(s));

  double nearest = std::numeric_limits<double>::infinity();
  for (double k : f.kinks) nearest = std::min(nearest, std::abs(s - k));
  const bool near_kink = nearest <= 2.0 * h;
  // One-sided, pointing away from the kink; second-order stencil.
  const double dir = [&] {
    if (!near_kink) return 0.0;
    double best = f.kinks.front();
    for (double k : f.kinks)
      if (std::abs(s - k) < std::abs(s - best)) best = k;
    return s >= best ? 1.0 : -1.0;
  }();

  auto estimate = [&](double hh) {
    if (near_kink) {
      const double d = dir * hh;
      return (-3.0 * f.eval(s) + 4.0 * f.eval(s + d) - f.eval(s + 2.0 * d)) /
             (2.0 * d);
    }
    return (f.eval(s + hh) - f.eval(s - hh)) / (2.0 * hh);
  };

  const double d1 = estimate(h);
  const double d2 = estimate(0.5 * h);
  if (!std::isfinite(d1) || !std::isfinite(d2)) return std::nullopt;
  // Halving h should barely move a convergent estimate; a large shift on a
  // large value signals an unbounded one-sided derivative.
  if (std::abs(d2) > 1e3 && std::abs(d2 - d1) > 0.25 * (1.0 + std::abs(d2)))
    return std::nullopt;
  return d2;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr int kDecades = 16;        // |s| in [1e-8, 1e8)
constexpr int kPerDecade = 64;
constexpr int kMinExp = -8;

struct DecadeStats {
  // max of the probed ratio per decade, index 0 = smallest |s|
  std::array<double, kDecades> max{};
  bool finite = true;
  DecadeStats() { max.fill(0.0); }

  void record(int decade, double value) {
    if (!std::isfinite(value)) {
      finite = false;
      return;
    }
    max[decade] = std::max(max[decade], value);
  }
};

// pass < 1e-3, fail > 1e-1, else inconclusive; a strictly decreasing tail
// below the fail margin also passes (covers logarithmic decay toward 0).
Verdict margin_verdict(const DecadeStats& st, bool toward_zero) {
  if (!st.finite) return Verdict::inconclusive;
  double a, b, c;  // c is the decade closest to the limit
  if (toward_zero) {
    a = st.max[2];
    b = st.max[1];
    c = st.max[0];
  } else {
    a = st.max[kDecades - 3];
    b = st.max[kDecades - 2];
    c = st.max[kDecades - 1];
  }
  const double tail = std::max(b, c);
  if (tail > 1e-1) return Verdict::fail;
  const bool nonincreasing = a >= b && b >= c;
  const bool strictly_decreasing = a > b && b > c;
  if (tail < 1e-3 && nonincreasing) return Verdict::pass;
  if (strictly_decreasing) return Verdict::pass;
  return Verdict::inconclusive;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive)
    return Verdict::inconclusive;
  return Verdict::pass;
}

}  // namespace

HypothesisVerdict probe_hypotheses(const Nonlinearity& F, double lambda1) {
  if (lambda1 <= 0.0) throw BadParams("probe_hypotheses: lambda1 must be > 0");

  const int total = kDecades * kPerDecade;
  std::vector<double> mag(total);
  for (int i = 0; i < total; ++i)
    mag[i] = std::pow(10.0, kMinExp + static_cast<double>(i) / kPerDecade);

  const std::array<double, 4> nus = {1.1, 1.5, 2.0, 3.0};

  HypothesisVerdict out;
  out.g3_bound = 0.5 * lambda1;
  out.h1 = Verdict::pass;
  out.h2_prime = Verdict::pass;
  out.h1_star = Verdict::pass;
  out.g3 = Verdict::pass;
  std::array<Verdict, 4> h2_nu;
  h2_nu.fill(Verdict::pass);

  DecadeStats agg_h1, agg_h2p;
  double q_fit = 0.0, c_fit = 0.0;
  bool any_fit = false;
  double g3_max = 0.0;

  for (const ScalarFunction& f : F.components) {
    DecadeStats st_h1, st_h2p;
    std::array<DecadeStats, 4> st_nu;
    std::vector<std::pair<double, double>> loglog;  // top 3 decades, |f| > 0
    double comp_g3 = 0.0;
    bool g3_finite = true;

    for (int sign = -1; sign <= 1; sign += 2) {
      // Cumulative primitive along the ray when no closed form is present.
      double Facc = 0.0;
      double prev = 0.0;
      for (int i = 0; i < total; ++i) {
        const double s = sign * mag[i];
        const int dec = i / kPerDecade;
        const double fv = f.eval(s);
        st_h1.record(dec, std::abs(fv / s));
        st_h2p.record(dec, std::abs(fv / s));
        for (std::size_t v = 0; v < nus.size(); ++v)
          st_nu[v].record(dec, std::abs(fv) / std::pow(mag[i], nus[v]));
        if (dec >= kDecades - 3 && std::abs(fv) > 0.0 && std::isfinite(fv))
          loglog.emplace_back(std::log(mag[i]), std::log(std::abs(fv)));

        double Fv = 0.0;
        if (!f.primitive) {
          QuadState qst;
          Facc += integrate_split(f, prev, s, 1e-10 * (1.0 + mag[i]), qst);
          prev = s;
          Fv = Facc;
        }
        if (dec >= kDecades - 2) {
          if (f.primitive) Fv = f.primitive(s);
          const double r = Fv / (s * s);
          if (!std::isfinite(r))
            g3_finite = false;
          else
            comp_g3 = std::max(comp_g3, r);
        }
      }
    }

    out.h1 = combine(out.h1, margin_verdict(st_h1, false));
    out.h2_prime = combine(out.h2_prime, margin_verdict(st_h2p, true));
    for (std::size_t v = 0; v < nus.size(); ++v)
      h2_nu[v] = combine(h2_nu[v], margin_verdict(st_nu[v], true));

    for (int d = 0; d < kDecades; ++d) {
      agg_h1.max[d] = std::max(agg_h1.max[d], st_h1.max[d]);
      agg_h2p.max[d] = std::max(agg_h2p.max[d], st_h2p.max[d]);
    }

    if (loglog.size() >= 8) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto& [x, y] : loglog) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double m = static_cast<double>(loglog.size());
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      q_fit = any_fit ? std::max(q_fit, slope) : slope;
      any_fit = true;
    }

    if (!g3_finite) out.g3 = combine(out.g3, Verdict::inconclusive);
    g3_max = std::max(g3_max, comp_g3);
  }

  // h1*: slope of the worst component; bound constant from the whole grid.
  if (!any_fit) {
    out.q = 0.5;  // all components vanish on the fit range
    out.c = 0.0;
    out.h1_star = Verdict::pass;
  } else {
    out.q = q_fit;
    for (const ScalarFunction& f : F.components)
      for (int sign = -1; sign <= 1; sign += 2)
        for (int i = 0; i < total; i += 4) {
          const double s = sign * mag[i];
          const double r = std::abs(f.eval(s)) / std::pow(mag[i], q_fit);
          if (std::isfinite(r)) c_fit = std::max(c_fit, r);
        }
    out.c = c_fit;
    out.h1_star = q_fit <= 0.95 ? Verdict::pass
                : q_fit >= 1.05 ? Verdict::fail
                                : Verdict::inconclusive;
  }

  out.h1_decade_max.assign(agg_h1.max.begin(), agg_h1.max.end());
  out.h2_prime_decade_max.assign(agg_h2p.max.begin(), agg_h2p.max.end());

  bool any_pass = false, all_fail = true;
  for (std::size_t v = 0; v < nus.size(); ++v) {
    out.h2_by_nu.emplace_back(nus[v], h2_nu[v]);
    if (h2_nu[v] == Verdict::pass) any_pass = true;
    if (h2_nu[v] != Verdict::fail) all_fail = false;
  }
  out.h2 = any_pass ? Verdict::pass
         : all_fail ? Verdict::fail
                    : Verdict::inconclusive;

  out.g3_limsup_estimate = g3_max;
  if (out.g3 == Verdict::pass) {
    out.g3 = g3_max < 0.9 * out.g3_bound   ? Verdict::pass
           : g3_max > 1.1 * out.g3_bound ? Verdict::fail
                                         : Verdict::inconclusive;
  }
  return out;
}

namespace {

int param_n(const std::map<std::string, double>& params) {
  auto it = params.find("n");
  if (it == params.end()) return 1;
  const double v = it->second;
  if (v < 1 || v != std::floor(v) || v > 1e6)
    throw BadParams("catalog_make: n must be a positive integer");
  return static_cast<int>(v);
}

ScalarFunction make_ex37(int k) {
  const double kk = k;
  ScalarFunction f;
  f.eval = [kk](double s) { return s >= 2.0 ? kk * std::sqrt(s - 2.0) : 0.0; };
  f.primitive = [kk](double t) {
    return t >= 2.0 ? (2.0 * kk / 3.0) * std::pow(t - 2.0, 1.5) : 0.0;
  };
  f.derivative = [kk](double s) {
    if (s > 2.0) return kk / (2.0 * std::sqrt(s - 2.0));
    if (s == 2.0) return std::numeric_limits<double>::quiet_NaN();
    return 0.0;
  };
  f.label = "ex37_sqrt[k=" + std::to_string(k) + "]";
  f.kinks = {2.0};
  return f;
}

ScalarFunction make_ex41(int i) {
  const double ii = i;
  const double cap = std::exp(ii);       // branch switch at e^i
  const double g = 1e-6;                 // guard half-width around s = 1
  const double vlo = ii * (1.0 - g) / std::log(1.0 - g);
  const double vhi = ii * (1.0 + g) / std::log(1.0 + g);
  ScalarFunction f;
  f.eval = [=](double s) {
    if (s <= 0.0) return -ii * s * s;
    if (s > cap) return ii / std::exp(1.0);
    if (s > 1.0 - g && s < 1.0 + g)
      return vlo + (s - (1.0 - g)) / (2.0 * g) * (vhi - vlo);
    return ii * s / std::log(s);
  };
  f.derivative = [=](double s) {
    if (s < 0.0) return -2.0 * ii * s;
    if (s == 0.0) return 0.0;
    if (s > cap) return 0.0;
    if (s == cap) return std::numeric_limits<double>::quiet_NaN();  // jump
    if (s > 1.0 - g && s < 1.0 + g) return (vhi - vlo) / (2.0 * g);
    const double l = std::log(s);
    return ii * (l - 1.0) / (l * l);
  };
  f.label = "ex41_log[i=" + std::to_string(i) + "] (non-validated: displayed "
            "source is singular at s=1, bridged on [1-1e-6, 1+1e-6])";
  f.kinks = {0.0, 1.0 - g, 1.0 + g, cap};
  return f;
}

ScalarFunction make_ex42() {
  ScalarFunction f;
  f.eval = [](double s) { return s > 0.0 ? std::log1p(s * s) : 0.0; };
  f.primitive = [](double t) {
    return t > 0.0 ? t * std::log1p(t * t) - 2.0 * t + 2.0 * std::atan(t) : 0.0;
  };
  f.derivative = [](double s) {
    return s > 0.0 ? 2.0 * s / (1.0 + s * s) : 0.0;
  };
  f.label = "ex42_logistic_log";
  f.kinks = {0.0};
  return f;
}

ScalarFunction make_power(double q, bool positive_part) {
  ScalarFunction f;
  if (positive_part) {
    f.eval = [q](double s) { return s > 0.0 ? std::pow(s, q) : 0.0; };
    f.primitive = [q](double t) {
      return t > 0.0 ? std::pow(t, q + 1.0) / (q + 1.0) : 0.0;
    };
    f.derivative = [q](double s) {
      if (s > 0.0) return q * std::pow(s, q - 1.0);
      if (s == 0.0 && q < 1.0) return std::numeric_limits<double>::quiet_NaN();
      return 0.0;
    };
    f.label = "power[q=" + std::to_string(q) + ",positive]";
  } else {
    f.eval = [q](double s) {
      return s == 0.0 ? 0.0 : (s > 0 ? 1.0 : -1.0) * std::pow(std::abs(s), q);
    };
    f.primitive = [q](double t) {
      return std::pow(std::abs(t), q + 1.0) / (q + 1.0);
    };
    f.derivative = [q](double s) {
      if (s == 0.0) {
        if (q == 1.0) return 1.0;
        if (q > 1.0) return 0.0;
        return std::numeric_limits<double>::quiet_NaN();
      }
      return q * std::pow(std::abs(s), q - 1.0);
    };
    f.label = "power[q=" + std::to_string(q) + "]";
  }
  f.kinks = {0.0};
  return f;
}

ScalarFunction make_rational_sq() {
  ScalarFunction f;
  f.eval = [](double s) { return s * s / (1.0 + s * s); };
  f.primitive = [](double t) { return t - std::atan(t); };
  f.derivative = [](double s) {
    const double d = 1.0 + s * s;
    return 2.0 * s / (d * d);
  };
  f.label = "rational_sq";
  return f;
}

void check_total(const ScalarFunction& f) {
  std::vector<double> probes{0.0};
  for (int d = -6; d <= 6; ++d)
    for (int j = 0; j < 8; ++j) {
      const double m = std::pow(10.0, d + j / 8.0);
      probes.push_back(m);
      probes.push_back(-m);
    }
  for (double s : probes)
    if (!std::isfinite(f.eval(s)))
      throw BadParams("expression '" + f.label + "' is non-finite at s = " +
                      std::to_string(s));
}

}  // namespace

Nonlinearity catalog_make(const std::string& name,
                          const std::map<std::string, double>& params) {
  const int n = param_n(params);
  Nonlinearity F;
  F.components.reserve(n);

  if (name == "ex37_sqrt") {
    for (int k = 1; k <= n; ++k) F.components.push_back(make_ex37(k));
  } else if (name == "ex41_log") {
    for (int i = 1; i <= n; ++i) F.components.push_back(make_ex41(i));
  } else if (name == "ex42_logistic_log") {
    for (int k = 0; k < n; ++k) F.components.push_back(make_ex42());
  } else if (name == "power") {
    auto it = params.find("q");
    if (it == params.end() || !(it->second > 0.0))
      throw BadParams("catalog_make: power requires q > 0");
    const bool pos = params.count("positive") && params.at("positive") != 0.0;
    for (int k = 0; k < n; ++k) F.components.push_back(make_power(it->second, pos));
  } else if (name == "rational_sq") {
    for (int k = 0; k < n; ++k) F.components.push_back(make_rational_sq());
  } else if (name == "custom_expr") {
    throw BadParams(
        "catalog_make: custom_expr takes expression strings; use "
        "catalog_make_expr (problem files: \"kind\": \"expr\")");
  } else {
    throw UnknownCatalogName("catalog_make: unknown name '" + name + "'");
  }
  return F;
}

Nonlinearity catalog_make_expr(const std::vector<std::string>& expressions) {
  if (expressions.empty())
    throw BadParams("catalog_make_expr: needs at least one expression");
  Nonlinearity F;
  for (const std::string& src : expressions) {
    ScalarFunction f = compile(parse(src));
    check_total(f);
    F.components.push_back(std::move(f));
  }
  return F;
}

}  // namespace varalg

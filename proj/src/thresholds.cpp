#include "varalg/thresholds.hpp"

#include <algorithm>
#include <cmath>

namespace varalg {

namespace {

double sum_primitives(const Problem& p, double t) {
  double s = 0.0;
  for (const ScalarFunction& f : p.nonlinearity.components)
    s += primitive_value(f, t);
  return s;
}

double rho_of(const Problem& p, double t) {
  return sum_primitives(p, t) / (t * t);
}

// Golden-section maximization of g on [lo, hi] to the given relative width.
template <typename G>
double golden_max(const G& g, double lo, double hi, double rel_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
  for (int it = 0; it < 200 && (b - a) > rel_tol * scale; ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + kInvPhi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - kInvPhi * (b - a);
      g1 = g(x1);
    }
  }
  return g1 >= g2 ? x1 : x2;
}

}  // namespace

RhoMaxResult max_rho(const Problem& problem, const SearchConfig& cfg) {
  const int decades =
      static_cast<int>(std::round(std::log10(cfg.t_max / cfg.t_min)));
  const int per_sign = decades * cfg.points_per_decade + 1;

  // Grid over both signs, ordered ascending in t. F accumulates outward from
  // 0 along each ray so expression-backed primitives stay cheap.
  std::vector<double> ts(2 * per_sign), rhos(2 * per_sign);
  for (int i = 0; i < per_sign; ++i) {
    const double mag =
        cfg.t_min *
        std::pow(10.0, static_cast<double>(i) / cfg.points_per_decade);
    ts[per_sign - 1 - i] = -mag;  // descending ray maps to ascending t
    ts[per_sign + i] = mag;
  }
  long evals = 0;
  for (int sign = 0; sign < 2; ++sign) {
    std::vector<double> acc(problem.n(), 0.0);
    double prev = 0.0;
    for (int i = 0; i < per_sign; ++i) {
      const int idx = sign == 0 ? per_sign - 1 - i : per_sign + i;
      const double t = ts[idx];
      double sum = 0.0;
      for (int k = 0; k < problem.n(); ++k) {
        const ScalarFunction& f = problem.nonlinearity.components[k];
        if (f.primitive) {
          sum += f.primitive(t);
        } else {
          acc[k] += primitive_value(f, t) - primitive_value(f, prev);
          sum += acc[k];
        }
      }
      prev = t;
      rhos[idx] = sum / (t * t);
      ++evals;
    }
  }

  // Local maxima on the grid (per sign; the two rays do not share brackets).
  struct Bracket {
    int index;
    double value;
  };
  std::vector<Bracket> candidates;
  auto is_local_max = [&](int i) {
    const bool left_edge = i == 0 || i == per_sign;
    const bool right_edge = i == per_sign - 1 || i == 2 * per_sign - 1;
    const double v = rhos[i];
    if (!left_edge && rhos[i - 1] > v) return false;
    if (!right_edge && rhos[i + 1] > v) return false;
    return true;
  };
  for (int i = 0; i < 2 * per_sign; ++i)
    if (is_local_max(i)) candidates.push_back({i, rhos[i]});
  std::sort(candidates.begin(), candidates.end(),
            [](const Bracket& a, const Bracket& b) {
              return a.value != b.value ? a.value > b.value : a.index < b.index;
            });

  std::vector<int> chosen;
  for (const Bracket& c : candidates) {
    bool adjacent = false;
    for (int j : chosen)
      if (std::abs(j - c.index) <= 1) adjacent = true;
    if (!adjacent) chosen.push_back(c.index);
    if (chosen.size() == 3) break;
  }

  if (candidates.empty() || !(candidates.front().value > 0.0)) {
    // No positive value anywhere on the grid: refinement cannot rescue a
    // nonpositive supremum of sum_k F_k.
    bool any_positive = false;
    for (double r : rhos)
      if (r > 0.0) any_positive = true;
    if (!any_positive)
      throw NonpositiveSup(
          "max_rho: sup_t sum_k F_k(t) <= 0 on the probed grid; lambda_star "
          "is undefined");
  }

  RhoMaxResult best{};
  best.rho_max = -std::numeric_limits<double>::infinity();
  best.grid_evaluations = evals;
  for (int idx : chosen) {
    const bool same_sign_lo = idx != 0 && idx != per_sign;
    const bool same_sign_hi = idx != per_sign - 1 && idx != 2 * per_sign - 1;
    const double lo = same_sign_lo ? ts[idx - 1] : ts[idx];
    const double hi = same_sign_hi ? ts[idx + 1] : ts[idx];
    double t_best = ts[idx];
    if (lo < hi) {
      const double refined =
          golden_max([&](double t) { return rho_of(problem, t); }, lo, hi,
                     cfg.rel_tol);
      if (rho_of(problem, refined) > rho_of(problem, t_best)) t_best = refined;
    }
    const double value = rho_of(problem, t_best);
    if (value > best.rho_max) {
      best.rho_max = value;
      best.t_star = t_best;
      best.bracket_lo = lo;
      best.bracket_hi = hi;
      best.range_suspect = idx == 0 || idx == per_sign - 1 ||
                           idx == per_sign || idx == 2 * per_sign - 1;
    }
  }

  if (!(best.rho_max > 0.0))
    throw NonpositiveSup(
        "max_rho: refined maximum of sum_k F_k(t)/t^2 is nonpositive; "
        "lambda_star is undefined");
  return best;
}

double lambda_star(const Problem& problem, const RhoMaxResult& rho) {
  return problem.matrix.ones_form() / (2.0 * rho.rho_max);
}

double lambda_star(const Problem& problem) {
  return lambda_star(problem, max_rho(problem));
}

double sublevel_sup_bound(const Problem& problem, double rho) {
  if (!(rho > 0.0)) throw BadParams("sublevel_sup_bound: rho must be > 0");
  const double reach = std::sqrt(2.0 * rho / problem.matrix.lambda_min());

  double total = 0.0;
  constexpr int kScan = 1024;
  for (const ScalarFunction& f : problem.nonlinearity.components) {
    double best_x = 0.0;
    double best = 0.0;  // F(0) = 0 is always admissible
    for (int i = 0; i <= kScan; ++i) {
      const double x = -reach + (2.0 * reach * i) / kScan;
      const double v = primitive_value(f, x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    const double cell = 2.0 * reach / kScan;
    const double lo = std::max(-reach, best_x - cell);
    const double hi = std::min(reach, best_x + cell);
    const double refined = golden_max(
        [&](double x) { return primitive_value(f, x); }, lo, hi, 1e-12);
    total += std::max(best, primitive_value(f, refined));
  }
  return total;
}

RatioScan sublevel_ratio_scan(const Problem& problem, int decades) {
  if (decades < 0) throw BadParams("sublevel_ratio_scan: decades must be >= 0");
  const HypothesisVerdict hv =
      probe_hypotheses(problem.nonlinearity, problem.matrix.lambda_min());
  RatioScan out;
  out.hypothesis_warning =
      hv.h1 == Verdict::fail || hv.h2_prime == Verdict::fail;
  for (int d = 0; d <= decades; ++d) {
    const double rho = std::pow(10.0, -d);
    out.entries.emplace_back(rho, sublevel_sup_bound(problem, rho) / rho);
  }
  return out;
}

AbarResult abar_bound(const Problem& problem, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw BadParams("abar_bound: epsilon must lie in (0, 1)");

  const RhoMaxResult rm = max_rho(problem);
  const double lstar = lambda_star(problem, rm);
  const double rho_cap =
      0.5 * problem.matrix.ones_form() * rm.t_star * rm.t_star;
  const double threshold = epsilon / lstar;

  auto ok = [&](double rho) {
    return sublevel_sup_bound(problem, rho) / rho < threshold;
  };

  double hi = rho_cap * (1.0 - 1e-12);
  double chosen;
  if (ok(hi)) {
    chosen = hi;
  } else {
    double lo = hi;
    int tries = 0;
    do {
      lo *= 0.1;
      if (++tries > 60)
        throw Error(
            "abar_bound: no admissible sublevel radius found; the decay "
            "hypotheses appear to fail for this nonlinearity");
    } while (!ok(lo));
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    chosen = lo;  // largest probed value verified admissible
  }

  const double ratio = sublevel_sup_bound(problem, chosen) / chosen;
  AbarResult res;
  res.abar = (1.0 + epsilon) / (1.0 / lstar - ratio);
  res.epsilon = epsilon;
  res.rho = chosen;
  return res;
}

ThresholdReport three_solution_report(const Problem& problem, double gamma,
                                      double delta, double h) {
  if (!(gamma > 0.0) || !(delta > 0.0))
    throw BadParams("three_solution_report: gamma and delta must be > 0");
  if (!(h > 1.0)) throw BadParams("three_solution_report: h must be > 1");

  const double lambda1 = problem.matrix.lambda_min();
  const double of = problem.matrix.ones_form();

  ThresholdReport rep;
  rep.gamma = gamma;
  rep.delta = delta;
  rep.h = h;
  rep.r = 0.5 * lambda1 * gamma * gamma;
  rep.eta = lambda1 * gamma * gamma /
            (lambda1 * gamma * gamma + of * delta * delta);
  rep.hypothesis_verdicts = probe_hypotheses(problem.nonlinearity, lambda1);

  try {
    rep.lambda_star = lambda_star(problem);
  } catch (const NonpositiveSup&) {
    rep.lambda_star.reset();
  }

  rep.sum_F_delta = sum_primitives(problem, delta);
  rep.sum_max_F_gamma =
      sublevel_sup_bound(problem, 0.5 * lambda1 * gamma * gamma);
  // The sublevel reach at rho = lambda_1 gamma^2 / 2 is exactly gamma, so the
  // bound above is sum_k max_{|xi| <= gamma} F_k(xi).

  rep.g1_margin = delta - std::sqrt(lambda1 / of) * gamma;
  rep.g1_holds = rep.g1_margin > 0.0;
  rep.g2_margin = rep.eta * rep.sum_F_delta - rep.sum_max_F_gamma;
  rep.g2_holds = rep.g2_margin > 0.0;

  if (!rep.g1_holds) {
    rep.feasibility = Feasibility::infeasible_g1;
    return rep;
  }
  if (!rep.g2_holds) {
    rep.feasibility = Feasibility::infeasible_g2;
    return rep;
  }

  const double denom1 = rep.sum_F_delta - rep.sum_max_F_gamma;
  rep.lambda1_star = of / (2.0 * denom1);
  rep.lambda2_star =
      rep.sum_max_F_gamma == 0.0
          ? std::numeric_limits<double>::infinity()
          : lambda1 * gamma * gamma / (2.0 * rep.sum_max_F_gamma);
  const double denom3 =
      lambda1 * gamma * gamma * rep.sum_F_delta / of - rep.sum_max_F_gamma;
  rep.lambda3h_star = lambda1 * h * gamma * gamma / (2.0 * denom3);

  if (!(*rep.lambda1_star < *rep.lambda2_star))
    throw InfeasibleInterval(
        "three_solution_report: lambda1_star >= lambda2_star (" +
        std::to_string(*rep.lambda1_star) + " vs " +
        std::to_string(*rep.lambda2_star) + ")");
  rep.interval_lambda1 = {*rep.lambda1_star, *rep.lambda2_star};
  return rep;
}

}  // namespace varalg

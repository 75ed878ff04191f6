#include "varalg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "varalg/thresholds.hpp"

namespace varalg {

namespace {

Eigen::VectorXd f_at(const Problem& p, const Eigen::VectorXd& u) {
  Eigen::VectorXd v(p.n());
  for (int k = 0; k < p.n(); ++k)
    v(k) = p.nonlinearity.components[k].eval(u(k));
  return v;
}

Eigen::VectorXd gradient_at(const EnergyModel& m, const Eigen::VectorXd& u) {
  return m.problem.matrix.entries() * u - m.lambda * f_at(m.problem, u);
}

double psi_at(const EnergyModel& m, const Eigen::VectorXd& u) {
  double s = 0.0;
  for (int k = 0; k < m.problem.n(); ++k)
    s += primitive_value(m.problem.nonlinearity.components[k], u(k));
  return s;
}

double j_at(const EnergyModel& m, const Eigen::VectorXd& u) {
  return 0.5 * u.dot(m.problem.matrix.entries() * u) -
         m.lambda * psi_at(m, u);
}

std::optional<Eigen::MatrixXd> hessian_at(const EnergyModel& m,
                                          const Eigen::VectorXd& u) {
  Eigen::MatrixXd h = m.problem.matrix.entries();
  for (int k = 0; k < m.problem.n(); ++k) {
    const std::optional<double> d =
        derivative_value(m.problem.nonlinearity.components[k], u(k));
    if (!d) return std::nullopt;
    h(k, k) -= m.lambda * *d;
  }
  return h;
}

Classification classify(const EnergyModel& m, const Eigen::VectorXd& u) {
  const std::optional<Eigen::MatrixXd> h = hessian_at(m, u);
  if (!h) return {PointType::degenerate, -1};
  const JacobiEigen eig = jacobi_eigen(*h);
  const int n = static_cast<int>(eig.values.size());
  const double hnorm = eig.values.cwiseAbs().maxCoeff();
  int negatives = 0;
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    if (eig.values(k) < 0.0) ++negatives;
    smallest = std::min(smallest, std::abs(eig.values(k)));
  }
  if (smallest < 1e-8 * hnorm) return {PointType::degenerate, negatives};
  if (negatives == 0) return {PointType::local_min, 0};
  if (negatives == n && n > 1) return {PointType::local_max, negatives};
  return {PointType::saddle, negatives};
}

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int k = 0; k < a.size(); ++k) {
    if (a(k) < b(k)) return true;
    if (a(k) > b(k)) return false;
  }
  return false;
}

// Length scale for the start set: the maximizer of sum_k F_k(t)/t^2 when it
// exists, else 1.
double scale_t_star(const Problem& problem) {
  try {
    return max_rho(problem).t_star;
  } catch (const Error&) {
    return 1.0;
  }
}

// Armijo backtracking gradient descent (c = 1e-4, halving).
Eigen::VectorXd descend(const EnergyModel& m, Eigen::VectorXd u,
                        int max_iterations) {
  double ju = j_at(m, u);
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd g = gradient_at(m, u);
    const double gn2 = g.squaredNorm();
    if (std::sqrt(gn2) < 1e-9 * (1.0 + std::abs(ju))) break;
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h) {
      const Eigen::VectorXd v = u - alpha * g;
      const double jv = j_at(m, v);
      if (std::isfinite(jv) && jv <= ju - 1e-4 * alpha * gn2) {
        u = v;
        ju = jv;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  return u;
}

struct GoldenResult {
  double x;
  double value;
};

template <typename G>
GoldenResult golden_max_unit(const G& g, double tol = 1e-10) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  while (b - a > tol) {
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
  return g1 >= g2 ? GoldenResult{x1, g1} : GoldenResult{x2, g2};
}

}  // namespace

ModelEvaluation evaluate_model(const EnergyModel& model,
                               const Eigen::VectorXd& u) {
  if (u.size() != model.problem.n())
    throw DimensionMismatch("evaluate_model: dim(u) = " +
                            std::to_string(u.size()) + ", expected " +
                            std::to_string(model.problem.n()));
  ModelEvaluation ev;
  ev.phi = 0.5 * u.dot(model.problem.matrix.entries() * u);
  ev.psi = psi_at(model, u);
  ev.j = ev.phi - model.lambda * ev.psi;
  ev.gradient = gradient_at(model, u);
  ev.hessian = hessian_at(model, u);
  return ev;
}

CriticalPoint make_critical_point(const EnergyModel& model,
                                  const Eigen::VectorXd& u) {
  CriticalPoint cp;
  cp.u = u;
  cp.lambda = model.lambda;
  cp.residual = gradient_at(model, u).norm();
  cp.energy = j_at(model, u);
  cp.classification = classify(model, u);
  cp.nontrivial = u.norm() > 1e-8;
  const double umin = u.minCoeff();
  const double uinf = u.cwiseAbs().maxCoeff();
  cp.nonnegative = umin >= -1e-10 * (1.0 + uinf);
  cp.strictly_positive = umin > 1e-10;
  return cp;
}

CriticalPoint newton_refine_and_classify(const EnergyModel& model,
                                         const Eigen::VectorXd& u0) {
  if (!u0.allFinite())
    throw BadParams("newton_refine_and_classify: non-finite start");
  Eigen::VectorXd u = u0;

  for (int it = 0; it < 300; ++it) {
    const Eigen::VectorXd g = gradient_at(model, u);
    const double gn = g.norm();
    if (gn < 1e-11 * (1.0 + u.norm())) return make_critical_point(model, u);
    if (u.norm() > 1e8)
      throw Diverged("newton_refine_and_classify: ||u|| exceeded 1e8");

    const std::optional<Eigen::MatrixXd> h = hessian_at(model, u);
    bool moved = false;

    if (h) {
      Eigen::VectorXd d = Eigen::LDLT<Eigen::MatrixXd>(*h).solve(-g);
      if (d.allFinite()) {
        double alpha = 1.0;
        for (int k = 0; k < 60; ++k) {
          const Eigen::VectorXd v = u + alpha * d;
          if (gradient_at(model, v).norm() < gn) {
            u = v;
            moved = true;
            break;
          }
          alpha *= 0.5;
        }
      }
    }
    if (!moved) {
      // Derivative sentinel or a stalled Newton direction: one descent step.
      const double ju = j_at(model, u);
      double alpha = 1.0 / (1.0 + gn);
      for (int k = 0; k < 60 && !moved; ++k) {
        const Eigen::VectorXd v = u - alpha * g;
        const double jv = j_at(model, v);
        if (std::isfinite(jv) && jv < ju - 1e-4 * alpha * gn * gn) {
          u = v;
          moved = true;
        }
        alpha *= 0.5;
      }
    }
    if (!moved)
      throw StalledAtNonCritical(
          "newton_refine_and_classify: no progress at ||G|| = " +
          std::to_string(gn));
  }
  const double gn = gradient_at(model, u).norm();
  if (gn < 1e-11 * (1.0 + u.norm())) return make_critical_point(model, u);
  throw StalledAtNonCritical(
      "newton_refine_and_classify: iteration budget exhausted at ||G|| = " +
      std::to_string(gn));
}

CriticalPoint find_global_min(const EnergyModel& model,
                              const MultistartConfig& cfg) {
  const int n = model.problem.n();
  const double tstar = scale_t_star(model.problem);
  const double radius =
      cfg.radius_factor * std::sqrt(static_cast<double>(n)) *
      std::max(std::abs(tstar), 1e-3);

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(n));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double sigma = 1e-2 * std::max(1.0, std::abs(tstar));
  for (int r = 0; r < 4; ++r) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = sigma * gauss(rng);
    starts.push_back(v);
  }
  starts.push_back(Eigen::VectorXd::Constant(n, tstar));
  starts.push_back(Eigen::VectorXd::Constant(n, -tstar));
  for (int k = 0; k < std::min(n, 8); ++k) {
    Eigen::VectorXd spike = Eigen::VectorXd::Zero(n);
    spike(k) = tstar;
    starts.push_back(spike);
    starts.push_back(-spike);
  }
  for (int r = 0; r < cfg.random_starts; ++r) {
    Eigen::VectorXd dir(n);
    for (int k = 0; k < n; ++k) dir(k) = gauss(rng);
    const double len = dir.norm();
    if (len == 0.0) continue;
    const double rad =
        radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
    starts.push_back(dir * (rad / len));
  }

  std::optional<CriticalPoint> best;
  int converged = 0;
  for (const Eigen::VectorXd& s : starts) {
    try {
      const Eigen::VectorXd basin = descend(model, s, cfg.max_gd_iterations);
      CriticalPoint cp = newton_refine_and_classify(model, basin);
      if (cp.residual > cfg.residual_tolerance * (1.0 + cp.u.norm())) continue;
      ++converged;
      if (!best || cp.energy < best->energy ||
          (cp.energy == best->energy && lexicographic_less(cp.u, best->u)))
        best = std::move(cp);
    } catch (const Error&) {
      // a failed start is just a failed start
    }
  }
  if (!best)
    throw NoDescentProgress(
        "find_global_min: none of " + std::to_string(starts.size()) +
        " starts converged to a critical point (t_star scale " +
        std::to_string(tstar) + ")");
  (void)converged;
  return *best;
}

CriticalPoint mountain_pass(const EnergyModel& model,
                            const Eigen::VectorXd& endpoint,
                            const MountainPassConfig& cfg) {
  if (endpoint.size() != model.problem.n())
    throw DimensionMismatch("mountain_pass: endpoint dimension mismatch");
  const double j_end = j_at(model, endpoint);
  if (!(j_end < 0.0))
    throw GeometryViolated("mountain_pass: J(endpoint) = " +
                           std::to_string(j_end) + " is not negative");

  const int P = std::max(cfg.path_points, 5);
  std::vector<Eigen::VectorXd> path(P);
  std::vector<double> jv(P);
  for (int i = 0; i < P; ++i) {
    path[i] = endpoint * (static_cast<double>(i) / (P - 1));
    jv[i] = j_at(model, path[i]);
  }

  auto segment_max = [&](int a, int b) {
    const Eigen::VectorXd base = path[a];
    const Eigen::VectorXd dir = path[b] - path[a];
    const GoldenResult r = golden_max_unit(
        [&](double t) { return j_at(model, base + t * dir); });
    return std::make_pair(base + r.x * dir, r.value);
  };

  auto redistribute = [&] {
    std::vector<double> arc(P, 0.0);
    for (int i = 1; i < P; ++i)
      arc[i] = arc[i - 1] + (path[i] - path[i - 1]).norm();
    const double total = arc[P - 1];
    if (total <= 0.0) return;
    std::vector<Eigen::VectorXd> fresh(P);
    fresh[0] = path[0];
    fresh[P - 1] = path[P - 1];
    int seg = 0;
    for (int i = 1; i < P - 1; ++i) {
      const double target = total * i / (P - 1);
      while (seg + 1 < P - 1 && arc[seg + 1] < target) ++seg;
      const double span = arc[seg + 1] - arc[seg];
      const double w = span > 0.0 ? (target - arc[seg]) / span : 0.0;
      fresh[i] = path[seg] + w * (path[seg + 1] - path[seg]);
    }
    path = std::move(fresh);
    for (int i = 0; i < P; ++i) jv[i] = j_at(model, path[i]);
  };

  long updates = 0;
  Eigen::VectorXd z = path[0];
  for (;;) {
    int m = 0;
    for (int i = 1; i < P; ++i)
      if (jv[i] > jv[m]) m = i;
    const int im = std::clamp(m, 1, P - 2);

    // Relocate the vertex to the path-local maximum around m.
    z = path[im];
    double jz = jv[im];
    if (m > 0) {
      auto [pt, val] = segment_max(m - 1, m);
      if (val > jz) {
        z = pt;
        jz = val;
      }
    }
    if (m < P - 1) {
      auto [pt, val] = segment_max(m, m + 1);
      if (val > jz) {
        z = pt;
        jz = val;
      }
    }
    path[im] = z;
    jv[im] = jz;

    const Eigen::VectorXd g = gradient_at(model, z);
    const double gn = g.norm();
    if (gn < cfg.grad_tolerance) break;

    Eigen::VectorXd tau = path[im + 1] - path[im - 1];
    const double tn = tau.norm();
    Eigen::VectorXd gperp = g;
    if (tn > 0.0) {
      tau /= tn;
      gperp -= g.dot(tau) * tau;
    }
    if (gperp.norm() <= 1e-12 * (1.0 + gn)) {
      // Collinear geometry (n == 1 or a symmetry-invariant path): the
      // along-path maximization already pinned the point; hand to Newton.
      break;
    }

    double alpha = cfg.descent_step / (1.0 + gn);
    bool stepped = false;
    for (int k = 0; k < 30; ++k) {
      const Eigen::VectorXd v = z - alpha * gperp;
      const double jvv = j_at(model, v);
      if (std::isfinite(jvv) && jvv < jz) {
        path[im] = v;
        jv[im] = jvv;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) break;  // constrained maximum: deformation cannot lower it

    if (++updates > cfg.max_point_updates)
      throw MaxDeformationIterations(
          "mountain_pass: exceeded " + std::to_string(cfg.max_point_updates) +
          " point updates (path max gradient " + std::to_string(gn) + ")");
    redistribute();
  }

  return newton_refine_and_classify(model, z);
}

namespace {

bool nonnegative_on_grid(const Nonlinearity& F) {
  for (const ScalarFunction& f : F.components) {
    if (f.eval(0.0) < 0.0) return false;
    for (int d = -8; d < 6; ++d)
      for (int i = 0; i < 16; ++i) {
        const double mag = std::pow(10.0, d + i / 16.0);
        if (f.eval(mag) < 0.0 || f.eval(-mag) < 0.0) return false;
      }
  }
  return true;
}

}  // namespace

std::pair<CriticalPoint, CriticalPoint> find_two_solutions(
    const Problem& problem, double lambda, const MultistartConfig& cfg) {
  if (!(lambda > 0.0)) throw BadParams("find_two_solutions: lambda must be > 0");
  const EnergyModel model{problem, lambda};

  CriticalPoint u1 = find_global_min(model, cfg);
  if (!u1.nontrivial || !(u1.energy < 0.0))
    throw OnlyTrivialFound(
        "find_two_solutions: global minimizer is trivial (J = " +
        std::to_string(u1.energy) +
        "); lambda is likely at or below the existence threshold");

  CriticalPoint u2 = mountain_pass(model, u1.u);
  if (!u2.nontrivial)
    throw DistinctnessFailed(
        "find_two_solutions: mountain pass collapsed to the origin");
  if ((u1.u - u2.u).norm() <= 1e-6 * (1.0 + u1.u.norm()))
    throw DistinctnessFailed(
        "find_two_solutions: mountain pass reproduced the minimizer");
  if (!(u2.energy > 0.0))
    throw Error("find_two_solutions: energy ordering violated (J(u2) = " +
                std::to_string(u2.energy) + " should be positive)");

  const SignConditionVerdict sign = check_sign_conditions(problem.matrix);
  if (sign.a1_holds && nonnegative_on_grid(problem.nonlinearity)) {
    if (!u1.nonnegative || !u2.nonnegative)
      throw Error(
          "find_two_solutions: (A1) with nonnegative f requires nonnegative "
          "solutions, got a negative component");
    if (sign.a2_holds && (!u1.strictly_positive || !u2.strictly_positive))
      throw Error(
          "find_two_solutions: (A1)+(A2) with nonnegative f requires "
          "strictly positive solutions");
  }
  return {std::move(u1), std::move(u2)};
}

std::vector<CriticalPoint> find_critical_points(
    const Problem& problem, double lambda, const CriticalSearchConfig& cfg) {
  const EnergyModel model{problem, lambda};
  const int n = problem.n();

  int per_axis = std::max(cfg.starts_per_axis, 2);
  while (std::pow(per_axis, n) > 20000.0 && per_axis > 2) --per_axis;

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(n));
  std::vector<int> digits(n, 0);
  const long total = static_cast<long>(std::pow(per_axis, n));
  for (long c = 0; c < total; ++c) {
    Eigen::VectorXd v(n);
    long rem = c;
    for (int k = 0; k < n; ++k) {
      const int d = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      v(k) = -cfg.radius + 2.0 * cfg.radius * d / (per_axis - 1);
    }
    starts.push_back(v);
  }

  std::vector<CriticalPoint> found;
  auto add = [&](CriticalPoint cp) {
    if (cp.residual >
        cfg.multistart.residual_tolerance * (1.0 + cp.u.norm()))
      return;
    for (const CriticalPoint& q : found)
      if ((q.u - cp.u).norm() <=
          1e-6 * (1.0 + std::max(q.u.norm(), cp.u.norm())))
        return;
    found.push_back(std::move(cp));
  };

  for (const Eigen::VectorXd& s : starts) {
    try {
      add(newton_refine_and_classify(model, s));
    } catch (const Error&) {
    }
  }
  try {
    CriticalPoint u1 = find_global_min(model, cfg.multistart);
    const bool negative = u1.nontrivial && u1.energy < 0.0;
    Eigen::VectorXd endpoint = u1.u;
    add(std::move(u1));
    if (negative) add(mountain_pass(model, endpoint));
  } catch (const Error&) {
  }

  std::sort(found.begin(), found.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              if (a.energy != b.energy) return a.energy < b.energy;
              return lexicographic_less(a.u, b.u);
            });
  return found;
}

SweepResult lambda_sweep(const Problem& problem, std::vector<double> lambdas,
                         bool fit, const MultistartConfig& cfg) {
  std::sort(lambdas.begin(), lambdas.end());
  SweepResult out;

  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    SweepRecord rec;
    rec.lambda = lambdas[i];
    MultistartConfig per = cfg;
    per.seed = cfg.seed + 0x9e3779b97f4a7c15ull * (i + 1);
    const EnergyModel model{problem, lambdas[i]};
    try {
      CriticalPoint u1 = find_global_min(model, per);
      if (!u1.nontrivial || !(u1.energy < 0.0)) {
        rec.status = "only trivial minimizer";
      } else {
        rec.min_norm = u1.u.norm();
        const Eigen::VectorXd endpoint = u1.u;
        rec.solutions.push_back(std::move(u1));
        try {
          CriticalPoint u2 = mountain_pass(model, endpoint);
          const bool distinct =
              u2.nontrivial &&
              (u2.u - endpoint).norm() > 1e-6 * (1.0 + endpoint.norm());
          if (distinct) {
            rec.mp_energy = u2.energy;
            rec.solutions.push_back(std::move(u2));
            rec.status = "ok";
          } else {
            rec.status = "mountain pass not distinct";
          }
        } catch (const Error& e) {
          rec.status = std::string("mountain pass failed: ") + e.what();
        }
      }
    } catch (const Error& e) {
      rec.status = e.what();
    }
    out.records.push_back(std::move(rec));
  }

  if (fit) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t start = lambdas.size() / 2;
    for (std::size_t i = start; i < out.records.size(); ++i) {
      const SweepRecord& r = out.records[i];
      if (std::isfinite(r.min_norm) && r.min_norm > 0.0)
        pts.emplace_back(std::log(r.lambda), std::log(r.min_norm));
    }
    if (pts.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
      }
      const double m = static_cast<double>(pts.size());
      SlopeFit f;
      f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double denom = (m * sxx - sx * sx) * (m * syy - sy * sy);
      f.r_squared = denom > 0.0
                        ? (m * sxy - sx * sy) * (m * sxy - sx * sy) / denom
                        : 1.0;
      const HypothesisVerdict hv = probe_hypotheses(
          problem.nonlinearity, problem.matrix.lambda_min());
      if (hv.h1_star == Verdict::pass && hv.q > 0.0 && hv.q < 1.0) {
        f.q = hv.q;
        f.slope_bound = 1.0 / (1.0 - hv.q) + 0.1;
        f.pass = f.slope <= *f.slope_bound && f.slope >= 0.0;
      } else {
        f.pass = f.slope >= 0.0;
      }
      out.fit = f;
    }
  }
  return out;
}

}  // namespace varalg

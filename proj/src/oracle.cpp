#include "varalg/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace varalg {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNode2 = 0.5384693101056831;
constexpr double kNode4 = 0.9061798459386640;
constexpr double kW0 = 0.5688888888888889;
constexpr double kW2 = 0.4786286704993665;
constexpr double kW4 = 0.2369268850561891;

double gl5_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  return h * (kW0 * f(c) +
              kW2 * (f(c - h * kNode2) + f(c + h * kNode2)) +
              kW4 * (f(c - h * kNode4) + f(c + h * kNode4)));
}

Eigen::VectorXd residual_vec(const Problem& p, double lambda,
                             const Eigen::VectorXd& u) {
  Eigen::VectorXd r = p.matrix.entries() * u;
  for (int k = 0; k < p.n(); ++k)
    r(k) -= lambda * p.nonlinearity.components[k].eval(u(k));
  return r;
}

double residual_inf(const Problem& p, double lambda, const Eigen::VectorXd& u) {
  return residual_vec(p, lambda, u).cwiseAbs().maxCoeff();
}

// Jacobian of G(u) = A u - lambda f(u) by central differences of f.
Eigen::MatrixXd fd_jacobian(const Problem& p, double lambda,
                            const Eigen::VectorXd& u) {
  Eigen::MatrixXd jac = p.matrix.entries();
  for (int k = 0; k < p.n(); ++k) {
    const double h = std::max(1e-7, 1e-7 * std::abs(u(k)));
    const double fp = p.nonlinearity.components[k].eval(u(k) + h);
    const double fm = p.nonlinearity.components[k].eval(u(k) - h);
    jac(k, k) -= lambda * (fp - fm) / (2.0 * h);
  }
  return jac;
}

bool refine(const Problem& p, double lambda, Eigen::VectorXd& u, double cell) {
  // Coordinate bisection: shrink around the best point within the cell.
  double width = cell;
  for (int round = 0; round < 40 && width > 1e-12; ++round) {
    bool improved = false;
    for (int k = 0; k < p.n(); ++k) {
      const double base = residual_inf(p, lambda, u);
      for (double d : {-width, width}) {
        Eigen::VectorXd v = u;
        v(k) += d;
        if (residual_inf(p, lambda, v) < base) {
          u = v;
          improved = true;
          break;
        }
      }
    }
    if (!improved) width *= 0.5;
  }
  // Damped Newton with the finite-difference Jacobian.
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd g = residual_vec(p, lambda, u);
    const double gn = g.norm();
    if (gn < 1e-10) return true;
    Eigen::VectorXd d =
        fd_jacobian(p, lambda, u).fullPivLu().solve(-g);
    if (!d.allFinite()) return false;
    double alpha = 1.0;
    bool moved = false;
    for (int h = 0; h < 50; ++h) {
      Eigen::VectorXd v = u + alpha * d;
      if (residual_vec(p, lambda, v).norm() < gn) {
        u = v;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) return residual_inf(p, lambda, u) < 1e-8;
  }
  return residual_inf(p, lambda, u) < 1e-8;
}

}  // namespace

std::vector<Eigen::VectorXd> grid_critical_points(const Problem& problem,
                                                  double lambda,
                                                  const GridSpec& grid) {
  const int n = problem.n();
  if (n > 3)
    throw BadParams("grid_critical_points: n <= 3 only (combinatorial cost)");
  if (!(grid.radius > 0.0) || grid.steps_per_axis < 3)
    throw BadParams("grid_critical_points: bad grid spec");
  if (n == 2 && grid.steps_per_axis > 401)
    throw BudgetExceeded("grid_critical_points: steps_per_axis > 401 for n=2");
  if (n == 3 && grid.steps_per_axis > 101)
    throw BudgetExceeded("grid_critical_points: steps_per_axis > 101 for n=3");
  const double total = std::pow(grid.steps_per_axis, n);
  if (total > 1e7)
    throw BudgetExceeded("grid_critical_points: grid of " +
                         std::to_string(static_cast<long>(total)) +
                         " points exceeds the 1e7 budget");

  const int steps = grid.steps_per_axis;
  const double cell = 2.0 * grid.radius / (steps - 1);
  const long count = static_cast<long>(total);

  std::vector<double> values(count);
  auto point_of = [&](long idx) {
    Eigen::VectorXd u(n);
    long rem = idx;
    for (int k = 0; k < n; ++k) {
      u(k) = -grid.radius + cell * static_cast<double>(rem % steps);
      rem /= steps;
    }
    return u;
  };
  for (long idx = 0; idx < count; ++idx)
    values[idx] = residual_inf(problem, lambda, point_of(idx));

  // Strict local minima over the Moore neighborhood (lexicographic order
  // keeps deduplication deterministic).
  std::vector<Eigen::VectorXd> roots;
  std::vector<int> offset(n, -1);
  for (long idx = 0; idx < count; ++idx) {
    if (values[idx] >= 0.1) continue;
    std::vector<int> coord(n);
    long rem = idx;
    for (int k = 0; k < n; ++k) {
      coord[k] = static_cast<int>(rem % steps);
      rem /= steps;
    }
    bool is_min = true;
    std::fill(offset.begin(), offset.end(), -1);
    for (;;) {
      bool all_zero = true;
      long nidx = 0;
      bool valid = true;
      for (int k = n - 1; k >= 0; --k) {
        const int c = coord[k] + offset[k];
        if (offset[k] != 0) all_zero = false;
        if (c < 0 || c >= steps) valid = false;
        nidx = nidx * steps + c;
      }
      if (!all_zero && valid && values[nidx] <= values[idx]) {
        // ties go to the lexicographically earlier grid point
        if (values[nidx] < values[idx] || nidx < idx) is_min = false;
      }
      if (!is_min) break;
      int k = 0;
      while (k < n && offset[k] == 1) offset[k++] = -1;
      if (k == n) break;
      ++offset[k];
    }
    if (!is_min) continue;

    Eigen::VectorXd u = point_of(idx);
    if (!refine(problem, lambda, u, cell)) continue;
    bool dup = false;
    for (const Eigen::VectorXd& r : roots)
      if ((r - u).norm() <= 1e-6) dup = true;
    if (!dup) roots.push_back(u);
  }
  return roots;
}

double reference_primitive(const ScalarFunction& f, double t) {
  if (t == 0.0) return 0.0;
  constexpr int kPanels = 4096;
  const double h = t / kPanels;
  double sum = 0.0;
  for (int i = 0; i < kPanels; ++i)
    sum += gl5_panel(f.eval, i * h, (i + 1) * h);
  return sum;
}

std::pair<double, double> dense_rho_scan(const Problem& problem, double lo,
                                         double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw BadParams("dense_rho_scan: bad range");

  const long count = static_cast<long>(std::floor((hi - lo) / step)) + 1;
  std::vector<double> ts;
  ts.reserve(count);
  for (long i = 0; i < count; ++i) {
    const double t = lo + step * static_cast<double>(i);
    if (std::abs(t) > 1e-9) ts.push_back(t);
  }
  if (ts.empty()) throw BadParams("dense_rho_scan: empty scan range");

  // Cumulative panel integration outward from 0 on each side of the range.
  const int n = problem.n();
  std::vector<double> rho(ts.size(), 0.0);
  for (int k = 0; k < n; ++k) {
    const auto& f = problem.nonlinearity.components[k].eval;
    // positive side, ascending
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] <= 0.0) continue;
      if (prev == 0.0) {
        // integrate 0 -> first positive t in sub-panels of width <= step
        const int panels = std::max(1, static_cast<int>(std::ceil(ts[i] / step)));
        for (int p = 0; p < panels; ++p)
          acc += gl5_panel(f, ts[i] * p / panels, ts[i] * (p + 1) / panels);
      } else {
        acc += gl5_panel(f, prev, ts[i]);
      }
      prev = ts[i];
      rho[i] += acc / (ts[i] * ts[i]);
    }
    // negative side, descending
    acc = 0.0;
    prev = 0.0;
    for (std::size_t ii = ts.size(); ii-- > 0;) {
      if (ts[ii] >= 0.0) continue;
      if (prev == 0.0) {
        const int panels =
            std::max(1, static_cast<int>(std::ceil(-ts[ii] / step)));
        for (int p = 0; p < panels; ++p)
          acc += gl5_panel(f, ts[ii] * p / panels, ts[ii] * (p + 1) / panels);
      } else {
        acc += gl5_panel(f, prev, ts[ii]);
      }
      prev = ts[ii];
      rho[ii] += acc / (ts[ii] * ts[ii]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (rho[i] > rho[best]) best = i;
  return {ts[best], rho[best]};
}

}  // namespace varalg

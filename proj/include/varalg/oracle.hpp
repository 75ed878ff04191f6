#pragma once

#include <utility>
#include <vector>

#include "varalg/problems.hpp"

namespace varalg {

// Brute-force references kept deliberately independent of the solver path:
// the refinement here uses finite-difference Jacobians of f only, never the
// catalog's closed-form derivatives, and the quadrature is a fixed
// Gauss-Legendre rule rather than adaptive Simpson.

struct GridSpec {
  double radius;       // search box [-radius, radius]^n
  int steps_per_axis;  // <= 401 for n = 2, <= 101 for n = 3
};

// Residual grid search: collects strict local minima of ||A u - lambda f(u)||_inf
// with value < 0.1 over the full grid, refines each by coordinate bisection
// plus damped Newton (FD Jacobian) to residual < 1e-8, deduplicates within
// 1e-6. n <= 3; total grid size capped at 1e7 points (BudgetExceeded).
std::vector<Eigen::VectorXd> grid_critical_points(const Problem& problem,
                                                  double lambda,
                                                  const GridSpec& grid);

// Composite 5-point Gauss-Legendre on 4096 uniform panels over [0, t].
double reference_primitive(const ScalarFunction& f, double t);

// Uniform scan of rho(t) = sum_k F_k(t)/t^2 with cumulative panel quadrature;
// a 1e-9 neighborhood of 0 is excluded. Returns (t_best, rho_best).
std::pair<double, double> dense_rho_scan(const Problem& problem, double lo,
                                         double hi, double step);

}  // namespace varalg

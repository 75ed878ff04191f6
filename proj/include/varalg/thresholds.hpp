#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "varalg/problems.hpp"

namespace varalg {

// Grid + refinement configuration for the 1-D maximizations. All searches are
// deterministic given the config (fixed grids, first-wins tie breaks).
struct SearchConfig {
  double t_min = 1e-6;
  double t_max = 1e6;
  int points_per_decade = 64;
  double rel_tol = 1e-10;  // golden-section width target, relative in t
};

// max_{t != 0} rho(t) with rho(t) = sum_k F_k(t) / t^2, over a signed log
// grid, refining the best (up to three non-adjacent) grid brackets.
struct RhoMaxResult {
  double t_star;
  double rho_max;
  double bracket_lo;
  double bracket_hi;
  long grid_evaluations;
  // Best grid point sat on the outer grid edge: the true maximum may lie
  // outside the probed range.
  bool range_suspect;
};
RhoMaxResult max_rho(const Problem& problem, const SearchConfig& cfg = {});

// ones_form(A) / (2 rho_max). Propagates NonpositiveSup.
double lambda_star(const Problem& problem);
double lambda_star(const Problem& problem, const RhoMaxResult& rho);

// sum_k max_{|xi| <= sqrt(2 rho / lambda_1)} F_k(xi): the upper bound for the
// supremum of Psi over the sublevel set {u: u^t A u < 2 rho}.
double sublevel_sup_bound(const Problem& problem, double rho);

// bound(rho)/rho for rho = 10^0 ... 10^{-decades}. Under the decay
// hypotheses the tail vanishes; a warning is set when the h1/h2' probes fail.
struct RatioScan {
  std::vector<std::pair<double, double>> entries;  // (rho, bound(rho)/rho)
  bool hypothesis_warning;
};
RatioScan sublevel_ratio_scan(const Problem& problem, int decades);

// The constant abar = (1+eps) / (1/lambda_star - bound(rho)/rho), with rho
// chosen by bisection as the largest value satisfying both
//   bound(rho)/rho < eps/lambda_star   and   rho < ones_form * t_star^2 / 2.
// The two-solution parameter interval is contained in [0, abar]; the sweep
// uses abar as its empirical upper limit.
struct AbarResult {
  double abar;
  double epsilon;
  double rho;  // the chosen sublevel radius
};
AbarResult abar_bound(const Problem& problem, double epsilon);

// Report for the three-solution thresholds at inputs (gamma, delta, h):
//   eta = lambda_1 gamma^2 / (lambda_1 gamma^2 + ones_form delta^2)
//   g1:  delta > sqrt(lambda_1 / ones_form) gamma
//   g2:  sum_k max_{|xi|<=gamma} F_k < eta * sum_k F_k(delta)
// and, when both hold,
//   lambda1_star = ones_form / (2 (sum F_k(delta) - sum max F_k))
//   lambda2_star = lambda_1 gamma^2 / (2 sum max F_k)   (+inf at 0)
//   lambda3h_star = lambda_1 h gamma^2 /
//                   (2 (lambda_1 gamma^2 sum F_k(delta)/ones_form - sum max))
enum class Feasibility { ok, infeasible_g1, infeasible_g2 };

struct ThresholdReport {
  std::optional<double> lambda_star;  // absent when sup sum F_k <= 0
  std::optional<AbarResult> abar;

  double gamma = 0.0, delta = 0.0, h = 0.0;
  double r = 0.0;    // lambda_1 gamma^2 / 2
  double eta = 0.0;  // in (0,1)
  bool g1_holds = false;
  bool g2_holds = false;
  double g1_margin = 0.0;  // delta - sqrt(lambda_1/ones_form)*gamma
  double g2_margin = 0.0;  // eta*sum F_k(delta) - sum max F_k
  double sum_F_delta = 0.0;
  double sum_max_F_gamma = 0.0;
  Feasibility feasibility = Feasibility::ok;

  std::optional<double> lambda1_star;
  std::optional<double> lambda2_star;  // +inf allowed
  std::optional<double> lambda3h_star;
  std::optional<std::pair<double, double>> interval_lambda1;

  HypothesisVerdict hypothesis_verdicts;
};

// Throws InfeasibleInterval if the emitted interval would be empty
// (lambda1_star >= lambda2_star), which the inequalities rule out.
ThresholdReport three_solution_report(const Problem& problem, double gamma,
                                      double delta, double h);

}  // namespace varalg

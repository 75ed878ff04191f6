#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varalg/problems.hpp"

namespace varalg {

// The energy J_lambda(u) = Phi(u) - lambda Psi(u) with Phi(u) = u^t A u / 2
// and Psi(u) = sum_k F_k(u_k). Critical points of J_lambda are exactly the
// solutions of A u = lambda f(u). Evaluation is pure; instances may be shared
// across concurrent sweep entries.
struct EnergyModel {
  Problem problem;
  double lambda;
};

struct ModelEvaluation {
  double phi;
  double psi;
  double j;
  Eigen::VectorXd gradient;  // (A u)_k - lambda f_k(u_k)
  // A - lambda diag(f_k'(u_k)); absent when a derivative sentinel fired.
  std::optional<Eigen::MatrixXd> hessian;
};
ModelEvaluation evaluate_model(const EnergyModel& model,
                               const Eigen::VectorXd& u);

enum class PointType { local_min, saddle, local_max, degenerate };

struct Classification {
  PointType type = PointType::degenerate;
  int index = -1;  // number of negative Hessian eigenvalues; -1 = unavailable
};

// A converged solution of A u = lambda f(u). The residual is recomputed from
// scratch at construction, independent of the solve path that produced u.
// In one dimension the point between two wells is reported as saddle(1).
struct CriticalPoint {
  Eigen::VectorXd u;
  double lambda = 0.0;
  double residual = 0.0;  // ||A u - lambda f(u)||_2
  double energy = 0.0;    // J_lambda(u)
  Classification classification;
  bool nontrivial = false;        // ||u||_2 > 1e-8
  bool nonnegative = false;       // min_k u_k >= -1e-10 (1 + ||u||_inf)
  bool strictly_positive = false; // min_k u_k > 1e-10
};
CriticalPoint make_critical_point(const EnergyModel& model,
                                  const Eigen::VectorXd& u);

struct MultistartConfig {
  int random_starts = 16;
  double radius_factor = 4.0;      // ball radius = factor * sqrt(n) * |t_star|
  std::uint64_t seed = 12345;
  int max_gd_iterations = 400;
  double residual_tolerance = 1e-9;  // acceptance: ||G|| < tol * (1 + ||u||)
};

struct MountainPassConfig {
  int path_points = 41;
  double grad_tolerance = 1e-7;
  long max_point_updates = 100000;
  double descent_step = 0.1;  // damped as step / (1 + ||grad||)
};

// Global minimizer by multistart gradient descent (Armijo backtracking,
// c = 1e-4, halving) followed by a Newton polish of each basin. Starts:
// perturbations of 0, +-t_star*ones, coordinate spikes, and random points in
// the ball of radius radius_factor * sqrt(n) * |t_star|. Returns the lowest
// polished point (nontrivial == false means only the origin was found).
// Throws NoDescentProgress when no start converges.
CriticalPoint find_global_min(const EnergyModel& model,
                              const MultistartConfig& cfg = {});

// Path-deformation mountain pass between 0 and the endpoint (which must have
// J(endpoint) < 0): a polyline is repeatedly relocated at its maximum,
// stepped against the path-orthogonal gradient component, and redistributed
// by arclength, until the path-maximum gradient drops below tolerance; the
// maximizer is then Newton-polished. Throws GeometryViolated,
// MaxDeformationIterations.
CriticalPoint mountain_pass(const EnergyModel& model,
                            const Eigen::VectorXd& endpoint,
                            const MountainPassConfig& cfg = {});

// Damped Newton on G(u) = A u - lambda f(u), Jacobian A - lambda diag(f');
// falls back to gradient steps when the derivative sentinel fires.
// Convergence at ||G||_2 < 1e-11 (1 + ||u||). Classification by Hessian
// inertia. Throws Diverged (||u|| > 1e8), StalledAtNonCritical.
CriticalPoint newton_refine_and_classify(const EnergyModel& model,
                                         const Eigen::VectorXd& u0);

// The two-solution search: global minimizer u1 plus mountain-pass point u2,
// with distinctness, nontriviality and the energy ordering
// J(u1) < 0 < J(u2) asserted. Under sign condition (A1) ((A2)) and
// nonnegative f, nonnegativity (strict positivity) of both is also asserted.
// Throws OnlyTrivialFound, DistinctnessFailed.
std::pair<CriticalPoint, CriticalPoint> find_two_solutions(
    const Problem& problem, double lambda, const MultistartConfig& cfg = {});

// Exhaustive small-n search: Newton from a uniform start grid over
// [-radius, radius]^n plus the multistart set, the origin, and a mountain
// pass when a negative-energy minimizer exists. Deduplicated, sorted by
// (energy, lexicographic u).
struct CriticalSearchConfig {
  double radius = 10.0;
  int starts_per_axis = 21;
  MultistartConfig multistart = {};
};
std::vector<CriticalPoint> find_critical_points(
    const Problem& problem, double lambda, const CriticalSearchConfig& cfg);

// One lambda of a sweep. Partial results are kept: a missing mountain-pass
// point leaves mp_energy NaN and an explanatory status.
struct SweepRecord {
  double lambda = 0.0;
  std::vector<CriticalPoint> solutions;
  double min_norm = std::numeric_limits<double>::quiet_NaN();
  double mp_energy = std::numeric_limits<double>::quiet_NaN();
  std::string status;  // "ok" or the per-lambda error
};

// Least-squares slope of log ||u1_lambda|| against log lambda over the top
// half of the lambda range. q comes from the h1* probe; the slope must stay
// below 1/(1-q) + 0.1 and must not be negative (norms do not vanish as
// lambda grows).
struct SlopeFit {
  double slope = 0.0;
  double r_squared = 0.0;
  std::optional<double> q;
  std::optional<double> slope_bound;  // 1/(1-q) + 0.1
  bool pass = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::optional<SlopeFit> fit;
};
SweepResult lambda_sweep(const Problem& problem, std::vector<double> lambdas,
                         bool fit, const MultistartConfig& cfg = {});

}  // namespace varalg

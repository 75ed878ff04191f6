// varalg: analyze / solve / sweep / oracle / verify for parameterized
// nonlinear algebraic systems A u = lambda f(u) with A symmetric positive
// definite.
//
// Exit codes: 0 success, 1 input error, 2 infeasible thresholds,
// 3 no nontrivial solutions.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "varalg/oracle.hpp"
#include "varalg/problem_io.hpp"
#include "varalg/solver.hpp"
#include "varalg/thresholds.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoSolutions = 3;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw varalg::BadParams("cannot write to '" + out_path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
}

std::vector<double> parse_lambdas(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo, hi;
    int count;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
        count < 0 || !(lo > 0) || !(hi > 0))
      throw varalg::BadParams("bad lambda range '" + spec +
                              "', expected lo:hi:count");
    if (count == 1) {
      out.push_back(lo);
    } else {
      for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    }
    return out;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::string threshold_table(const varalg::ThresholdReport& rep,
                            const varalg::Problem& problem) {
  std::ostringstream out;
  const auto& A = problem.matrix;
  out << "n               " << A.n() << "\n";
  out << "spectrum       ";
  for (int k = 0; k < A.n(); ++k) out << ' ' << fmt(A.spectrum()(k));
  out << "\n";
  out << "ones_form       " << fmt(A.ones_form()) << "\n";
  if (rep.lambda_star)
    out << "lambda_star     " << fmt(*rep.lambda_star) << "\n";
  if (rep.abar)
    out << "abar            " << fmt(rep.abar->abar)
        << "  (epsilon " << fmt(rep.abar->epsilon) << ", rho "
        << fmt(rep.abar->rho) << ")\n";
  const auto& hv = rep.hypothesis_verdicts;
  out << "h1 " << to_string(hv.h1) << "  h1* " << to_string(hv.h1_star)
      << " (q " << fmt(hv.q) << ")  h2 " << to_string(hv.h2) << "  h2' "
      << to_string(hv.h2_prime) << "  g3 " << to_string(hv.g3) << "\n";
  if (rep.gamma > 0) {
    out << "gamma " << fmt(rep.gamma) << "  delta " << fmt(rep.delta)
        << "  h " << fmt(rep.h) << "\n";
    out << "eta             " << fmt(rep.eta) << "\n";
    out << "g1 " << (rep.g1_holds ? "holds" : "FAILS") << " (margin "
        << fmt(rep.g1_margin) << ")   g2 "
        << (rep.g2_holds ? "holds" : "FAILS") << " (margin "
        << fmt(rep.g2_margin) << ")\n";
    if (rep.lambda1_star)
      out << "lambda1_star    " << fmt(*rep.lambda1_star) << "\n";
    if (rep.lambda2_star)
      out << "lambda2_star    " << fmt(*rep.lambda2_star) << "\n";
    if (rep.lambda3h_star)
      out << "lambda3h_star   " << fmt(*rep.lambda3h_star) << "\n";
    if (rep.interval_lambda1)
      out << "interval        (" << fmt(rep.interval_lambda1->first) << ", "
          << fmt(rep.interval_lambda1->second) << ")\n";
  }
  return out.str();
}

int run_analyze(const std::string& problem_path, double gamma, double delta,
                double h, double abar_eps, const std::string& format,
                const std::string& out_path) {
  varalg::Problem problem = varalg::load_problem_file(problem_path);

  varalg::ThresholdReport rep;
  bool infeasible = false;
  if (gamma > 0 && delta > 0) {
    rep = varalg::three_solution_report(problem, gamma, delta, h);
    infeasible = rep.feasibility != varalg::Feasibility::ok;
  } else {
    rep.hypothesis_verdicts = varalg::probe_hypotheses(
        problem.nonlinearity, problem.matrix.lambda_min());
    try {
      rep.lambda_star = varalg::lambda_star(problem);
    } catch (const varalg::NonpositiveSup&) {
      infeasible = true;
    }
  }
  if (abar_eps > 0) rep.abar = varalg::abar_bound(problem, abar_eps);

  if (format == "table") {
    emit(threshold_table(rep, problem), out_path);
  } else {
    json out = varalg::to_json(rep);
    out["problem"] = varalg::spectral_summary(problem);
    if (infeasible && !rep.lambda_star)
      out["error"] = "sup_t sum_k F_k(t) <= 0: lambda_star undefined";
    emit(out.dump(2), out_path);
  }
  return infeasible ? kExitInfeasible : kExitOk;
}

int run_solve(const std::string& problem_path, double lambda, bool three,
              double gamma, double delta, double h, double radius,
              std::uint64_t seed, double tol_residual,
              const std::string& format, const std::string& out_path) {
  varalg::Problem problem = varalg::load_problem_file(problem_path);
  varalg::MultistartConfig cfg;
  cfg.seed = seed;
  if (tol_residual > 0) cfg.residual_tolerance = tol_residual;

  json out;
  out["lambda"] = lambda;
  int exit_code = kExitOk;

  try {
    auto [u1, u2] = varalg::find_two_solutions(problem, lambda, cfg);
    out["solutions"] = json::array({varalg::to_json(u1), varalg::to_json(u2)});
  } catch (const varalg::OnlyTrivialFound& e) {
    out["solutions"] = json::array();
    out["error"] = e.what();
    exit_code = kExitNoSolutions;
  }

  if (three) {
    varalg::CriticalSearchConfig scfg;
    scfg.radius = radius;
    scfg.multistart = cfg;
    const auto points = varalg::find_critical_points(problem, lambda, scfg);
    json all = json::array();
    int nontrivial = 0;
    for (const auto& cp : points) {
      all.push_back(varalg::to_json(cp));
      if (cp.nontrivial) ++nontrivial;
    }
    out["critical_points"] = all;
    out["distinct_count"] = points.size();
    out["nontrivial_count"] = nontrivial;
    if (gamma > 0 && delta > 0) {
      const auto rep = varalg::three_solution_report(problem, gamma, delta, h);
      out["thresholds"] = varalg::to_json(rep);
      bool in_interval = false;
      if (rep.interval_lambda1)
        in_interval = lambda > rep.interval_lambda1->first &&
                      lambda < rep.interval_lambda1->second;
      out["lambda_in_interval"] = in_interval;
      out["three_found"] = points.size() >= 3;
    }
  }

  (void)format;
  emit(out.dump(2), out_path);
  return exit_code;
}

int run_sweep(const std::string& problem_path, const std::string& lambdas_spec,
              bool fit, std::uint64_t seed, const std::string& format,
              const std::string& out_path) {
  varalg::Problem problem = varalg::load_problem_file(problem_path);
  const std::vector<double> lambdas = parse_lambdas(lambdas_spec);
  varalg::MultistartConfig cfg;
  cfg.seed = seed;
  const varalg::SweepResult sweep =
      varalg::lambda_sweep(problem, lambdas, fit, cfg);

  if (format == "json") {
    emit(varalg::to_json(sweep).dump(2), out_path);
    return kExitOk;
  }

  std::ostringstream csv;
  csv << "lambda,min_norm,mp_energy,n_solutions,status,slope_fit\n";
  for (const auto& rec : sweep.records) {
    csv << fmt(rec.lambda) << ',';
    if (std::isfinite(rec.min_norm)) csv << fmt(rec.min_norm);
    csv << ',';
    if (std::isfinite(rec.mp_energy)) csv << fmt(rec.mp_energy);
    csv << ',' << rec.solutions.size() << ',' << rec.status << ",\n";
  }
  if (sweep.fit) {
    csv << "# slope_fit slope=" << fmt(sweep.fit->slope)
        << " r2=" << fmt(sweep.fit->r_squared);
    if (sweep.fit->q) csv << " q=" << fmt(*sweep.fit->q);
    if (sweep.fit->slope_bound) csv << " bound=" << fmt(*sweep.fit->slope_bound);
    csv << " pass=" << (sweep.fit->pass ? 1 : 0) << "\n";
  }
  emit(csv.str(), out_path);
  return kExitOk;
}

int run_oracle(const std::string& problem_path, double lambda, double radius,
               int steps, const std::string& out_path) {
  varalg::Problem problem = varalg::load_problem_file(problem_path);
  varalg::GridSpec grid{radius, steps};
  const auto points = varalg::grid_critical_points(problem, lambda, grid);

  const varalg::EnergyModel model{problem, lambda};
  json out;
  out["lambda"] = lambda;
  json sols = json::array();
  for (const auto& u : points)
    sols.push_back(varalg::to_json(varalg::make_critical_point(model, u)));
  out["solutions"] = sols;
  emit(out.dump(2), out_path);
  return kExitOk;
}

// Headless property suite for CI: norm inequalities, oracle equivalence on
// the small catalog instances, and the sublevel ratio decay scan.
int run_verify(std::uint64_t seed) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> eig(0.1, 10.0);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      const int n = dim(rng);
      Eigen::MatrixXd g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
      const Eigen::MatrixXd q =
          Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
      Eigen::VectorXd d(n);
      for (int i = 0; i < n; ++i) d(i) = eig(rng);
      const varalg::SpdMatrix A =
          varalg::make_spd(q * d.asDiagonal() * q.transpose());
      Eigen::VectorXd u(n);
      for (int i = 0; i < n; ++i) u(i) = 10.0 * gauss(rng);
      const auto check = varalg::verify_norm_bounds(A, u);
      ok = check.lower_ok && check.upper_ok && check.infnorm_ok;
    }
    report("norm inequalities on 1000 random SPD pairs", ok);
  }

  {
    bool ok = true;
    varalg::Problem reduced = varalg::make_problem(
        varalg::make_spd(Eigen::MatrixXd::Constant(1, 1, 2.0)),
        varalg::catalog_make("ex42_logistic_log", {{"n", 1}}));
    for (double lambda : {3.0, 4.0, 6.0, 9.0, 13.0}) {
      const auto oracle_pts = varalg::grid_critical_points(
          reduced, lambda, varalg::GridSpec{60.0, 2001});
      varalg::CriticalSearchConfig scfg;
      scfg.radius = 60.0;
      const auto solver_pts =
          varalg::find_critical_points(reduced, lambda, scfg);
      double hausdorff = 0.0;
      for (const auto& a : oracle_pts) {
        double best = 1e300;
        for (const auto& b : solver_pts)
          best = std::min(best, (a - b.u).norm());
        hausdorff = std::max(hausdorff, best);
      }
      for (const auto& b : solver_pts) {
        if (b.u.cwiseAbs().maxCoeff() > 60.0) continue;
        double best = 1e300;
        for (const auto& a : oracle_pts)
          best = std::min(best, (a - b.u).norm());
        hausdorff = std::max(hausdorff, best);
      }
      ok = ok && hausdorff < 1e-4;
    }
    report("oracle equivalence (1-d logistic-log reduction, 5 lambdas)", ok);
  }

  {
    varalg::Problem ex42 = varalg::build_lattice(
        varalg::rectangle_net(2, 2),
        varalg::catalog_make("ex42_logistic_log", {{"n", 4}}));
    const varalg::RatioScan scan = varalg::sublevel_ratio_scan(ex42, 8);
    const double first = scan.entries.front().second;
    const double last = scan.entries.back().second;
    bool monotone = true;
    for (std::size_t i = scan.entries.size() - 4; i + 1 < scan.entries.size();
         ++i)
      monotone = monotone &&
                 scan.entries[i + 1].second < scan.entries[i].second;
    report("sublevel ratio decay scan (2x2 lattice)",
           last < 1e-3 * first && monotone && !scan.hypothesis_warning);
  }

  return failures == 0 ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational analysis and solution of A u = lambda f(u)"};
  app.require_subcommand(1);

  std::string problem_path, lambdas_spec, format = "json", out_path;
  double lambda = 0.0, gamma = 0.0, delta = 0.0, hh = 2.0;
  double abar_eps = 0.0, radius = 10.0, tol_residual = 0.0;
  std::uint64_t seed = 12345;
  int steps = 201;
  bool three = false, no_fit = false;

  auto add_common = [&](CLI::App* cmd, bool needs_problem) {
    if (needs_problem)
      cmd->add_option("--problem", problem_path, "problem JSON file")
          ->required();
    cmd->add_option("--format", format, "json|csv|table");
    cmd->add_option("--out", out_path, "write output to a file");
    cmd->add_option("--seed", seed, "seed for randomized starts");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "thresholds and verdicts");
  add_common(analyze, true);
  analyze->add_option("--gamma", gamma, "three-solution input gamma > 0");
  analyze->add_option("--delta", delta, "three-solution input delta > 0");
  analyze->add_option("--h", hh, "three-solution input h > 1");
  analyze->add_option("--abar-eps", abar_eps,
                      "compute abar with this epsilon in (0,1)");

  CLI::App* solve = app.add_subcommand("solve", "two-solution search");
  add_common(solve, true);
  solve->add_option("--lambda", lambda, "parameter lambda > 0")->required();
  solve->add_flag("--three", three, "also enumerate critical points");
  solve->add_option("--gamma", gamma, "three-solution input gamma");
  solve->add_option("--delta", delta, "three-solution input delta");
  solve->add_option("--h", hh, "three-solution input h");
  solve->add_option("--radius", radius, "critical point search radius");
  solve->add_option("--tol-residual", tol_residual, "residual acceptance");

  CLI::App* sweep = app.add_subcommand("sweep", "lambda sweep with slope fit");
  add_common(sweep, true);
  sweep
      ->add_option("--lambdas", lambdas_spec,
                   "geometric range lo:hi:count or comma list")
      ->required();
  sweep->add_flag("--no-fit", no_fit, "skip the slope fit");

  CLI::App* oracle = app.add_subcommand("oracle", "grid reference search");
  add_common(oracle, true);
  oracle->add_option("--lambda", lambda, "parameter lambda > 0")->required();
  oracle->add_option("--radius", radius, "grid radius");
  oracle->add_option("--steps", steps, "grid steps per axis");

  CLI::App* verify = app.add_subcommand("verify", "headless property suite");
  verify->add_option("--seed", seed, "seed for randomized trials");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return run_analyze(problem_path, gamma, delta, hh, abar_eps, format,
                         out_path);
    if (solve->parsed())
      return run_solve(problem_path, lambda, three, gamma, delta, hh, radius,
                       seed, tol_residual, format, out_path);
    if (sweep->parsed()) {
      // Sweeps default to CSV; --format json switches to the report shape.
      const std::string sweep_format = sweep->count("--format") ? format : "csv";
      return run_sweep(problem_path, lambdas_spec, !no_fit, seed, sweep_format,
                       out_path);
    }
    if (oracle->parsed())
      return run_oracle(problem_path, lambda, radius, steps, out_path);
    if (verify->parsed()) return run_verify(seed);
  } catch (const varalg::NonpositiveSup& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const varalg::InfeasibleInterval& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const varalg::OnlyTrivialFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoSolutions;
  } catch (const varalg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

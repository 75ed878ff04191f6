#include "varalg/problem_io.hpp"

#include <cmath>
#include <fstream>

namespace varalg {

using nlohmann::json;

namespace {

Eigen::MatrixXd dense_rows(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw BadParams("problem file: dense matrix needs a nonempty 'rows' array");
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
      throw BadParams("problem file: dense row " + std::to_string(i) +
                      " is not length " + std::to_string(n));
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

Nonlinearity nonlinearity_from_json(const json& spec, int n) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw BadParams("problem file: nonlinearity needs a 'kind'");
  const std::string kind = spec["kind"].get<std::string>();
  if (kind == "expr") {
    if (!spec.contains("per_component"))
      throw BadParams("problem file: expr nonlinearity needs 'per_component'");
    std::vector<std::string> exprs;
    for (const auto& e : spec["per_component"])
      exprs.push_back(e.get<std::string>());
    if (exprs.size() == 1 && n > 1) exprs.resize(n, exprs[0]);
    return catalog_make_expr(exprs);
  }
  std::map<std::string, double> params;
  if (spec.contains("params"))
    for (auto it = spec["params"].begin(); it != spec["params"].end(); ++it)
      params[it.key()] = it.value().get<double>();
  if (!params.count("n")) params["n"] = n;
  return catalog_make(kind, params);
}

}  // namespace

Problem load_problem(const json& doc) {
  if (!doc.is_object() || !doc.contains("matrix") ||
      !doc.contains("nonlinearity"))
    throw BadParams("problem file: top level needs 'matrix' and 'nonlinearity'");

  const json& mspec = doc["matrix"];

  // matrix first (fixes n), then the nonlinearity
  if (mspec.is_string()) {
    const TridiagonalSpec t = parse_tridiagonal_text(mspec.get<std::string>());
    Nonlinearity f = nonlinearity_from_json(doc["nonlinearity"], t.n);
    return build_tridiagonal(t.n, t.a, t.b, std::move(f));
  }
  if (!mspec.is_object() || !mspec.contains("kind"))
    throw BadParams("problem file: matrix needs a 'kind' or a \"n a b\" string");
  const std::string kind = mspec["kind"].get<std::string>();

  if (kind == "tridiagonal") {
    const int n = mspec.at("n").get<int>();
    const double a = mspec.at("a").get<double>();
    const double b = mspec.at("b").get<double>();
    Nonlinearity f = nonlinearity_from_json(doc["nonlinearity"], n);
    return build_tridiagonal(n, a, b, std::move(f));
  }
  if (kind == "fourth_order") {
    const int n = mspec.at("n").get<int>();
    Nonlinearity f = nonlinearity_from_json(doc["nonlinearity"], n);
    return build_fourth_order(n, std::move(f));
  }
  if (kind == "lattice") {
    Net net;
    if (mspec.contains("rect")) {
      const auto& r = mspec["rect"];
      net = rectangle_net(r.at(0).get<int>(), r.at(1).get<int>());
    } else if (mspec.contains("points")) {
      std::vector<Net::Point> pts;
      for (const auto& p : mspec["points"])
        pts.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
      net = make_net(std::move(pts));
    } else {
      throw BadParams("problem file: lattice needs 'rect' or 'points'");
    }
    Nonlinearity f = nonlinearity_from_json(doc["nonlinearity"], net.size());
    return build_lattice(net, std::move(f));
  }
  if (kind == "dense") {
    Eigen::MatrixXd m = dense_rows(mspec.at("rows"));
    Nonlinearity f =
        nonlinearity_from_json(doc["nonlinearity"], static_cast<int>(m.rows()));
    return make_problem(make_spd(m), std::move(f));
  }
  throw BadParams("problem file: unknown matrix kind '" + kind + "'");
}

Problem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadParams("cannot open problem file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw BadParams("problem file '" + path + "': " + e.what());
  }
  return load_problem(doc);
}

std::string classification_name(const Classification& c) {
  switch (c.type) {
    case PointType::local_min: return "local_min";
    case PointType::saddle: return "saddle";
    case PointType::local_max: return "local_max";
    case PointType::degenerate: return "degenerate";
  }
  return "?";
}

json to_json(const CriticalPoint& cp) {
  json out;
  out["u"] = std::vector<double>(cp.u.data(), cp.u.data() + cp.u.size());
  out["lambda"] = cp.lambda;
  out["residual"] = cp.residual;
  out["energy"] = cp.energy;
  out["classification"] = classification_name(cp.classification);
  out["hessian_index"] = cp.classification.index;
  out["nontrivial"] = cp.nontrivial;
  out["nonnegative"] = cp.nonnegative;
  out["strictly_positive"] = cp.strictly_positive;
  return out;
}

json to_json(const HypothesisVerdict& hv) {
  json out;
  out["h1"] = to_string(hv.h1);
  out["h1_decade_max"] = hv.h1_decade_max;
  out["h1_star"] = to_string(hv.h1_star);
  out["q"] = hv.q;
  out["c"] = hv.c;
  json nus = json::array();
  for (const auto& [nu, v] : hv.h2_by_nu)
    nus.push_back({{"nu0", nu}, {"verdict", to_string(v)}});
  out["h2"] = to_string(hv.h2);
  out["h2_by_nu"] = nus;
  out["h2_prime"] = to_string(hv.h2_prime);
  out["h2_prime_decade_max"] = hv.h2_prime_decade_max;
  out["g3"] = to_string(hv.g3);
  out["g3_limsup_estimate"] = hv.g3_limsup_estimate;
  out["g3_bound"] = hv.g3_bound;
  return out;
}

namespace {

json finite_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

json to_json(const ThresholdReport& rep) {
  json out;
  if (rep.lambda_star) out["lambda_star"] = *rep.lambda_star;
  if (rep.abar)
    out["abar"] = {{"value", rep.abar->abar},
                   {"epsilon", rep.abar->epsilon},
                   {"rho", rep.abar->rho}};
  if (rep.gamma > 0) {
    out["gamma"] = rep.gamma;
    out["delta"] = rep.delta;
    out["h"] = rep.h;
    out["r"] = rep.r;
    out["eta"] = rep.eta;
    out["g1_holds"] = rep.g1_holds;
    out["g2_holds"] = rep.g2_holds;
    out["g1_margin"] = rep.g1_margin;
    out["g2_margin"] = rep.g2_margin;
    out["sum_F_delta"] = rep.sum_F_delta;
    out["sum_max_F_gamma"] = rep.sum_max_F_gamma;
    out["feasibility"] = rep.feasibility == Feasibility::ok ? "ok"
                       : rep.feasibility == Feasibility::infeasible_g1
                           ? "infeasible_g1"
                           : "infeasible_g2";
    if (rep.lambda1_star) out["lambda1_star"] = finite_or_inf(*rep.lambda1_star);
    if (rep.lambda2_star) out["lambda2_star"] = finite_or_inf(*rep.lambda2_star);
    if (rep.lambda3h_star)
      out["lambda3h_star"] = finite_or_inf(*rep.lambda3h_star);
    if (rep.interval_lambda1)
      out["interval_lambda1"] = {finite_or_inf(rep.interval_lambda1->first),
                                 finite_or_inf(rep.interval_lambda1->second)};
  }
  out["hypotheses"] = to_json(rep.hypothesis_verdicts);
  return out;
}

json to_json(const SweepResult& sweep) {
  json out;
  json recs = json::array();
  for (const SweepRecord& r : sweep.records) {
    json rec;
    rec["lambda"] = r.lambda;
    rec["status"] = r.status;
    if (std::isfinite(r.min_norm)) rec["min_norm"] = r.min_norm;
    if (std::isfinite(r.mp_energy)) rec["mp_energy"] = r.mp_energy;
    json sols = json::array();
    for (const CriticalPoint& cp : r.solutions) sols.push_back(to_json(cp));
    rec["solutions"] = sols;
    recs.push_back(rec);
  }
  out["records"] = recs;
  if (sweep.fit) {
    json f;
    f["slope"] = sweep.fit->slope;
    f["r_squared"] = sweep.fit->r_squared;
    if (sweep.fit->q) f["q"] = *sweep.fit->q;
    if (sweep.fit->slope_bound) f["slope_bound"] = *sweep.fit->slope_bound;
    f["pass"] = sweep.fit->pass;
    out["slope_fit"] = f;
  }
  return out;
}

json spectral_summary(const Problem& problem) {
  const SpdMatrix& A = problem.matrix;
  json out;
  out["n"] = A.n();
  out["spectrum"] =
      std::vector<double>(A.spectrum().data(), A.spectrum().data() + A.n());
  out["lambda_1"] = A.lambda_min();
  out["lambda_n"] = A.lambda_max();
  out["ones_form"] = A.ones_form();
  const SignConditionVerdict sign = check_sign_conditions(A);
  out["sign_conditions"] = {{"a1", sign.a1_holds}, {"a2", sign.a2_holds}};
  return out;
}

}  // namespace varalg

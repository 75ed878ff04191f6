#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "varalg/exprfn.hpp"
#include "varalg/nonlin.hpp"

using namespace varalg;

TEST_CASE("primitive_value: logistic-log closed form and quadrature agree") {
  const Nonlinearity cat = catalog_make("ex42_logistic_log", {{"n", 1}});
  const double expected = std::log(2.0) - 2.0 + M_PI / 2.0;  // F(1)
  CHECK(primitive_value(cat.components[0], 1.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.263944).epsilon(1e-5));

  // quadrature route (expression entry has no closed form)
  const Nonlinearity expr =
      catalog_make_expr({"piece{ s > 0 => log(1 + s^2), else => 0 }"});
  CHECK(std::abs(primitive_value(expr.components[0], 1.0) - expected) < 1e-9);
}

TEST_CASE("primitive_value: t = 0 and sqrt catalog values") {
  const Nonlinearity g = catalog_make("ex37_sqrt", {{"n", 2}});
  CHECK(primitive_value(g.components[0], 0.0) == 0.0);
  CHECK(primitive_value(g.components[0], 2.0) == 0.0);
  CHECK(primitive_value(g.components[0], 3.0) == doctest::Approx(2.0 / 3.0));
  CHECK(primitive_value(g.components[1], 3.0) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("catalog closed forms match quadrature on random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pt(-10.0, 10.0);
  for (const char* name : {"ex42_logistic_log", "ex37_sqrt", "rational_sq"}) {
    const Nonlinearity cat = catalog_make(name, {{"n", 2}});
    for (const ScalarFunction& f : cat.components) {
      ScalarFunction numeric = f;
      numeric.primitive = nullptr;  // force the quadrature path
      for (int i = 0; i < 50; ++i) {
        const double t = pt(rng);
        CHECK(std::abs(primitive_value(f, t) - primitive_value(numeric, t)) <
              1e-8);
      }
    }
  }
}

TEST_CASE("primitive_value is additive along chained intervals") {
  const Nonlinearity expr = catalog_make_expr({"s^2/(1+s^2)"});
  const ScalarFunction& f = expr.components[0];
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pt(-8.0, 8.0);
  for (int i = 0; i < 30; ++i) {
    const double t1 = pt(rng);
    const double t = pt(rng);
    const double direct = primitive_value(f, t);
    // int_{t1}^{t} f integrated independently through a shifted integrand
    ScalarFunction shifted;
    shifted.eval = [&f, t1](double x) { return f.eval(x + t1); };
    const double middle = primitive_value(shifted, t - t1);
    CHECK(std::abs(primitive_value(f, t1) + middle - direct) < 1e-9);
  }
}

TEST_CASE("derivative_value: closed forms and sentinels") {
  const Nonlinearity rat = catalog_make("rational_sq", {{"n", 1}});
  CHECK(*derivative_value(rat.components[0], 2.0) == doctest::Approx(0.16));

  const Nonlinearity lin = catalog_make_expr({"s"});
  for (double s : {-3.0, 0.0, 7.5})
    CHECK(*derivative_value(lin.components[0], s) ==
          doctest::Approx(1.0).epsilon(1e-9));

  // unbounded right derivative of sqrt(s-2) at s = 2: sentinel
  const Nonlinearity g = catalog_make("ex37_sqrt", {{"n", 1}});
  CHECK_FALSE(derivative_value(g.components[0], 2.0).has_value());
  CHECK(*derivative_value(g.components[0], 3.0) == doctest::Approx(0.5));

  // same through the finite-difference path
  ScalarFunction numeric = g.components[0];
  numeric.derivative = nullptr;
  CHECK_FALSE(derivative_value(numeric, 2.0).has_value());
  CHECK(*derivative_value(numeric, 3.0) == doctest::Approx(0.5).epsilon(1e-5));

  const Nonlinearity pw = catalog_make("power", {{"n", 1}, {"q", 0.5}});
  CHECK_FALSE(derivative_value(pw.components[0], 0.0).has_value());
}

TEST_CASE("probe_hypotheses: rational_sq passes the full slate") {
  const Nonlinearity F = catalog_make("rational_sq", {{"n", 2}});
  const HypothesisVerdict v = probe_hypotheses(F, 1.0);
  CHECK(v.h1 == Verdict::pass);
  CHECK(v.h2_prime == Verdict::pass);
  CHECK(v.g3 == Verdict::pass);
  bool nu_15 = false;
  for (const auto& [nu, verdict] : v.h2_by_nu)
    if (nu == 1.5) nu_15 = verdict == Verdict::pass;
  CHECK(nu_15);
  CHECK(v.h2 == Verdict::pass);
}

TEST_CASE("probe_hypotheses: linear f fails at infinity and at zero") {
  const Nonlinearity F = catalog_make_expr({"s"});
  const HypothesisVerdict v = probe_hypotheses(F, 1.0);
  CHECK(v.h1 == Verdict::fail);
  CHECK(v.h2_prime == Verdict::fail);
}

TEST_CASE("probe_hypotheses: ex41 passes h2' but fails h2 for every nu0") {
  const Nonlinearity F = catalog_make("ex41_log", {{"n", 2}});
  const HypothesisVerdict v = probe_hypotheses(F, 1.0);
  CHECK(v.h2_prime == Verdict::pass);
  CHECK(v.h2 == Verdict::fail);
  for (const auto& [nu, verdict] : v.h2_by_nu) CHECK(verdict == Verdict::fail);
}

TEST_CASE("probe_hypotheses: power family fits q within 0.05") {
  for (double q : {0.3, 0.5, 0.7}) {
    const Nonlinearity F = catalog_make("power", {{"n", 1}, {"q", q}});
    const HypothesisVerdict v = probe_hypotheses(F, 1.0);
    CHECK(v.h1 == Verdict::pass);
    CHECK(v.h1_star == Verdict::pass);
    CHECK(std::abs(v.q - q) < 0.05);
    CHECK(v.c > 0.0);
  }
}

TEST_CASE("catalog_make: shapes, values, and errors") {
  const Nonlinearity four = catalog_make("ex42_logistic_log", {{"n", 4}});
  CHECK(four.size() == 4);
  for (const ScalarFunction& f : four.components) {
    CHECK(f.eval(1.0) == doctest::Approx(std::log(2.0)));
    CHECK(f.eval(-1.0) == 0.0);
  }

  const Nonlinearity pw = catalog_make("power", {{"n", 1}, {"q", 0.5}});
  CHECK(pw.components[0].eval(4.0) == doctest::Approx(2.0));
  CHECK(pw.components[0].eval(-4.0) == doctest::Approx(-2.0));
  CHECK(primitive_value(pw.components[0], 4.0) ==
        doctest::Approx((2.0 / 3.0) * 8.0));  // (2/3) |t|^{3/2}
  CHECK(primitive_value(pw.components[0], -4.0) ==
        doctest::Approx((2.0 / 3.0) * 8.0));

  CHECK_THROWS_AS(catalog_make("no_such_family", {}), UnknownCatalogName);
  CHECK_THROWS_AS(catalog_make("power", {{"n", 1}}), BadParams);
  CHECK_THROWS_AS(catalog_make("power", {{"n", 1}, {"q", -1.0}}), BadParams);
  CHECK_THROWS_AS(catalog_make("rational_sq", {{"n", 0.5}}), BadParams);
  CHECK_THROWS_AS(catalog_make("custom_expr", {{"n", 1}}), BadParams);
}

TEST_CASE("catalog_make_expr: totality is probed") {
  CHECK_THROWS_AS(catalog_make_expr({"log(s)"}), BadParams);  // -inf at 0-
  CHECK_NOTHROW(catalog_make_expr({"piece{ s > 0 => log(s+1), else => 0 }"}));
}

TEST_CASE("primitive consistency: d/dt of the closed form reproduces f") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> pt(-10.0, 10.0);
  for (const char* name : {"ex42_logistic_log", "rational_sq", "ex37_sqrt"}) {
    const Nonlinearity cat = catalog_make(name, {{"n", 1}});
    const ScalarFunction& f = cat.components[0];
    CHECK(f.primitive(0.0) == 0.0);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 100; ++i) {
      const double t = pt(rng);
      bool near_kink = false;
      for (double k : f.kinks) near_kink |= std::abs(t - k) < 1e-3;
      if (near_kink) continue;
      ++checked;
      const double h = 1e-6;
      const double fd = (f.primitive(t + h) - f.primitive(t - h)) / (2.0 * h);
      CHECK(std::abs(fd - f.eval(t)) <= 1e-6 + 1e-6 * std::abs(f.eval(t)));
    }
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "varalg/exprfn.hpp"

using namespace varalg;

TEST_CASE("parse/compile: basic arithmetic and functions") {
  CHECK(compile(parse("s^2/(1+s^2)")).eval(2.0) == doctest::Approx(0.8));
  CHECK(compile(parse("2+3*4^2")).eval(0.0) == doctest::Approx(50.0));
  CHECK(std::abs(compile(parse("atan(s)")).eval(1.0) - M_PI / 4.0) < 1e-15);
  CHECK(compile(parse("s")).eval(3.5) == 3.5);
  CHECK(compile(parse("min(s, 2) + max(s, 2)")).eval(7.0) == 9.0);
  CHECK(compile(parse("2^3^2")).eval(0.0) == 512.0);  // right-associative
  CHECK(compile(parse("-2^2")).eval(0.0) == -4.0);    // ^ binds over unary -
  CHECK(compile(parse("2^-2")).eval(0.0) == 0.25);
}

TEST_CASE("parse: piecewise matches the sqrt catalog branch") {
  const ScalarFunction g1 = compile(parse("piece{ s >= 2 => sqrt(s-2), else => 0 }"));
  CHECK(g1.eval(6.0) == doctest::Approx(2.0));
  CHECK(g1.eval(1.0) == 0.0);
  CHECK(g1.eval(2.0) == 0.0);
}

TEST_CASE("parse: piecewise log expression equals the catalog entry") {
  const ScalarFunction a = compile(parse("piece{ s > 0 => log(1 + s^2), else => 0 }"));
  const Nonlinearity cat = catalog_make("ex42_logistic_log", {{"n", 1}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pt(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double s = pt(rng);
    CHECK(std::abs(a.eval(s) - cat.components[0].eval(s)) <=
          1e-12 * (1.0 + std::abs(cat.components[0].eval(s))));
  }
}

TEST_CASE("parse: errors carry positions") {
  CHECK_THROWS_AS(parse(""), SyntaxError);
  try {
    parse("2 + * 3");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position == 4);
  }
  CHECK_THROWS_AS(parse("foo(s)"), UnknownFunction);
  CHECK_THROWS_AS(parse("s + x"), UnknownVariable);
  CHECK_THROWS_AS(parse("log + 1"), UnknownVariable);
  CHECK_THROWS_AS(parse("2s"), SyntaxError);  // no implicit multiplication
  CHECK_THROWS_AS(parse("piece{ s > 0 => 1 }"), SyntaxError);  // missing else
  CHECK_THROWS_AS(parse("min(s)"), SyntaxError);               // arity
  CHECK_THROWS_AS(parse("(1+2"), SyntaxError);
}

TEST_CASE("compile: domain violations become quiet non-finite values") {
  CHECK(std::isnan(compile(parse("log(s)")).eval(-1.0)));
  CHECK(std::isinf(compile(parse("1/s")).eval(0.0)));
  CHECK(std::isnan(compile(parse("sqrt(s)")).eval(-4.0)));
  // guarded by a piecewise condition the same inputs are fine
  CHECK(compile(parse("piece{ s > 0 => log(s), else => 0 }")).eval(-1.0) == 0.0);
}

namespace {

// Random AST over the grammar, depth-bounded; number literals nonnegative
// (as produced by the lexer).
ExprPtr random_ast(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  std::uniform_real_distribution<double> num(0.0, 8.0);
  auto node = std::make_shared<ExprAst>();
  switch (pick(rng)) {
    case 0:
      node->kind = ExprAst::Kind::number;
      node->number = num(rng);
      return node;
    case 1:
      node->kind = ExprAst::Kind::variable;
      return node;
    case 2:
      node->kind = ExprAst::Kind::neg;
      node->children = {random_ast(rng, depth - 1)};
      return node;
    case 3: {
      node->kind = ExprAst::Kind::binary;
      const char ops[] = {'+', '-', '*', '/', '^'};
      node->op = ops[std::uniform_int_distribution<int>(0, 4)(rng)];
      node->children = {random_ast(rng, depth - 1), random_ast(rng, depth - 1)};
      return node;
    }
    case 4: {
      node->kind = ExprAst::Kind::call;
      const char* fns[] = {"log", "exp", "sqrt", "atan", "abs", "sign", "min", "max"};
      const int f = std::uniform_int_distribution<int>(0, 7)(rng);
      node->func = fns[f];
      node->children = {random_ast(rng, depth - 1)};
      if (f >= 6) node->children.push_back(random_ast(rng, depth - 1));
      return node;
    }
    default: {
      node->kind = ExprAst::Kind::piecewise;
      const char* cmps[] = {"<", "<=", ">", ">=", "==", "!="};
      const int clauses = std::uniform_int_distribution<int>(1, 2)(rng);
      for (int c = 0; c < clauses; ++c) {
        PieceClause cl;
        cl.lhs = random_ast(rng, depth - 1);
        cl.cmp = cmps[std::uniform_int_distribution<int>(0, 5)(rng)];
        cl.rhs = random_ast(rng, depth - 1);
        cl.value = random_ast(rng, depth - 1);
        node->clauses.push_back(std::move(cl));
      }
      node->else_branch = random_ast(rng, depth - 1);
      return node;
    }
  }
}

}  // namespace

TEST_CASE("canonical print round-trips the AST") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const ExprPtr ast = random_ast(rng, 4);
    const std::string printed = canonical_print(*ast);
    const ExprPtr again = parse(printed);
    REQUIRE(*again == *ast);
    CHECK(canonical_print(*again) == printed);
  }
  // and on parsed sources: parse . print . parse == parse
  for (const char* src :
       {"piece{ s > 0 => log(1 + s^2), else => 0 }", "2+3*4^2",
        "-s^2 + min(s, 1e-3)/max(abs(s), 2)"}) {
    const ExprPtr once = parse(src);
    CHECK(*parse(canonical_print(*once)) == *once);
  }
}

TEST_CASE("compiled program is bit-identical to direct interpretation") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> pt(-10.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const ExprPtr ast = random_ast(rng, 5);
    const ScalarFunction f = compile(ast);
    for (int i = 0; i < 10; ++i) {
      const double s = pt(rng);
      const double direct = evaluate(*ast, s);
      const double compiled = f.eval(s);
      if (std::isnan(direct)) {
        CHECK(std::isnan(compiled));
      } else {
        CHECK(direct == compiled);  // bit-for-bit
      }
    }
  }
}

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "varalg/nonlin.hpp"

namespace varalg {

// Arithmetic expression AST in one free variable named s.
//
// Grammar (whitespace-insensitive):
//   expr      := term (('+'|'-') term)*
//   term      := factor (('*'|'/') factor)*
//   factor    := '-' factor | base ('^' factor)?
//   base      := number | 's' | func '(' expr (',' expr)? ')' | '(' expr ')'
//              | piecewise
//   piecewise := 'piece' '{' (cmp '=>' expr ',')* 'else' '=>' expr '}'
//   cmp       := expr ('<'|'<='|'>'|'>='|'=='|'!=') expr
//
// '^' is right-associative; precedence ^ > unary - > * / > + -.
// Functions: log, exp, sqrt, atan, abs, sign (unary), min, max (binary).
// No implicit multiplication: "2s" is a syntax error.
struct ExprAst;
using ExprPtr = std::shared_ptr<const ExprAst>;

struct PieceClause {
  ExprPtr lhs;
  std::string cmp;  // one of < <= > >= == !=
  ExprPtr rhs;
  ExprPtr value;
};

struct ExprAst {
  enum class Kind { number, variable, neg, binary, call, piecewise };
  Kind kind{};
  double number = 0.0;               // Kind::number
  char op = 0;                       // Kind::binary: + - * / ^
  std::string func;                  // Kind::call
  std::vector<ExprPtr> children;     // neg: 1, binary: 2, call: 1 or 2
  std::vector<PieceClause> clauses;  // Kind::piecewise
  ExprPtr else_branch;               // Kind::piecewise
};

bool operator==(const ExprAst& a, const ExprAst& b);
inline bool operator!=(const ExprAst& a, const ExprAst& b) { return !(a == b); }

// Throws SyntaxError (position + expected set), UnknownFunction,
// UnknownVariable.
ExprPtr parse(const std::string& src);

// Direct recursive interpretation of the AST.
double evaluate(const ExprAst& ast, double s);

// Canonical fully parenthesized form; parse(canonical_print(parse(x)))
// reproduces parse(x) node for node.
std::string canonical_print(const ExprAst& ast);

// Compiles to a flat stack program. Evaluation is the exact IEEE double
// composition of node semantics (bit-identical to evaluate()); domain
// violations produce quiet non-finite values. No closed-form primitive or
// derivative is attached.
ScalarFunction compile(const ExprPtr& ast);

}  // namespace varalg

#include "varalg/exprfn.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace varalg {

namespace {

// Shared node semantics so the interpreter and the compiled program are
// bit-identical.
inline double apply_binary(char op, double a, double b) {
  switch (op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/': return a / b;
    case '^': return std::pow(a, b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const std::array<std::string, 8> kFunctions = {"log", "exp", "sqrt", "atan",
                                               "abs", "sign", "min", "max"};

inline int function_id(const std::string& name) {
  for (int i = 0; i < static_cast<int>(kFunctions.size()); ++i)
    if (kFunctions[i] == name) return i;
  return -1;
}

inline int function_arity(int id) { return id >= 6 ? 2 : 1; }

inline double apply_call(int id, double a, double b) {
  switch (id) {
    case 0: return std::log(a);
    case 1: return std::exp(a);
    case 2: return std::sqrt(a);
    case 3: return std::atan(a);
    case 4: return std::fabs(a);
    case 5: return static_cast<double>((a > 0.0) - (a < 0.0));
    case 6: return std::fmin(a, b);
    case 7: return std::fmax(a, b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// IEEE comparison; NaN operands make < <= > >= == false and != true.
inline bool apply_compare(const std::string& op, double a, double b) {
  if (op == "<") return a < b;
  if (op == "<=") return a <= b;
  if (op == ">") return a > b;
  if (op == ">=") return a >= b;
  if (op == "==") return a == b;
  return a != b;  // !=
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  number, ident, plus, minus, star, slash, caret,
  lparen, rparen, lbrace, rbrace, comma, arrow,
  lt, le, gt, ge, eq, ne, end
};

struct Token {
  Tok kind;
  std::size_t pos;
  double number = 0.0;
  std::string text;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < n && src[i] == '.') {
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      Token t{Tok::number, start, 0.0, src.substr(start, i - start)};
      t.number = std::strtod(t.text.c_str(), nullptr);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      out.push_back({Tok::ident, start, 0.0, src.substr(start, i - start)});
      continue;
    }
    auto single = [&](Tok k) {
      out.push_back({k, start, 0.0, std::string(1, c)});
      ++i;
    };
    switch (c) {
      case '+': single(Tok::plus); break;
      case '-': single(Tok::minus); break;
      case '*': single(Tok::star); break;
      case '/': single(Tok::slash); break;
      case '^': single(Tok::caret); break;
      case '(': single(Tok::lparen); break;
      case ')': single(Tok::rparen); break;
      case '{': single(Tok::lbrace); break;
      case '}': single(Tok::rbrace); break;
      case ',': single(Tok::comma); break;
      case '<':
        if (i + 1 < n && src[i + 1] == '=') { out.push_back({Tok::le, start, 0.0, "<="}); i += 2; }
        else single(Tok::lt);
        break;
      case '>':
        if (i + 1 < n && src[i + 1] == '=') { out.push_back({Tok::ge, start, 0.0, ">="}); i += 2; }
        else single(Tok::gt);
        break;
      case '=':
        if (i + 1 < n && src[i + 1] == '>') { out.push_back({Tok::arrow, start, 0.0, "=>"}); i += 2; }
        else if (i + 1 < n && src[i + 1] == '=') { out.push_back({Tok::eq, start, 0.0, "=="}); i += 2; }
        else throw SyntaxError("syntax error at offset " + std::to_string(start) +
                               ": bare '=', expected '==' or '=>'", start, "== or =>");
        break;
      case '!':
        if (i + 1 < n && src[i + 1] == '=') { out.push_back({Tok::ne, start, 0.0, "!="}); i += 2; }
        else throw SyntaxError("syntax error at offset " + std::to_string(start) +
                               ": bare '!', expected '!='", start, "!=");
        break;
      default:
        throw SyntaxError("syntax error at offset " + std::to_string(start) +
                          ": unexpected character '" + std::string(1, c) + "'",
                          start, "token");
    }
  }
  out.push_back({Tok::end, n, 0.0, ""});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(const std::string& src) : tokens_(lex(src)) {}

  ExprPtr run() {
    ExprPtr e = parse_expr();
    expect(Tok::end, "end of input");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  Token take() { return tokens_[pos_++]; }
  bool at(Tok k) const { return peek().kind == k; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("syntax error at offset " + std::to_string(t.pos) +
                          ": expected " + expected + ", got " + got,
                      t.pos, expected);
  }

  void expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    ++pos_;
  }

  static ExprPtr make_binary(char op, ExprPtr a, ExprPtr b) {
    auto n = std::make_shared<ExprAst>();
    n->kind = ExprAst::Kind::binary;
    n->op = op;
    n->children = {std::move(a), std::move(b)};
    return n;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (at(Tok::plus) || at(Tok::minus)) {
      const char op = take().text[0];
      lhs = make_binary(op, lhs, parse_term());
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (at(Tok::star) || at(Tok::slash)) {
      const char op = take().text[0];
      lhs = make_binary(op, lhs, parse_factor());
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    if (at(Tok::minus)) {
      take();
      auto n = std::make_shared<ExprAst>();
      n->kind = ExprAst::Kind::neg;
      n->children = {parse_factor()};
      return n;
    }
    ExprPtr b = parse_base();
    if (at(Tok::caret)) {
      take();
      return make_binary('^', b, parse_factor());  // right-associative
    }
    return b;
  }

  ExprPtr parse_base() {
    if (at(Tok::number)) {
      Token t = take();
      auto n = std::make_shared<ExprAst>();
      n->kind = ExprAst::Kind::number;
      n->number = t.number;
      return n;
    }
    if (at(Tok::lparen)) {
      take();
      ExprPtr e = parse_expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (at(Tok::ident)) {
      Token t = take();
      if (t.text == "piece") return parse_piecewise();
      if (t.text == "s") {
        if (at(Tok::lparen))
          throw UnknownFunction("unknown function 's' at offset " +
                                    std::to_string(t.pos),
                                t.pos);
        auto n = std::make_shared<ExprAst>();
        n->kind = ExprAst::Kind::variable;
        return n;
      }
      const int fid = function_id(t.text);
      if (at(Tok::lparen)) {
        if (fid < 0)
          throw UnknownFunction("unknown function '" + t.text + "' at offset " +
                                    std::to_string(t.pos),
                                t.pos);
        take();  // '('
        auto n = std::make_shared<ExprAst>();
        n->kind = ExprAst::Kind::call;
        n->func = t.text;
        n->children.push_back(parse_expr());
        if (function_arity(fid) == 2) {
          expect(Tok::comma, "','");
          n->children.push_back(parse_expr());
        }
        expect(Tok::rparen, "')'");
        return n;
      }
      throw UnknownVariable("unknown variable '" + t.text + "' at offset " +
                                std::to_string(t.pos) +
                                " (the only variable is 's')",
                            t.pos);
    }
    fail("number, 's', function call, '(', '-' or 'piece'");
  }

  ExprPtr parse_piecewise() {
    auto n = std::make_shared<ExprAst>();
    n->kind = ExprAst::Kind::piecewise;
    expect(Tok::lbrace, "'{'");
    for (;;) {
      if (at(Tok::ident) && peek().text == "else") {
        take();
        expect(Tok::arrow, "'=>'");
        n->else_branch = parse_expr();
        expect(Tok::rbrace, "'}'");
        return n;
      }
      PieceClause clause;
      clause.lhs = parse_expr();
      if (at(Tok::lt) || at(Tok::le) || at(Tok::gt) || at(Tok::ge) ||
          at(Tok::eq) || at(Tok::ne)) {
        clause.cmp = take().text;
      } else {
        fail("comparison operator");
      }
      clause.rhs = parse_expr();
      expect(Tok::arrow, "'=>'");
      clause.value = parse_expr();
      expect(Tok::comma, "',' (an 'else' branch must close the piecewise)");
      n->clauses.push_back(std::move(clause));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Stack program

struct Instr {
  enum class Op : unsigned char {
    push_const, push_s, neg, binary, call, jz, jmp
  };
  Op op{};
  double value = 0.0;  // push_const
  char binop = 0;      // binary
  int a = 0;           // call: function id; jz/jmp: target pc
  std::string cmp;     // jz: comparison folded into the jump
};

struct Program {
  std::vector<Instr> code;
  std::size_t max_stack = 0;
};

void emit(Program& p, std::size_t& depth, const ExprAst& e);

void emit_clauses(Program& p, std::size_t& depth, const ExprAst& e) {
  std::vector<std::size_t> to_end;
  for (const PieceClause& c : e.clauses) {
    emit(p, depth, *c.lhs);
    emit(p, depth, *c.rhs);
    Instr jz;
    jz.op = Instr::Op::jz;
    jz.cmp = c.cmp;
    const std::size_t jz_at = p.code.size();
    p.code.push_back(jz);
    depth -= 2;
    emit(p, depth, *c.value);
    Instr jmp;
    jmp.op = Instr::Op::jmp;
    to_end.push_back(p.code.size());
    p.code.push_back(jmp);
    depth -= 1;  // branch value only lives on the taken path
    p.code[jz_at].a = static_cast<int>(p.code.size());
  }
  emit(p, depth, *e.else_branch);
  for (std::size_t at : to_end) p.code[at].a = static_cast<int>(p.code.size());
}

void emit(Program& p, std::size_t& depth, const ExprAst& e) {
  switch (e.kind) {
    case ExprAst::Kind::number: {
      Instr i;
      i.op = Instr::Op::push_const;
      i.value = e.number;
      p.code.push_back(i);
      p.max_stack = std::max(p.max_stack, ++depth);
      return;
    }
    case ExprAst::Kind::variable: {
      Instr i;
      i.op = Instr::Op::push_s;
      p.code.push_back(i);
      p.max_stack = std::max(p.max_stack, ++depth);
      return;
    }
    case ExprAst::Kind::neg: {
      emit(p, depth, *e.children[0]);
      Instr i;
      i.op = Instr::Op::neg;
      p.code.push_back(i);
      return;
    }
    case ExprAst::Kind::binary: {
      emit(p, depth, *e.children[0]);
      emit(p, depth, *e.children[1]);
      Instr i;
      i.op = Instr::Op::binary;
      i.binop = e.op;
      p.code.push_back(i);
      --depth;
      return;
    }
    case ExprAst::Kind::call: {
      for (const ExprPtr& c : e.children) emit(p, depth, *c);
      Instr i;
      i.op = Instr::Op::call;
      i.a = function_id(e.func);
      p.code.push_back(i);
      depth -= e.children.size() - 1;
      return;
    }
    case ExprAst::Kind::piecewise: {
      const std::size_t before = depth;
      emit_clauses(p, depth, e);
      depth = before + 1;
      return;
    }
  }
}

double run(const Program& p, double s) {
  std::vector<double> stack;
  stack.reserve(p.max_stack);
  std::size_t pc = 0;
  while (pc < p.code.size()) {
    const Instr& i = p.code[pc];
    switch (i.op) {
      case Instr::Op::push_const:
        stack.push_back(i.value);
        ++pc;
        break;
      case Instr::Op::push_s:
        stack.push_back(s);
        ++pc;
        break;
      case Instr::Op::neg:
        stack.back() = -stack.back();
        ++pc;
        break;
      case Instr::Op::binary: {
        const double b = stack.back();
        stack.pop_back();
        stack.back() = apply_binary(i.binop, stack.back(), b);
        ++pc;
        break;
      }
      case Instr::Op::call: {
        if (function_arity(i.a) == 2) {
          const double b = stack.back();
          stack.pop_back();
          stack.back() = apply_call(i.a, stack.back(), b);
        } else {
          stack.back() = apply_call(i.a, stack.back(), 0.0);
        }
        ++pc;
        break;
      }
      case Instr::Op::jz: {
        const double b = stack.back();
        stack.pop_back();
        const double a = stack.back();
        stack.pop_back();
        pc = apply_compare(i.cmp, a, b) ? pc + 1 : static_cast<std::size_t>(i.a);
        break;
      }
      case Instr::Op::jmp:
        pc = static_cast<std::size_t>(i.a);
        break;
    }
  }
  return stack.back();
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void print_node(std::string& out, const ExprAst& e) {
  switch (e.kind) {
    case ExprAst::Kind::number:
      if (std::signbit(e.number)) {
        // Negative literals only arise from programmatic ASTs; re-parsing
        // yields an equivalent neg node.
        out += "(-";
        format_double(out, -e.number);
        out += ')';
      } else {
        format_double(out, e.number);
      }
      return;
    case ExprAst::Kind::variable:
      out += 's';
      return;
    case ExprAst::Kind::neg:
      out += "(-";
      print_node(out, *e.children[0]);
      out += ')';
      return;
    case ExprAst::Kind::binary:
      out += '(';
      print_node(out, *e.children[0]);
      out += ' ';
      out += e.op;
      out += ' ';
      print_node(out, *e.children[1]);
      out += ')';
      return;
    case ExprAst::Kind::call:
      out += e.func;
      out += '(';
      print_node(out, *e.children[0]);
      if (e.children.size() > 1) {
        out += ", ";
        print_node(out, *e.children[1]);
      }
      out += ')';
      return;
    case ExprAst::Kind::piecewise:
      out += "piece{ ";
      for (const PieceClause& c : e.clauses) {
        print_node(out, *c.lhs);
        out += ' ';
        out += c.cmp;
        out += ' ';
        print_node(out, *c.rhs);
        out += " => ";
        print_node(out, *c.value);
        out += ", ";
      }
      out += "else => ";
      print_node(out, *e.else_branch);
      out += " }";
      return;
  }
}

}  // namespace

bool operator==(const ExprAst& a, const ExprAst& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprAst::Kind::number:
      return a.number == b.number;
    case ExprAst::Kind::variable:
      return true;
    case ExprAst::Kind::neg:
      return *a.children[0] == *b.children[0];
    case ExprAst::Kind::binary:
      return a.op == b.op && *a.children[0] == *b.children[0] &&
             *a.children[1] == *b.children[1];
    case ExprAst::Kind::call:
      if (a.func != b.func || a.children.size() != b.children.size())
        return false;
      for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!(*a.children[i] == *b.children[i])) return false;
      return true;
    case ExprAst::Kind::piecewise: {
      if (a.clauses.size() != b.clauses.size()) return false;
      for (std::size_t i = 0; i < a.clauses.size(); ++i) {
        const PieceClause& x = a.clauses[i];
        const PieceClause& y = b.clauses[i];
        if (x.cmp != y.cmp || !(*x.lhs == *y.lhs) || !(*x.rhs == *y.rhs) ||
            !(*x.value == *y.value))
          return false;
      }
      return *a.else_branch == *b.else_branch;
    }
  }
  return false;
}

ExprPtr parse(const std::string& src) {
  if (src.empty()) throw SyntaxError("empty expression", 0, "expression");
  return Parser(src).run();
}

double evaluate(const ExprAst& ast, double s) {
  switch (ast.kind) {
    case ExprAst::Kind::number:
      return ast.number;
    case ExprAst::Kind::variable:
      return s;
    case ExprAst::Kind::neg:
      return -evaluate(*ast.children[0], s);
    case ExprAst::Kind::binary:
      return apply_binary(ast.op, evaluate(*ast.children[0], s),
                          evaluate(*ast.children[1], s));
    case ExprAst::Kind::call: {
      const double a = evaluate(*ast.children[0], s);
      const double b =
          ast.children.size() > 1 ? evaluate(*ast.children[1], s) : 0.0;
      return apply_call(function_id(ast.func), a, b);
    }
    case ExprAst::Kind::piecewise:
      for (const PieceClause& c : ast.clauses) {
        if (apply_compare(c.cmp, evaluate(*c.lhs, s), evaluate(*c.rhs, s)))
          return evaluate(*c.value, s);
      }
      return evaluate(*ast.else_branch, s);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string canonical_print(const ExprAst& ast) {
  std::string out;
  print_node(out, ast);
  return out;
}

ScalarFunction compile(const ExprPtr& ast) {
  auto prog = std::make_shared<Program>();
  std::size_t depth = 0;
  emit(*prog, depth, *ast);

  ScalarFunction f;
  f.eval = [prog](double s) { return run(*prog, s); };
  f.label = canonical_print(*ast);
  return f;
}

}  // namespace varalg

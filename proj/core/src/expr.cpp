#include "ctl/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include "ctl/error.hpp"

namespace ctl {

namespace expr {

Expr number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Number;
  n->value = v;
  return n;
}

Expr pi() {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Pi;
  n->value = std::numbers::pi;
  return n;
}

Expr coord(int i) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Coord;
  n->coord = i;
  return n;
}

Expr neg(Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Neg;
  n->lhs = std::move(a);
  return n;
}

Expr binary(ExprKind k, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

Expr power(Expr base, double exponent) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Pow;
  n->lhs = std::move(base);
  n->value = exponent;
  return n;
}

Expr call(Func f, Expr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Call;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

}  // namespace expr

namespace {

struct FuncEntry {
  const char* name;
  Func func;
};

constexpr FuncEntry kFuncs[] = {
    {"exp", Func::Exp},   {"log", Func::Log},   {"sin", Func::Sin},   {"cos", Func::Cos},
    {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"sqrt", Func::Sqrt},
};

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coords)
      : s_(text), coords_(coords) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view s_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (accept('+')) e = expr::binary(ExprKind::Add, e, parse_product());
      else if (accept('-')) e = expr::binary(ExprKind::Sub, e, parse_product());
      else return e;
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) e = expr::binary(ExprKind::Mul, e, parse_unary());
      else if (accept('/')) e = expr::binary(ExprKind::Div, e, parse_unary());
      else return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return expr::neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    const double exponent = parse_exponent();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '^') fail("exponent must be a numeric literal");
    return expr::power(base, exponent);
  }

  double parse_exponent() {
    const bool paren = accept('(');
    const bool negative = accept('-');
    skip_ws();
    if (pos_ >= s_.size() || !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      fail("exponent must be a numeric literal");
    double v = parse_number();
    if (paren) expect(')');
    return negative ? -v : v;
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '.')) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
        pos_ = p;
      } else {
        pos_ = p;
        fail("malformed exponent in number");
      }
    }
    const std::string lit(s_.substr(start, pos_ - start));
    return std::strtod(lit.c_str(), nullptr);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return expr::number(parse_number());
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      for (const auto& f : kFuncs) {
        if (name == f.name) {
          if (!accept('(')) fail("function '" + name + "' needs an argument in parentheses");
          Expr arg = parse_sum();
          expect(')');
          return expr::call(f.func, arg);
        }
      }
      if (name == "pi") return expr::pi();
      for (std::size_t i = 0; i < coords_.size(); ++i)
        if (coords_[i] == name) return expr::coord(static_cast<int>(i));
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_rec(const Expr& e, const std::vector<std::string>& coords, std::string& out) {
  switch (e->kind) {
    case ExprKind::Number:
      if (e->value < 0 || std::signbit(e->value)) {
        out += "(-" + format_number(-e->value) + ")";
      } else {
        out += format_number(e->value);
      }
      return;
    case ExprKind::Pi: out += "pi"; return;
    case ExprKind::Coord:
      out += e->coord < static_cast<int>(coords.size()) ? coords[e->coord]
                                                         : "x" + std::to_string(e->coord + 1);
      return;
    case ExprKind::Neg:
      out += "(-";
      print_rec(e->lhs, coords, out);
      out += ")";
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
      const char* op = e->kind == ExprKind::Add   ? " + "
                       : e->kind == ExprKind::Sub ? " - "
                       : e->kind == ExprKind::Mul ? " * "
                                                  : " / ";
      out += "(";
      print_rec(e->lhs, coords, out);
      out += op;
      print_rec(e->rhs, coords, out);
      out += ")";
      return;
    }
    case ExprKind::Pow:
      out += "(";
      print_rec(e->lhs, coords, out);
      out += "^";
      if (e->value < 0) out += "(-" + format_number(-e->value) + ")";
      else out += format_number(e->value);
      out += ")";
      return;
    case ExprKind::Call:
      out += func_name(e->func);
      out += "(";
      print_rec(e->lhs, coords, out);
      out += ")";
      return;
  }
}

template <class T>
T apply_func(Func f, const T& a) {
  using std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh, std::sqrt;
  switch (f) {
    case Func::Exp: return exp(a);
    case Func::Log: return log(a);
    case Func::Sin: return sin(a);
    case Func::Cos: return cos(a);
    case Func::Sinh: return sinh(a);
    case Func::Cosh: return cosh(a);
    case Func::Sqrt: return sqrt(a);
  }
  throw DomainError("unknown function");
}

double eval_rec(const ExprNode& e, std::span<const double> p) {
  switch (e.kind) {
    case ExprKind::Number:
    case ExprKind::Pi: return e.value;
    case ExprKind::Coord:
      if (e.coord >= static_cast<int>(p.size())) throw ShapeError("coordinate index beyond point dimension");
      return p[e.coord];
    case ExprKind::Neg: return -eval_rec(*e.lhs, p);
    case ExprKind::Add: return eval_rec(*e.lhs, p) + eval_rec(*e.rhs, p);
    case ExprKind::Sub: return eval_rec(*e.lhs, p) - eval_rec(*e.rhs, p);
    case ExprKind::Mul: return eval_rec(*e.lhs, p) * eval_rec(*e.rhs, p);
    case ExprKind::Div: {
      const double d = eval_rec(*e.rhs, p);
      if (d == 0.0) throw DomainError("division by zero");
      return eval_rec(*e.lhs, p) / d;
    }
    case ExprKind::Pow: {
      const double b = eval_rec(*e.lhs, p);
      if (e.value != std::round(e.value) && !(b > 0.0))
        throw DomainError("non-integer power of a non-positive value");
      if (b == 0.0 && e.value < 0) throw DomainError("negative power of zero");
      return std::pow(b, e.value);
    }
    case ExprKind::Call: {
      const double a = eval_rec(*e.lhs, p);
      switch (e.func) {
        case Func::Log:
          if (!(a > 0.0)) throw DomainError("log of a non-positive value");
          return std::log(a);
        case Func::Sqrt:
          if (!(a > 0.0)) throw DomainError("sqrt of a non-positive value");
          return std::sqrt(a);
        default: return apply_func(e.func, a);
      }
    }
  }
  throw DomainError("malformed expression");
}

Jet eval_jet_rec(const ExprNode& e, std::span<const double> p, int order) {
  const int dim = static_cast<int>(p.size());
  switch (e.kind) {
    case ExprKind::Number:
    case ExprKind::Pi: return Jet::constant(e.value, dim, order);
    case ExprKind::Coord:
      if (e.coord >= dim) throw ShapeError("coordinate index beyond point dimension");
      return Jet::variable(p[e.coord], e.coord, dim, order);
    case ExprKind::Neg: return -eval_jet_rec(*e.lhs, p, order);
    case ExprKind::Add: return eval_jet_rec(*e.lhs, p, order) + eval_jet_rec(*e.rhs, p, order);
    case ExprKind::Sub: return eval_jet_rec(*e.lhs, p, order) - eval_jet_rec(*e.rhs, p, order);
    case ExprKind::Mul: return eval_jet_rec(*e.lhs, p, order) * eval_jet_rec(*e.rhs, p, order);
    case ExprKind::Div: {
      // Constant denominators are common in metric entries; skip the series division.
      if (e.rhs->kind == ExprKind::Number || e.rhs->kind == ExprKind::Pi) {
        if (e.rhs->value == 0.0) throw DomainError("division by zero");
        return eval_jet_rec(*e.lhs, p, order) / e.rhs->value;
      }
      return eval_jet_rec(*e.lhs, p, order) / eval_jet_rec(*e.rhs, p, order);
    }
    case ExprKind::Pow: return pow(eval_jet_rec(*e.lhs, p, order), e.value);
    case ExprKind::Call: {
      Jet a = eval_jet_rec(*e.lhs, p, order);
      return apply_func(e.func, a);
    }
  }
  throw DomainError("malformed expression");
}

}  // namespace

const char* func_name(Func f) {
  for (const auto& e : kFuncs)
    if (e.func == f) return e.name;
  return "?";
}

Expr parse_expr(std::string_view text, const std::vector<std::string>& coords) {
  return Parser(text, coords).run();
}

std::string print_expr(const Expr& e, const std::vector<std::string>& coords) {
  std::string out;
  print_rec(e, coords, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Number: return a->value == b->value;
    case ExprKind::Pi: return true;
    case ExprKind::Coord: return a->coord == b->coord;
    case ExprKind::Neg: return structurally_equal(a->lhs, b->lhs);
    case ExprKind::Pow: return a->value == b->value && structurally_equal(a->lhs, b->lhs);
    case ExprKind::Call: return a->func == b->func && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

int max_coord(const Expr& e) {
  if (!e) return -1;
  int m = e->kind == ExprKind::Coord ? e->coord : -1;
  return std::max({m, max_coord(e->lhs), max_coord(e->rhs)});
}

double eval_expr(const Expr& e, std::span<const double> point) { return eval_rec(*e, point); }

Jet eval_expr_jet(const Expr& e, std::span<const double> point, int order) {
  return eval_jet_rec(*e, point, order);
}

}  // namespace ctl

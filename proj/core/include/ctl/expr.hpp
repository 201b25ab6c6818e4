#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctl/jets.hpp"

namespace ctl {

enum class ExprKind { Number, Pi, Coord, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree. For Pow the exponent literal sits in `value`.
struct ExprNode {
  ExprKind kind = ExprKind::Number;
  double value = 0.0;
  int coord = -1;
  Func func = Func::Exp;
  Expr lhs;
  Expr rhs;
};

namespace expr {
Expr number(double v);
Expr pi();
Expr coord(int i);
Expr neg(Expr a);
Expr binary(ExprKind k, Expr a, Expr b);
Expr power(Expr base, double exponent);
Expr call(Func f, Expr arg);
}  // namespace expr

/// Parse with the given coordinate names. Throws ParseError with the byte
/// offset of the offending token.
Expr parse_expr(std::string_view text, const std::vector<std::string>& coords);

/// Fully parenthesised text that parses back to a structurally equal tree.
std::string print_expr(const Expr& e, const std::vector<std::string>& coords);

bool structurally_equal(const Expr& a, const Expr& b);

/// Largest coordinate index referenced, or -1.
int max_coord(const Expr& e);

double eval_expr(const Expr& e, std::span<const double> point);
/// Taylor jet of the expression about `point`.
Jet eval_expr_jet(const Expr& e, std::span<const double> point, int order);

const char* func_name(Func f);

}  // namespace ctl

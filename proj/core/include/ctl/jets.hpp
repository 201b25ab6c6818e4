#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ctl {

inline constexpr int kMaxJetOrder = 8;
inline constexpr int kMaxJetDim = 6;

/// Multi-indices of a fixed dimension up to kMaxJetOrder, enumerated by degree
/// and colexicographically inside a degree. A jet of order r therefore owns a
/// prefix of the enumeration, and truncation is a resize.
class MultiIndexTable {
 public:
  static const MultiIndexTable& get(int dim);

  int dim() const { return dim_; }
  /// Number of multi-indices of degree <= order.
  int count(int order) const { return count_upto_[order]; }
  int degree(int idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(int idx) const {
    return {exps_.data() + static_cast<std::size_t>(idx) * dim_, static_cast<std::size_t>(dim_)};
  }
  /// Index of a multi-index, or -1 if its degree exceeds kMaxJetOrder.
  int index_of(std::span<const int> alpha) const;
  /// Index of alpha + e_mu, or -1 past the maximal order.
  int shifted(int idx, int mu) const { return shift_[static_cast<std::size_t>(idx) * dim_ + mu]; }
  double factorial(int idx) const { return factorial_[idx]; }

  /// Product pairs (a, b) with alpha_a + alpha_b = alpha_c, grouped by c.
  /// Pairs for c live in [row_begin(c), row_begin(c + 1)).
  int row_begin(int c) const { return row_[c]; }
  const int* pair_a() const { return pa_.data(); }
  const int* pair_b() const { return pb_.data(); }

 private:
  explicit MultiIndexTable(int dim);

  int dim_;
  std::vector<int> count_upto_;
  std::vector<int> degree_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> lookup_;
  std::vector<int> shift_;
  std::vector<double> factorial_;
  std::vector<int> row_;
  std::vector<int> pa_;
  std::vector<int> pb_;
};

/// Truncated multivariate Taylor expansion about a point. Coefficient k is
/// the derivative d^alpha h / alpha! for the k-th multi-index alpha.
///
/// Binary operators between jets of different order truncate to the smaller
/// order; the dimension must match.
class Jet {
 public:
  Jet() = default;
  Jet(int dim, int order);

  static Jet constant(double value, int dim, int order);
  /// The coordinate function x_slot lifted at a point where x_slot = value.
  static Jet variable(double value, int slot, int dim, int order);

  int dim() const { return table_ ? table_->dim() : 0; }
  int order() const { return order_; }
  bool empty() const { return table_ == nullptr; }
  const MultiIndexTable& table() const { return *table_; }

  double value() const { return c_[0]; }
  std::span<const double> coeffs() const { return c_; }
  std::span<double> coeffs() { return c_; }
  double operator[](int idx) const { return c_[idx]; }
  double& operator[](int idx) { return c_[idx]; }

  /// Taylor coefficient of x^alpha.
  double coeff(std::span<const int> alpha) const;
  /// Partial derivative d^alpha h at the expansion point.
  double derivative(std::span<const int> alpha) const;

  /// d/dx_mu; the result has one order less.
  Jet partial(int mu) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  /// this += s * a * b, truncated to this->order().
  void add_product(const Jet& a, const Jet& b, double s = 1.0);

 private:
  const MultiIndexTable* table_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;

  void shrink_to(int order);
};

Jet operator-(const Jet& a);
Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(const Jet& a, double s);
Jet operator+(double s, const Jet& a);
Jet operator-(const Jet& a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(const Jet& a, double s);
Jet operator*(double s, const Jet& a);
Jet operator/(const Jet& a, double s);
Jet operator/(double s, const Jet& a);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet sqrt(const Jet& a);
/// Integer exponents work for any base; others need a positive constant term.
Jet pow(const Jet& a, double r);

enum class JetOp { Add, Sub, Mul, Div };
enum class JetFunc { Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt, Pow };

/// Lift a constant (slot < 0) or the coordinate function x_slot.
Jet jet_lift(double value, int slot, int dim, int order);
/// Strict arithmetic: operands must agree in dimension and order.
Jet jet_arith(const Jet& a, const Jet& b, JetOp op);
Jet jet_func(const Jet& a, JetFunc f, double exponent = 1.0);

}  // namespace ctl

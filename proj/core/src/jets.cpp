#include "ctl/jets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "ctl/error.hpp"

namespace ctl {

namespace {

constexpr int kRadix = kMaxJetOrder + 1;

int encode(std::span<const std::uint8_t> e) {
  int code = 0;
  for (int i = static_cast<int>(e.size()) - 1; i >= 0; --i) code = code * kRadix + e[i];
  return code;
}

void enumerate_degree(int dim, int degree, std::vector<std::vector<std::uint8_t>>& out) {
  std::vector<std::uint8_t> cur(dim, 0);
  // Recursive fill of the exponent vector, last slot absorbs the remainder.
  auto rec = [&](auto&& self, int slot, int left) -> void {
    if (slot == dim - 1) {
      cur[slot] = static_cast<std::uint8_t>(left);
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[slot] = static_cast<std::uint8_t>(k);
      self(self, slot + 1, left - k);
    }
  };
  rec(rec, 0, degree);
}

}  // namespace

MultiIndexTable::MultiIndexTable(int dim) : dim_(dim) {
  std::vector<std::vector<std::uint8_t>> all;
  count_upto_.assign(kMaxJetOrder + 1, 0);
  for (int d = 0; d <= kMaxJetOrder; ++d) {
    std::vector<std::vector<std::uint8_t>> level;
    enumerate_degree(dim, d, level);
    std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    for (auto& e : level) all.push_back(std::move(e));
    count_upto_[d] = static_cast<int>(all.size());
  }
  const int n = static_cast<int>(all.size());
  int table_size = 1;
  for (int i = 0; i < dim; ++i) table_size *= kRadix;
  lookup_.assign(table_size, -1);
  exps_.reserve(static_cast<std::size_t>(n) * dim);
  degree_.resize(n);
  factorial_.resize(n);
  for (int k = 0; k < n; ++k) {
    int deg = 0;
    double fac = 1.0;
    for (auto a : all[k]) {
      exps_.push_back(a);
      deg += a;
      for (int j = 2; j <= a; ++j) fac *= j;
    }
    degree_[k] = deg;
    factorial_[k] = fac;
    lookup_[encode(all[k])] = k;
  }
  shift_.assign(static_cast<std::size_t>(n) * dim, -1);
  for (int k = 0; k < n; ++k) {
    if (degree_[k] == kMaxJetOrder) continue;
    for (int mu = 0; mu < dim; ++mu) {
      auto e = all[k];
      ++e[mu];
      shift_[static_cast<std::size_t>(k) * dim + mu] = lookup_[encode(e)];
    }
  }
  // Product pairs grouped by the target index (counting sort).
  std::vector<std::array<int, 3>> triples;
  std::vector<std::uint8_t> sum(dim);
  for (int a = 0; a < n; ++a) {
    const int nb = count_upto_[kMaxJetOrder - degree_[a]];
    for (int b = 0; b < nb; ++b) {
      for (int i = 0; i < dim; ++i) sum[i] = static_cast<std::uint8_t>(all[a][i] + all[b][i]);
      triples.push_back({lookup_[encode(sum)], a, b});
    }
  }
  row_.assign(n + 1, 0);
  for (const auto& t : triples) ++row_[t[0] + 1];
  for (int c = 0; c < n; ++c) row_[c + 1] += row_[c];
  pa_.resize(triples.size());
  pb_.resize(triples.size());
  std::vector<int> fill(row_.begin(), row_.end() - 1);
  for (const auto& t : triples) {
    const int pos = fill[t[0]]++;
    pa_[pos] = t[1];
    pb_[pos] = t[2];
  }
}

const MultiIndexTable& MultiIndexTable::get(int dim) {
  if (dim < 1 || dim > kMaxJetDim)
    throw ShapeError("jet dimension " + std::to_string(dim) + " outside [1, " +
                     std::to_string(kMaxJetDim) + "]");
  static std::array<std::once_flag, kMaxJetDim + 1> once;
  static std::array<std::unique_ptr<MultiIndexTable>, kMaxJetDim + 1> tables;
  std::call_once(once[dim], [dim] { tables[dim].reset(new MultiIndexTable(dim)); });
  return *tables[dim];
}

int MultiIndexTable::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_) throw ShapeError("multi-index has wrong length");
  int deg = 0;
  std::vector<std::uint8_t> e(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (alpha[i] < 0) throw ShapeError("negative multi-index entry");
    deg += alpha[i];
    if (deg > kMaxJetOrder) return -1;
    e[i] = static_cast<std::uint8_t>(alpha[i]);
  }
  return lookup_[encode(e)];
}

// ---------------------------------------------------------------------------

Jet::Jet(int dim, int order) : table_(&MultiIndexTable::get(dim)), order_(order) {
  if (order < 0 || order > kMaxJetOrder)
    throw JetOrderError("jet order " + std::to_string(order) + " outside [0, " +
                        std::to_string(kMaxJetOrder) + "]");
  c_.assign(table_->count(order), 0.0);
}

Jet Jet::constant(double value, int dim, int order) {
  Jet j(dim, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(double value, int slot, int dim, int order) {
  if (slot < 0 || slot >= dim) throw ShapeError("variable slot out of range");
  Jet j(dim, order);
  j.c_[0] = value;
  if (order >= 1) j.c_[1 + slot] = 1.0;
  return j;
}

double Jet::coeff(std::span<const int> alpha) const {
  const int idx = table_->index_of(alpha);
  if (idx < 0 || idx >= static_cast<int>(c_.size()))
    throw JetOrderError("coefficient beyond jet order " + std::to_string(order_));
  return c_[idx];
}

double Jet::derivative(std::span<const int> alpha) const {
  const int idx = table_->index_of(alpha);
  if (idx < 0 || idx >= static_cast<int>(c_.size()))
    throw JetOrderError("derivative beyond jet order " + std::to_string(order_));
  return c_[idx] * table_->factorial(idx);
}

Jet Jet::partial(int mu) const {
  if (order_ < 1) throw JetOrderError("cannot differentiate a jet of order 0");
  if (mu < 0 || mu >= dim()) throw ShapeError("partial derivative slot out of range");
  Jet r(dim(), order_ - 1);
  const int n = table_->count(order_ - 1);
  for (int k = 0; k < n; ++k) {
    const int s = table_->shifted(k, mu);
    r.c_[k] = (table_->exponents(k)[mu] + 1) * c_[s];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (order > order_) throw JetOrderError("cannot raise jet order by truncation");
  Jet r = *this;
  r.shrink_to(order);
  return r;
}

void Jet::shrink_to(int order) {
  if (order >= order_) return;
  order_ = order;
  c_.resize(table_->count(order));
}

namespace {

void check_dim(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim()) throw ShapeError("jet dimensions differ");
}

}  // namespace

Jet& Jet::operator+=(const Jet& o) {
  check_dim(*this, o);
  shrink_to(o.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_dim(*this, o);
  shrink_to(o.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  for (auto& x : c_) x /= s;
  return *this;
}

void Jet::add_product(const Jet& a, const Jet& b, double s) {
  check_dim(a, b);
  check_dim(*this, a);
  shrink_to(std::min(a.order_, b.order_));
  const int n = static_cast<int>(c_.size());
  const int* pa = table_->pair_a();
  const int* pb = table_->pair_b();
  const double* ca = a.c_.data();
  const double* cb = b.c_.data();
  for (int c = 0; c < n; ++c) {
    double acc = 0.0;
    for (int p = table_->row_begin(c), e = table_->row_begin(c + 1); p < e; ++p)
      acc += ca[pa[p]] * cb[pb[p]];
    c_[c] += s * acc;
  }
}

Jet operator-(const Jet& a) {
  Jet r = a;
  r *= -1.0;
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a;
  r += b;
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a;
  r -= b;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_dim(a, b);
  Jet r(a.dim(), std::min(a.order(), b.order()));
  r.add_product(a, b);
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  check_dim(a, b);
  if (b.value() == 0.0) throw DomainError("division by a jet with zero constant term");
  Jet r(a.dim(), std::min(a.order(), b.order()));
  const auto& t = r.table();
  const int n = t.count(r.order());
  const double b0 = b.value();
  for (int c = 0; c < n; ++c) {
    double acc = a[c];
    for (int p = t.row_begin(c), e = t.row_begin(c + 1); p < e; ++p) {
      const int ib = t.pair_b()[p];
      if (ib != 0) acc -= r[t.pair_a()[p]] * b[ib];
    }
    r[c] = acc / b0;
  }
  return r;
}

Jet operator+(const Jet& a, double s) { Jet r = a; r += s; return r; }
Jet operator+(double s, const Jet& a) { Jet r = a; r += s; return r; }
Jet operator-(const Jet& a, double s) { Jet r = a; r -= s; return r; }
Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
Jet operator*(const Jet& a, double s) { Jet r = a; r *= s; return r; }
Jet operator*(double s, const Jet& a) { Jet r = a; r *= s; return r; }
Jet operator/(const Jet& a, double s) { Jet r = a; r /= s; return r; }
Jet operator/(double s, const Jet& a) { return Jet::constant(s, a.dim(), a.order()) / a; }

// Univariate functions use the Euler operator D = sum x_i d/dx_i, which scales
// the coefficient of a degree-k monomial by k. From D(F(a)) = F'(a) Da every
// coefficient of degree k follows from lower-degree ones.

Jet exp(const Jet& a) {
  Jet r(a.dim(), a.order());
  const auto& t = a.table();
  const int n = t.count(a.order());
  r[0] = std::exp(a.value());
  for (int c = 1; c < n; ++c) {
    double acc = 0.0;
    for (int p = t.row_begin(c), e = t.row_begin(c + 1); p < e; ++p) {
      const int ia = t.pair_a()[p];
      if (ia != 0) acc += t.degree(ia) * a[ia] * r[t.pair_b()[p]];
    }
    r[c] = acc / t.degree(c);
  }
  return r;
}

Jet log(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("log of a jet with non-positive constant term");
  Jet r(a.dim(), a.order());
  const auto& t = a.table();
  const int n = t.count(a.order());
  const double a0 = a.value();
  r[0] = std::log(a0);
  // a * Dr = Da
  for (int c = 1; c < n; ++c) {
    double acc = t.degree(c) * a[c];
    for (int p = t.row_begin(c), e = t.row_begin(c + 1); p < e; ++p) {
      const int ia = t.pair_a()[p];
      const int ib = t.pair_b()[p];
      if (ia != 0 && ib != 0) acc -= a[ia] * t.degree(ib) * r[ib];
    }
    r[c] = acc / (a0 * t.degree(c));
  }
  return r;
}

namespace {

/// Solve Ds = c Da, Dc = sign * s Da together.
void trig_pair(const Jet& a, double sign, Jet& s, Jet& c) {
  const auto& t = a.table();
  const int n = t.count(a.order());
  for (int k = 1; k < n; ++k) {
    double as = 0.0, ac = 0.0;
    for (int p = t.row_begin(k), e = t.row_begin(k + 1); p < e; ++p) {
      const int ia = t.pair_a()[p];
      if (ia == 0) continue;
      const int ib = t.pair_b()[p];
      const double w = t.degree(ia) * a[ia];
      as += w * c[ib];
      ac += w * s[ib];
    }
    s[k] = as / t.degree(k);
    c[k] = sign * ac / t.degree(k);
  }
}

Jet int_pow(const Jet& a, long n) {
  if (n < 0) return 1.0 / int_pow(a, -n);
  Jet result = Jet::constant(1.0, a.dim(), a.order());
  Jet base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace

Jet sin(const Jet& a) {
  Jet s(a.dim(), a.order()), c(a.dim(), a.order());
  s[0] = std::sin(a.value());
  c[0] = std::cos(a.value());
  trig_pair(a, -1.0, s, c);
  return s;
}

Jet cos(const Jet& a) {
  Jet s(a.dim(), a.order()), c(a.dim(), a.order());
  s[0] = std::sin(a.value());
  c[0] = std::cos(a.value());
  trig_pair(a, -1.0, s, c);
  return c;
}

Jet sinh(const Jet& a) {
  Jet s(a.dim(), a.order()), c(a.dim(), a.order());
  s[0] = std::sinh(a.value());
  c[0] = std::cosh(a.value());
  trig_pair(a, 1.0, s, c);
  return s;
}

Jet cosh(const Jet& a) {
  Jet s(a.dim(), a.order()), c(a.dim(), a.order());
  s[0] = std::sinh(a.value());
  c[0] = std::cosh(a.value());
  trig_pair(a, 1.0, s, c);
  return c;
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt of a jet with non-positive constant term");
  return pow(a, 0.5);
}

Jet pow(const Jet& a, double r) {
  if (r == std::round(r) && std::abs(r) <= 64.0) return int_pow(a, static_cast<long>(r));
  if (!(a.value() > 0.0))
    throw DomainError("non-integer power of a jet with non-positive constant term");
  Jet b(a.dim(), a.order());
  const auto& t = a.table();
  const int n = t.count(a.order());
  const double a0 = a.value();
  b[0] = std::pow(a0, r);
  // a * Db = r * b * Da
  for (int c = 1; c < n; ++c) {
    double acc = 0.0;
    for (int p = t.row_begin(c), e = t.row_begin(c + 1); p < e; ++p) {
      const int ia = t.pair_a()[p];
      if (ia == 0) continue;
      const int ib = t.pair_b()[p];
      acc += (r * t.degree(ia) - t.degree(ib)) * a[ia] * b[ib];
    }
    b[c] = acc / (a0 * t.degree(c));
  }
  return b;
}

Jet jet_lift(double value, int slot, int dim, int order) {
  if (slot < 0) return Jet::constant(value, dim, order);
  return Jet::variable(value, slot, dim, order);
}

Jet jet_arith(const Jet& a, const Jet& b, JetOp op) {
  if (a.dim() != b.dim() || a.order() != b.order())
    throw ShapeError("jet operands must share dimension and order");
  switch (op) {
    case JetOp::Add: return a + b;
    case JetOp::Sub: return a - b;
    case JetOp::Mul: return a * b;
    case JetOp::Div: return a / b;
  }
  throw ShapeError("unknown jet operation");
}

Jet jet_func(const Jet& a, JetFunc f, double exponent) {
  switch (f) {
    case JetFunc::Exp: return exp(a);
    case JetFunc::Log: return log(a);
    case JetFunc::Sin: return sin(a);
    case JetFunc::Cos: return cos(a);
    case JetFunc::Sinh: return sinh(a);
    case JetFunc::Cosh: return cosh(a);
    case JetFunc::Sqrt: return sqrt(a);
    case JetFunc::Pow: return pow(a, exponent);
  }
  throw ShapeError("unknown jet function");
}

}  // namespace ctl

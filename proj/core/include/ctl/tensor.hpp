#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "ctl/error.hpp"
#include "ctl/jets.hpp"

namespace ctl {

/// Dense covariant tensor of a fixed rank over an m-dimensional space, stored
/// row-major (the first index varies slowest). S is double for values at a
/// point and Jet for fields expanded about a point.
template <class S>
class TensorOf {
 public:
  TensorOf() = default;
  TensorOf(int dim, int rank, const S& fill) : dim_(dim), rank_(rank) {
    data_.assign(ipow(dim, rank), fill);
  }
  TensorOf(int dim, int rank, std::vector<S> data) : dim_(dim), rank_(rank), data_(std::move(data)) {
    if (data_.size() != ipow(dim, rank)) throw ShapeError("tensor data has wrong size");
  }

  /// Build from f(i0, ..., i{N-1}).
  template <int N, class F>
  static TensorOf generate(int dim, F&& f) {
    std::vector<S> data;
    const std::size_t n = ipow(dim, N);
    data.reserve(n);
    std::array<int, N> idx{};
    for (std::size_t k = 0; k < n; ++k) {
      data.push_back(std::apply(f, idx));
      for (int s = N - 1; s >= 0; --s) {
        if (++idx[s] < dim) break;
        idx[s] = 0;
      }
    }
    return TensorOf(dim, N, std::move(data));
  }

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }
  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  template <class... I>
  S& operator()(I... i) {
    return data_[offset(i...)];
  }
  template <class... I>
  const S& operator()(I... i) const {
    return data_[offset(i...)];
  }
  S& at(std::span<const int> idx) { return data_[flat(idx)]; }
  const S& at(std::span<const int> idx) const { return data_[flat(idx)]; }

  std::size_t flat(std::span<const int> idx) const {
    std::size_t k = 0;
    for (int v : idx) k = k * dim_ + v;
    return k;
  }
  /// Multi-index of a flat position.
  void unflat(std::size_t k, std::span<int> idx) const {
    for (int s = rank_ - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(k % dim_);
      k /= dim_;
    }
  }

  TensorOf& operator+=(const TensorOf& o) {
    check(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  TensorOf& operator-=(const TensorOf& o) {
    check(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  TensorOf& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  friend TensorOf operator+(TensorOf a, const TensorOf& b) { return a += b; }
  friend TensorOf operator-(TensorOf a, const TensorOf& b) { return a -= b; }
  friend TensorOf operator*(TensorOf a, double s) { return a *= s; }
  friend TensorOf operator*(double s, TensorOf a) { return a *= s; }

  static std::size_t ipow(int dim, int rank) {
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) n *= static_cast<std::size_t>(dim);
    return n;
  }

 private:
  int dim_ = 0;
  int rank_ = 0;
  std::vector<S> data_;

  template <class... I>
  std::size_t offset(I... i) const {
    std::size_t k = 0;
    ((k = k * dim_ + static_cast<std::size_t>(i)), ...);
    return k;
  }
  void check(const TensorOf& o) const {
    if (o.dim_ != dim_ || o.rank_ != rank_) throw ShapeError("tensor shapes differ");
  }
};

using Tensor = TensorOf<double>;
using JetTensor = TensorOf<Jet>;

/// Values at the expansion point.
inline Tensor value_of(const JetTensor& t) {
  std::vector<double> v;
  v.reserve(t.size());
  for (const auto& j : t.data()) v.push_back(j.value());
  return Tensor(t.dim(), t.rank(), std::move(v));
}

/// Jet order shared by every component (the minimum if they differ).
inline int order_of(const JetTensor& t) {
  int r = kMaxJetOrder;
  for (const auto& j : t.data()) r = std::min(r, j.order());
  return r;
}

inline double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double x : t.data()) m = std::max(m, std::abs(x));
  return m;
}

inline double delta(int i, int j) { return i == j ? 1.0 : 0.0; }

/// sum_{t < m} f(t), seeded with the first term so it works for jets too.
template <class F>
auto sum(int m, F&& f) -> decltype(f(0)) {
  auto acc = f(0);
  for (int t = 1; t < m; ++t) acc += f(t);
  return acc;
}

template <class F>
auto sum2(int m, F&& f) -> decltype(f(0, 0)) {
  return sum(m, [&](int s) { return sum(m, [&](int t) { return f(s, t); }); });
}

}  // namespace ctl

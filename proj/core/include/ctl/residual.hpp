#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ctl/tensor.hpp"

namespace ctl {

/// max|L - R| / (1 + max(|L|, |R|)), all norms sup norms.
inline double residual(const Tensor& L, const Tensor& R) {
  if (L.size() != R.size()) throw ShapeError("residual of tensors with different sizes");
  double d = 0, a = 0, b = 0;
  for (std::size_t k = 0; k < L.size(); ++k) {
    d = std::max(d, std::abs(L.data()[k] - R.data()[k]));
    a = std::max(a, std::abs(L.data()[k]));
    b = std::max(b, std::abs(R.data()[k]));
  }
  return d / (1.0 + std::max(a, b));
}

/// Tolerance classes by the highest number of derivatives of the metric or
/// of a field that enters a check: A up to 2, B up to 4, C up to 6.
enum class TolClass { A, B, C };

inline double tolerance(TolClass c) {
  switch (c) {
    case TolClass::A: return 1e-9;
    case TolClass::B: return 1e-7;
    case TolClass::C: return 1e-5;
  }
  return 0;
}

inline TolClass tol_class_for(int derivs) {
  return derivs <= 2 ? TolClass::A : derivs <= 4 ? TolClass::B : TolClass::C;
}

inline const char* tol_class_name(TolClass c) { return c == TolClass::A ? "A" : c == TolClass::B ? "B" : "C"; }

inline std::optional<TolClass> tol_class_from_name(const std::string& s) {
  if (s == "A" || s == "a") return TolClass::A;
  if (s == "B" || s == "b") return TolClass::B;
  if (s == "C" || s == "c") return TolClass::C;
  return std::nullopt;
}

}  // namespace ctl

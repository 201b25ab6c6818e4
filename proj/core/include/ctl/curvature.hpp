#pragma once

#include <cmath>
#include <map>
#include <span>
#include <utility>

#include "ctl/geometry.hpp"
#include "ctl/tensor.hpp"

namespace ctl {

/// Frame-component fields available from a CurvatureBundle.
enum class Quantity {
  Riemann,
  Ricci,
  Scalar,
  Schouten,
  Weyl,
  Einstein,
  Cotton,      ///< A_{ij,k} - A_{ik,j}
  CottonWeyl,  ///< (m-2)/(m-3) W_{tikj,t}; needs m >= 4
  Bach,        ///< (C_{jik,k} + R_{kl} W_{ikjl}) / (m-2)
  U,           ///< conformal factor u
  F,           ///< potential f
  X,           ///< vector field, frame components
  D,           ///< D tensor of f (first form)
  DX,          ///< D^X of the vector field
  DUF,         ///< D^(u,f)
  DUX,         ///< D^(u,X)
};

const char* quantity_name(Quantity q);
std::optional<Quantity> quantity_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Formulas shared by point values (S = double) and jets (S = Jet). All inputs
// are orthonormal-frame components.

/// (h ∧ k)_{ijkl} = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il.
template <class S>
TensorOf<S> kulkarni_nomizu(const TensorOf<S>& h, const TensorOf<S>& k) {
  return TensorOf<S>::template generate<4>(h.dim(), [&](int i, int j, int a, int b) {
    S r = h(i, a) * k(j, b);
    r += h(j, b) * k(i, a);
    r -= h(i, b) * k(j, a);
    r -= h(j, a) * k(i, b);
    return r;
  });
}

template <class S>
TensorOf<S> ricci_from(const TensorOf<S>& R) {
  const int m = R.dim();
  return TensorOf<S>::template generate<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return R(i, t, j, t); }); });
}

template <class S>
TensorOf<S> trace2(const TensorOf<S>& T) {
  const int m = T.dim();
  std::vector<S> v{sum(m, [&](int t) { return T(t, t); })};
  return TensorOf<S>(m, 0, std::move(v));
}

template <class S>
TensorOf<S> schouten_from(const TensorOf<S>& ric, const S& scal) {
  const int m = ric.dim();
  return TensorOf<S>::template generate<2>(
      m, [&](int i, int j) { return ric(i, j) - delta(i, j) / (2.0 * (m - 1)) * scal; });
}

template <class S>
TensorOf<S> einstein_from(const TensorOf<S>& ric, const S& scal) {
  const int m = ric.dim();
  return TensorOf<S>::template generate<2>(m, [&](int i, int j) { return ric(i, j) - 0.5 * delta(i, j) * scal; });
}

template <class S>
TensorOf<S> weyl_from(const TensorOf<S>& R, const TensorOf<S>& ric, const S& scal) {
  const int m = R.dim();
  const double c1 = 1.0 / (m - 2);
  const double c2 = 1.0 / ((m - 1.0) * (m - 2.0));
  return TensorOf<S>::template generate<4>(m, [&](int i, int j, int k, int t) {
    S w = R(i, j, k, t);
    w -= c1 * (ric(i, k) * delta(j, t) - ric(i, t) * delta(j, k) + ric(j, t) * delta(i, k) - ric(j, k) * delta(i, t));
    w += c2 * (delta(i, k) * delta(j, t) - delta(i, t) * delta(j, k)) * scal;
    return w;
  });
}

/// C_{ijk} = A_{ij,k} - A_{ik,j}.
template <class S>
TensorOf<S> cotton_from(const TensorOf<S>& dA) {
  return TensorOf<S>::template generate<3>(dA.dim(), [&](int i, int j, int k) { return dA(i, j, k) - dA(i, k, j); });
}

/// C_{ijk} = (m-2)/(m-3) W_{tikj,t}.
template <class S>
TensorOf<S> cotton_weyl_from(const TensorOf<S>& dW) {
  const int m = dW.dim();
  const double c = (m - 2.0) / (m - 3.0);
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) { return c * sum(m, [&](int t) { return dW(t, i, k, j, t); }); });
}

/// B_{ij} = (C_{jik,k} + R_{kl} W_{ikjl}) / (m-2).
template <class S>
TensorOf<S> bach_from(const TensorOf<S>& dC, const TensorOf<S>& ric, const TensorOf<S>& W) {
  const int m = ric.dim();
  return TensorOf<S>::template generate<2>(m, [&](int i, int j) {
    S b = sum(m, [&](int k) { return dC(j, i, k, k); });
    b += sum2(m, [&](int k, int l) { return ric(k, l) * W(i, k, j, l); });
    return b * (1.0 / (m - 2));
  });
}

/// D tensor, written with Ricci and scalar curvature.
template <class S>
TensorOf<S> d_form1(const TensorOf<S>& df, const TensorOf<S>& ric, const S& scal) {
  const int m = ric.dim();
  const double a = 1.0 / (m - 2);
  const double b = 1.0 / ((m - 1.0) * (m - 2.0));
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = a * (df(k) * ric(i, j) - df(j) * ric(i, k));
    d += b * sum(m, [&](int t) { return df(t) * (ric(t, k) * delta(i, j) - ric(t, j) * delta(i, k)); });
    d -= b * scal * (df(k) * delta(i, j) - df(j) * delta(i, k));
    return d;
  });
}

/// Second form, with the gradient of the scalar curvature.
template <class S>
TensorOf<S> d_form2(const TensorOf<S>& df, const TensorOf<S>& ric, const S& scal, const TensorOf<S>& dscal) {
  const int m = ric.dim();
  const double a = 1.0 / (m - 2);
  const double b = 1.0 / ((m - 1.0) * (m - 2.0));
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = a * (df(k) * ric(i, j) - df(j) * ric(i, k));
    d += 0.5 * b * (dscal(k) * delta(i, j) - dscal(j) * delta(i, k));
    d -= b * scal * (df(k) * delta(i, j) - df(j) * delta(i, k));
    return d;
  });
}

/// Third form, with Schouten and Einstein tensors.
template <class S>
TensorOf<S> d_form3(const TensorOf<S>& df, const TensorOf<S>& A, const TensorOf<S>& E) {
  const int m = A.dim();
  const double a = 1.0 / (m - 2);
  const double b = 1.0 / ((m - 1.0) * (m - 2.0));
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = a * (df(k) * A(i, j) - df(j) * A(i, k));
    d += b * sum(m, [&](int t) { return df(t) * (E(t, k) * delta(i, j) - E(t, j) * delta(i, k)); });
    return d;
  });
}

/// Fourth form, with the Hessian and Laplacian of f only.
template <class S>
TensorOf<S> d_form4(const TensorOf<S>& df, const TensorOf<S>& hf) {
  const int m = hf.dim();
  const double a = 1.0 / (m - 2);
  const double b = 1.0 / ((m - 1.0) * (m - 2.0));
  const S lap = sum(m, [&](int t) { return hf(t, t); });
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = a * (df(j) * hf(i, k) - df(k) * hf(i, j));
    d += b * sum(m, [&](int t) { return df(t) * (hf(t, j) * delta(i, k) - hf(t, k) * delta(i, j)); });
    d -= b * lap * (df(j) * delta(i, k) - df(k) * delta(i, j));
    return d;
  });
}

/// D^X: X0 = X_i, X2 = X_{ijk} (second covariant derivative).
template <class S>
TensorOf<S> dx_tensor_from(const TensorOf<S>& X0, const TensorOf<S>& X2, const TensorOf<S>& ric, const S& scal) {
  const int m = ric.dim();
  const TensorOf<S> core = d_form1(X0, ric, scal);
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = core(i, j, k);
    d += 0.5 * (X2(k, j, i) - X2(j, k, i));
    d += (0.5 / (m - 1)) * sum(m, [&](int t) {
      return (X2(t, k, t) - X2(k, t, t)) * delta(i, j) - (X2(t, j, t) - X2(j, t, t)) * delta(i, k);
    });
    return d;
  });
}

/// D^(u,f) in its defining form.
template <class S>
TensorOf<S> duf_best_from(const TensorOf<S>& df, const TensorOf<S>& ric, const S& scal, const TensorOf<S>& du,
                          const TensorOf<S>& hu) {
  const int m = ric.dim();
  const double c = 1.0 / (m - 1);
  const TensorOf<S> core = d_form1(df, ric, scal);
  const S lapu = sum(m, [&](int t) { return hu(t, t); });
  const S fu = sum(m, [&](int t) { return df(t) * du(t); });
  const S gu2 = sum(m, [&](int t) { return du(t) * du(t); });
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = core(i, j, k);
    d += c * lapu * (df(k) * delta(i, j) - df(j) * delta(i, k));
    d -= df(k) * hu(i, j) - df(j) * hu(i, k);
    d += du(i) * (df(k) * du(j) - df(j) * du(k));
    d -= c * sum(m, [&](int t) { return df(t) * (hu(t, k) * delta(i, j) - hu(t, j) * delta(i, k)); });
    d += c * fu * (du(k) * delta(i, j) - du(j) * delta(i, k));
    d -= c * gu2 * (df(k) * delta(i, j) - df(j) * delta(i, k));
    return d;
  });
}

/// D^(u,f) in the form that uses only derivatives of u and f.
template <class S>
TensorOf<S> duf_alt_from(const TensorOf<S>& df, const TensorOf<S>& hf, const TensorOf<S>& du) {
  const int m = hf.dim();
  const double a = 1.0 / (m - 2);
  const double b = 1.0 / ((m - 1.0) * (m - 2.0));
  const S lapf = sum(m, [&](int t) { return hf(t, t); });
  const S fu = sum(m, [&](int t) { return df(t) * du(t); });
  const S gf2 = sum(m, [&](int t) { return df(t) * df(t); });
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = b * sum(m, [&](int t) { return df(t) * (hf(t, j) * delta(i, k) - hf(t, k) * delta(i, j)); });
    d -= b * gf2 * (du(j) * delta(i, k) - du(k) * delta(i, j));
    d += b * fu * (df(j) * delta(i, k) - df(k) * delta(i, j));
    d -= a * (hf(i, j) * df(k) - hf(i, k) * df(j) + df(i) * (du(k) * df(j) - du(j) * df(k)));
    d += b * lapf * (df(k) * delta(i, j) - df(j) * delta(i, k));
    return d;
  });
}

/// D^(u,X): u0 = u, du = u_i, X0 = X_i, X1 = X_{ij}, X2 = X_{ijk}.
template <class S>
TensorOf<S> dux_from(const TensorOf<S>& X0, const TensorOf<S>& X1, const TensorOf<S>& X2, const TensorOf<S>& ric,
                     const S& scal, const S& u0, const TensorOf<S>& du) {
  using std::exp;
  const int m = ric.dim();
  const double c = 1.0 / (m - 1);
  const TensorOf<S> dx = dx_tensor_from(X0, X2, ric, scal);
  const S divx = sum(m, [&](int t) { return X1(t, t); });
  const S e2u = exp(2.0 * u0);
  return TensorOf<S>::template generate<3>(m, [&](int i, int j, int k) {
    S d = dx(i, j, k);
    d -= 0.5 * ((X1(i, j) + X1(j, i)) * du(k) - (X1(i, k) + X1(k, i)) * du(j));
    d -= 0.5 * c * sum(m, [&](int t) {
      return du(t) * ((X1(t, k) + X1(k, t)) * delta(i, j) - (X1(t, j) + X1(j, t)) * delta(i, k));
    });
    d += c * divx * (du(k) * delta(i, j) - du(j) * delta(i, k));
    return e2u * d;
  });
}

// ---------------------------------------------------------------------------

/// Lazily computed curvature and field jets at one point, in the Cholesky
/// orthonormal frame. Every request is memoised; derivatives are chained.
class CurvatureBundle {
 public:
  CurvatureBundle(GeometryInstance g, std::span<const double> point);

  int dim() const { return local_.dim(); }
  const GeometryInstance& geometry() const { return geo_; }
  const LocalGeometry& local() const { return local_; }

  /// `derivs` frame covariant derivatives of q, as jets.
  const JetTensor& field(Quantity q, int derivs = 0);
  /// Value at the point.
  const Tensor& value(Quantity q, int derivs = 0);
  /// Shorthand for rank-0 values.
  double scalar(Quantity q, int derivs = 0) { return value(q, derivs)(); }

  /// Coordinate Riemann tensor R_{abcd} (all lower), jets.
  const JetTensor& riemann_coord();

 private:
  GeometryInstance geo_;
  LocalGeometry local_;
  std::map<std::pair<int, int>, JetTensor> fields_;
  std::map<std::pair<int, int>, Tensor> values_;
  JetTensor riem_coord_;
  bool have_riem_coord_ = false;

  JetTensor compute(Quantity q);
};

// Single-shot evaluation at a point, orthonormal components.
TensorValue riemann(const GeometryInstance& g, std::span<const double> p);
TensorValue ricci(const GeometryInstance& g, std::span<const double> p);
double scalar_curvature(const GeometryInstance& g, std::span<const double> p);
TensorValue schouten(const GeometryInstance& g, std::span<const double> p);
TensorValue weyl(const GeometryInstance& g, std::span<const double> p);
enum class CottonRoute { Schouten, Weyl };
TensorValue cotton(const GeometryInstance& g, std::span<const double> p, CottonRoute route = CottonRoute::Schouten);
TensorValue bach(const GeometryInstance& g, std::span<const double> p);
/// D tensor of the geometry's f in one of its four forms (1..4).
TensorValue d_tensor(const GeometryInstance& g, std::span<const double> p, int form = 1);
TensorValue dx_tensor(const GeometryInstance& g, std::span<const double> p);
enum class DufForm { Best, Alt };
TensorValue duf_tensor(const GeometryInstance& g, std::span<const double> p, DufForm form = DufForm::Best);
TensorValue dux_tensor(const GeometryInstance& g, std::span<const double> p);

}  // namespace ctl

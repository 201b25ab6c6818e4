#include "ctl/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "ctl/error.hpp"

namespace ctl {

namespace {

using Q = Quantity;

const std::vector<LawInfo> kLaws = {
    {Law::Riemann04, "riemann04", "Riemannexp", 2, 2, false, false, LawGate::None},
    {Law::Ricci, "ricci", "RicciexpComponents", 2, 2, false, false, LawGate::None},
    {Law::Scalar, "scalar", "scalarExp", 2, 2, false, false, LawGate::None},
    {Law::NablaRicci, "nabla_ricci", "NablaRicciexpComponents", 3, 3, false, false, LawGate::None},
    {Law::Nabla2Ricci, "nabla2_ricci", "ExpochangenablasquaredRicci", 4, 4, false, false, LawGate::None},
    {Law::NablaScalar, "nabla_scalar", "NablascalarExp", 3, 3, false, false, LawGate::None},
    {Law::HessScalar, "hess_scalar", "HessianscalarExp", 4, 4, false, false, LawGate::None},
    {Law::LapScalar, "lap_scalar", "LaplacianscalarExp", 4, 4, false, false, LawGate::None},
    {Law::HessianF, "hessian_f", "HessianExpComp", 2, 2, true, false, LawGate::None},
    {Law::LaplacianF, "laplacian_f", "LaplacianExpComp", 2, 2, true, false, LawGate::None},
    {Law::ThirdF, "third_f", "thirdDerivFunctExpComp", 3, 3, true, false, LawGate::None},
    {Law::ThirdFTraced, "third_f_traced", "thirdDerivFunctExpCompTraced", 3, 3, true, false, LawGate::None},
    {Law::Schouten, "schouten", "SchoutenexpComponents", 2, 2, false, false, LawGate::None},
    {Law::NablaSchouten, "nabla_schouten", "ExpochangenablaSchouten", 3, 3, false, false, LawGate::None},
    {Law::Nabla2Schouten, "nabla2_schouten", "ExpochangenablasquaredSchouten", 4, 4, false, false, LawGate::None},
    {Law::Weyl13, "weyl13", "Weylexp", 2, 2, false, false, LawGate::None},
    {Law::Cotton, "cotton", "Cottonlexp", 3, 3, false, false, LawGate::None},
    {Law::Bach, "bach", "BachExpComp", 4, 4, false, false, LawGate::None},
    {Law::DTensor, "d_tensor", "DExpComp", 3, 2, true, false, LawGate::TildeGradientSoliton},
    {Law::DTensorReverse, "d_tensor_reverse", "DExpCompStartingFrom", 3, 2, true, false, LawGate::BaseGradientSoliton},
    {Law::NablaD, "nabla_d", "CovDerivDExpComp", 4, 3, true, false, LawGate::TildeGradientSoliton},
    {Law::LieMetric, "lie_metric", "eq_conformalchangeLieDeriv", 0, 1, false, true, LawGate::None},
    {Law::NablaX, "nabla_X", "tildeXik", 0, 1, false, true, LawGate::None},
    {Law::SymNablaX, "sym_nabla_X", "tildeXiktildeXki", 0, 1, false, true, LawGate::None},
    {Law::DivX, "div_X", "divergenzatilde", 0, 1, false, true, LawGate::None},
    {Law::Nabla2X, "nabla2_X", "secondCovDerivVFExp", 1, 2, false, true, LawGate::None},
    {Law::Nabla2XTraced, "nabla2_X_traced", "secondCovDerivVFExp", 1, 2, false, true, LawGate::None},
};

inline double d(int i, int j) { return i == j ? 1.0 : 0.0; }

Tensor scalar_tensor(int m, double v) { return Tensor(m, 0, std::vector<double>{v}); }

double trace(const Tensor& T) {
  double s = 0;
  for (int t = 0; t < T.dim(); ++t) s += T(t, t);
  return s;
}

/// Base-side ingredients, fetched lazily from the bundle.
struct Base {
  CurvatureBundle& b;
  int m;
  double n2;

  const Tensor& U(int k) { return b.value(Q::U, k); }
  const Tensor& F(int k) { return b.value(Q::F, k); }
  const Tensor& X(int k) { return b.value(Q::X, k); }
  const Tensor& R(int k = 0) { return b.value(Q::Ricci, k); }
  const Tensor& A(int k = 0) { return b.value(Q::Schouten, k); }
  double S() { return b.scalar(Q::Scalar); }
  const Tensor& dS(int k) { return b.value(Q::Scalar, k); }

  double lapu() { return trace(U(2)); }
  double gu2() {
    const Tensor& u = U(1);
    double s = 0;
    for (int t = 0; t < m; ++t) s += u(t) * u(t);
    return s;
  }
  /// u_{ttk}
  Tensor grad_lapu() {
    const Tensor& u3 = U(3);
    return Tensor::generate<1>(m, [&](int k) {
      double s = 0;
      for (int t = 0; t < m; ++t) s += u3(t, t, k);
      return s;
    });
  }
  double quad(const Tensor& T, const Tensor& a, const Tensor& c) {
    double s = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s += T(i, j) * a(i) * c(j);
    return s;
  }
  double dot(const Tensor& a, const Tensor& c) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += a(i) * c(i);
    return s;
  }
};

Tensor law_riemann(Base& B) {
  const Tensor& Rm = B.b.value(Q::Riemann);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const double g2 = B.gu2();
  return Tensor::generate<4>(B.m, [&](int i, int j, int k, int t) {
    return Rm(i, j, k, t) + (h(j, k) - u(j) * u(k)) * d(i, t) - (h(j, t) - u(j) * u(t)) * d(i, k) -
           (h(i, k) - u(i) * u(k)) * d(j, t) + (h(i, t) - u(i) * u(t)) * d(j, k) -
           g2 * (d(i, k) * d(j, t) - d(i, t) * d(j, k));
  });
}

Tensor law_ricci(Base& B) {
  const Tensor& R = B.R();
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const double lap = B.lapu(), g2 = B.gu2(), n2 = B.n2;
  return Tensor::generate<2>(B.m, [&](int i, int j) {
    return R(i, j) - n2 * h(i, j) + n2 * u(i) * u(j) - lap * d(i, j) - n2 * g2 * d(i, j);
  });
}

double law_scalar(Base& B) {
  const int m = B.m;
  return B.S() - 2 * (m - 1) * B.lapu() - (m - 1) * B.n2 * B.gu2();
}

Tensor law_nabla_ricci(Base& B) {
  const int m = B.m;
  const double n2 = B.n2, lap = B.lapu(), g2 = B.gu2();
  const Tensor& R = B.R();
  const Tensor& R1 = B.R(1);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u3 = B.U(3);
  const Tensor glap = B.grad_lapu();
  return Tensor::generate<3>(m, [&](int i, int j, int k) {
    double s = R1(i, j, k) - n2 * u3(i, j, k) - (glap(k) - 2 * u(k) * lap) * d(i, j);
    s -= 2 * R(i, j) * u(k) + u(i) * R(j, k) + u(j) * R(i, k);
    for (int t = 0; t < m; ++t) s += u(t) * (R(t, i) * d(j, k) + R(t, j) * d(i, k));
    s += 2 * n2 * (u(i) * h(j, k) + u(j) * h(i, k) + u(k) * h(i, j));
    for (int t = 0; t < m; ++t) s -= n2 * u(t) * (h(t, i) * d(j, k) + h(t, j) * d(i, k) + 2 * h(t, k) * d(i, j));
    s -= 4 * n2 * u(i) * u(j) * u(k);
    s += n2 * g2 * (u(i) * d(j, k) + u(j) * d(i, k) + 2 * u(k) * d(i, j));
    return s;
  });
}

Tensor law_nabla2_ricci(Base& B) {
  const int m = B.m;
  const double n2 = B.n2, lap = B.lapu(), g2 = B.gu2();
  const Tensor& R = B.R();
  const Tensor& R1 = B.R(1);
  const Tensor& R2 = B.R(2);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u3 = B.U(3);
  const Tensor& u4 = B.U(4);
  const Tensor glap = B.grad_lapu();
  const double u_glap = B.dot(u, glap);
  const double ric_uu = B.quad(R, u, u);
  const double hess_uu = B.quad(h, u, u);
  Tensor lap_h2(m, 2, 0.0);  // u_{sskt}
  for (int k = 0; k < m; ++k)
    for (int t = 0; t < m; ++t)
      for (int s = 0; s < m; ++s) lap_h2(k, t) += u4(s, s, k, t);
  return Tensor::generate<4>(m, [&](int i, int j, int k, int t) {
    double s = R2(i, j, k, t) - n2 * u4(i, j, k, t) - lap_h2(k, t) * d(i, j) +
               3 * (u(t) * glap(k) + u(k) * glap(t)) * d(i, j) - u_glap * d(i, j) * d(k, t);
    s += 2 * lap * (h(k, t) - 4 * u(k) * u(t) + g2 * d(k, t)) * d(i, j);
    for (int l = 0; l < m; ++l) {
      s += u(l) * (R1(l, i, t) * d(j, k) + R1(l, j, t) * d(i, k) + R1(i, l, k) * d(j, t) + R1(l, j, k) * d(i, t) +
                   R1(i, j, l) * d(k, t));
      s += R(i, l) * h(l, t) * d(j, k) + R(j, l) * h(l, t) * d(i, k);
    }
    s -= u(i) * R1(j, k, t) + u(j) * R1(i, k, t) + u(i) * R1(j, t, k) + u(j) * R1(i, t, k) + 3 * u(k) * R1(i, j, t) +
         3 * u(t) * R1(i, j, k);
    s -= h(i, t) * R(j, k) + h(j, t) * R(i, k) + 2 * h(k, t) * R(i, j);
    s += n2 * (2 * u(i) * u3(j, k, t) + u(i) * u3(j, t, k) + 2 * u(j) * u3(i, k, t) + u(j) * u3(i, t, k) +
               3 * u(k) * u3(i, j, t) + 3 * u(t) * u3(i, j, k));
    s += 2 * n2 * (h(i, j) * h(k, t) + h(i, k) * h(j, t) + h(j, k) * h(i, t));
    for (int l = 0; l < m; ++l) {
      s -= n2 * u(l) * (2 * u3(l, k, t) * d(i, j) + u3(l, j, t) * d(i, k) + u3(l, i, t) * d(j, k));
      s -= n2 * (2 * h(k, l) * h(l, t) * d(i, j) + h(j, l) * h(l, t) * d(i, k) + h(i, l) * h(l, t) * d(j, k));
      s -= R(t, l) * u(l) * u(i) * d(j, k) + R(t, l) * u(l) * u(j) * d(i, k) + 3 * R(i, l) * u(l) * u(t) * d(j, k) +
           3 * R(j, l) * u(l) * u(t) * d(i, k);
    }
    s += ric_uu * (d(j, k) * d(i, t) + d(i, k) * d(j, t));
    s += 4 * (u(i) * u(t) * R(j, k) + u(j) * u(t) * R(i, k) + 2 * u(k) * u(t) * R(i, j)) +
         (2 * u(i) * u(j) * R(k, t) + 3 * u(i) * u(k) * R(j, t) + 3 * u(j) * u(k) * R(i, t));
    s -= 8 * n2 *
         (u(i) * u(j) * h(t, k) + u(i) * u(k) * h(j, t) + u(j) * u(k) * h(i, t) + u(i) * u(t) * h(j, k) +
          u(j) * u(t) * h(i, k) + u(k) * u(t) * h(i, j));
    for (int l = 0; l < m; ++l) {
      s -= n2 * u(l) * (u3(l, j, k) * d(i, t) + u3(l, i, k) * d(j, t) + u3(i, j, l) * d(k, t));
      s -= u(l) * (u(j) * R(l, k) * d(i, t) + u(i) * R(l, k) * d(j, t) + u(i) * R(l, j) * d(k, t) +
                   u(j) * R(l, i) * d(k, t) + 2 * u(k) * R(l, j) * d(i, t) + 2 * u(k) * R(l, i) * d(j, t));
      // The second half carries u_t u_l u_{l.}, mirroring the Schouten law.
      s += 3 * n2 * u(l) *
           (h(l, t) * (u(i) * d(j, k) + u(j) * d(i, k) + 2 * u(k) * d(i, j)) +
            u(t) * (h(l, i) * d(j, k) + h(l, j) * d(i, k) + 2 * h(l, k) * d(i, j)));
      s += 2 * n2 * u(l) *
           (u(i) * h(l, k) * d(j, t) + u(j) * h(l, k) * d(i, t) + u(i) * h(l, j) * d(k, t) + u(j) * h(l, i) * d(k, t) +
            u(k) * h(l, i) * d(j, t) + u(k) * h(l, j) * d(i, t));
    }
    s -= g2 * (R(j, k) * d(i, t) + R(i, k) * d(j, t) + 2 * R(i, j) * d(k, t));
    s += n2 * g2 *
         (h(i, t) * d(j, k) + h(j, t) * d(i, k) + 2 * h(k, t) * d(i, j) + 2 * h(i, j) * d(k, t) + 2 * h(i, k) * d(j, t) +
          2 * h(j, k) * d(i, t));
    s -= n2 * hess_uu * (d(j, k) * d(i, t) + d(i, k) * d(j, t) + 2 * d(i, j) * d(k, t));
    s += 24 * n2 * u(i) * u(j) * u(k) * u(t);
    s -= 4 * n2 * g2 *
         (u(j) * u(k) * d(i, t) + u(i) * u(k) * d(j, t) + u(i) * u(j) * d(k, t) + u(i) * u(t) * d(j, k) +
          u(j) * u(t) * d(i, k) + 2 * u(k) * u(t) * d(i, j));
    s += n2 * g2 * g2 * (d(j, k) * d(i, t) + d(i, k) * d(j, t) + 2 * d(i, j) * d(k, t));
    return s;
  });
}

Tensor law_nabla_scalar(Base& B) {
  const int m = B.m;
  const double n2 = B.n2;
  const Tensor& S1 = B.dS(1);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor glap = B.grad_lapu();
  const double tilde_part = law_scalar(B);
  return Tensor::generate<1>(m, [&](int k) {
    double s = S1(k) - 2 * (m - 1) * glap(k) - 2 * tilde_part * u(k);
    for (int t = 0; t < m; ++t) s -= 2 * (m - 1) * n2 * u(t) * h(t, k);
    return s;
  });
}

Tensor law_hess_scalar(Base& B) {
  const int m = B.m;
  const double n2 = B.n2, g2 = B.gu2();
  const Tensor& S1 = B.dS(1);
  const Tensor& S2 = B.dS(2);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u3 = B.U(3);
  const Tensor& u4 = B.U(4);
  const Tensor glap = B.grad_lapu();
  const double tilde_part = law_scalar(B);
  const double tail = B.dot(S1, u) - 2 * (m - 1) * B.dot(u, glap) - 2 * (m - 1) * n2 * B.quad(h, u, u);
  return Tensor::generate<2>(m, [&](int k, int t) {
    double s = S2(k, t);
    for (int q = 0; q < m; ++q) {
      s -= 2 * (m - 1) * u4(q, q, k, t);
      s -= 2 * (m - 1) * n2 * h(k, q) * h(q, t);
      s -= 2 * (m - 1) * n2 * u(q) * u3(q, k, t);
      s += 6 * (m - 1) * n2 * (u(q) * h(q, k) * u(t) + u(q) * h(q, t) * u(k));
    }
    s += 6 * (m - 1) * (u(k) * glap(t) + u(t) * glap(k));
    s -= 3 * (S1(t) * u(k) + S1(k) * u(t));
    s -= 2 * tilde_part * (h(k, t) - 4 * u(k) * u(t) + g2 * d(k, t));
    s += tail * d(k, t);
    return s;
  });
}

double law_lap_scalar(Base& B) {
  const int m = B.m;
  const double n2 = B.n2, lap = B.lapu(), g2 = B.gu2(), S = B.S();
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u4 = B.U(4);
  double bilap = 0, h2 = 0;
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t) {
      bilap += u4(s, s, t, t);
      h2 += h(s, t) * h(s, t);
    }
  const double lapS = trace(B.dS(2));
  return lapS - 2 * (m - 1) * bilap - 2 * (m - 1) * n2 * h2 - 2 * (m - 1) * n2 * B.quad(B.R(), u, u) -
         4 * (m - 1) * (m - 4) * B.dot(u, B.grad_lapu()) - 2 * (m - 1) * n2 * (m - 6) * B.quad(h, u, u) +
         (m - 6) * B.dot(B.dS(1), u) - 2 * S * lap + 4 * (m - 1) * lap * lap + 2 * (m - 1) * (3 * m - 10) * g2 * lap +
         2 * (m - 1) * n2 * (m - 4) * g2 * g2 - 2 * (m - 4) * S * g2;
}

Tensor law_hessian_f(Base& B) {
  const Tensor& f1 = B.F(1);
  const Tensor& f2 = B.F(2);
  const Tensor& u = B.U(1);
  const double fu = B.dot(f1, u);
  return Tensor::generate<2>(B.m, [&](int i, int j) { return f2(i, j) - (f1(i) * u(j) + f1(j) * u(i)) + fu * d(i, j); });
}

double law_laplacian_f(Base& B) { return trace(B.F(2)) + B.n2 * B.dot(B.F(1), B.U(1)); }

Tensor law_third_f(Base& B) {
  const int m = B.m;
  const Tensor& f1 = B.F(1);
  const Tensor& f2 = B.F(2);
  const Tensor& f3 = B.F(3);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const double fu = B.dot(f1, u), g2 = B.gu2();
  return Tensor::generate<3>(m, [&](int i, int j, int k) {
    double s = f3(i, j, k) - 2 * (f2(i, j) * u(k) + f2(i, k) * u(j) + f2(j, k) * u(i)) -
               (f1(i) * h(j, k) + f1(j) * h(i, k)) + 3 * (f1(i) * u(j) + f1(j) * u(i)) * u(k) + 2 * u(i) * u(j) * f1(k);
    for (int t = 0; t < m; ++t) {
      s += u(t) * (f2(t, k) * d(i, j) + f2(t, j) * d(i, k) + f2(t, i) * d(j, k));
      s += f1(t) * h(t, k) * d(i, j);
    }
    s -= fu * (u(i) * d(j, k) + u(j) * d(i, k) + 2 * u(k) * d(i, j));
    s -= g2 * (f1(i) * d(j, k) + f1(j) * d(i, k));
    return s;
  });
}

Tensor law_third_f_traced(Base& B) {
  const int m = B.m;
  const Tensor& f1 = B.F(1);
  const Tensor& f2 = B.F(2);
  const Tensor& f3 = B.F(3);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const double fu = B.dot(f1, u), lapf = trace(f2);
  return Tensor::generate<1>(m, [&](int k) {
    double s = -2 * lapf * u(k) - B.n2 * 2 * fu * u(k);
    for (int t = 0; t < m; ++t) s += f3(t, t, k) + B.n2 * (f1(t) * h(t, k) + u(t) * f2(t, k));
    return s;
  });
}

Tensor law_schouten(Base& B) {
  const Tensor& A = B.A();
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const double n2 = B.n2, g2 = B.gu2();
  return Tensor::generate<2>(B.m, [&](int i, int j) {
    return A(i, j) - n2 * h(i, j) + n2 * u(i) * u(j) - 0.5 * n2 * g2 * d(i, j);
  });
}

Tensor law_nabla_schouten(Base& B) {
  const int m = B.m;
  const double n2 = B.n2, g2 = B.gu2();
  const Tensor& A = B.A();
  const Tensor& A1 = B.A(1);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u3 = B.U(3);
  return Tensor::generate<3>(m, [&](int i, int j, int k) {
    double s = A1(i, j, k) - n2 * u3(i, j, k);
    for (int l = 0; l < m; ++l) {
      s += u(l) * (A(l, i) * d(j, k) + A(l, j) * d(i, k));
      s -= n2 * u(l) * (h(l, k) * d(i, j) + h(l, j) * d(i, k) + h(l, i) * d(j, k));
    }
    s -= u(i) * A(j, k) + u(j) * A(i, k) + 2 * u(k) * A(i, j);
    s += 2 * n2 * (u(i) * h(j, k) + u(j) * h(i, k) + u(k) * h(i, j));
    s -= 4 * n2 * u(i) * u(j) * u(k);
    s += n2 * g2 * (u(i) * d(j, k) + u(j) * d(i, k) + u(k) * d(i, j));
    return s;
  });
}

Tensor law_nabla2_schouten(Base& B) {
  const int m = B.m;
  const double n2 = B.n2, g2 = B.gu2();
  const Tensor& A = B.A();
  const Tensor& A1 = B.A(1);
  const Tensor& A2 = B.A(2);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u3 = B.U(3);
  const Tensor& u4 = B.U(4);
  const double a_uu = B.quad(A, u, u);
  const double hess_uu = B.quad(h, u, u);
  return Tensor::generate<4>(m, [&](int i, int j, int k, int t) {
    double s = A2(i, j, k, t) - n2 * u4(i, j, k, t);
    for (int l = 0; l < m; ++l) {
      s += u(l) * (A1(l, i, t) * d(j, k) + A1(l, j, t) * d(i, k) + A1(i, l, k) * d(j, t) + A1(l, j, k) * d(i, t) +
                   A1(i, j, l) * d(k, t));
      s += A(i, l) * h(l, t) * d(j, k) + A(j, l) * h(l, t) * d(i, k);
    }
    s -= u(i) * A1(j, k, t) + u(j) * A1(i, k, t) + u(i) * A1(j, t, k) + u(j) * A1(i, t, k) + 3 * u(k) * A1(i, j, t) +
         3 * u(t) * A1(i, j, k);
    s -= h(i, t) * A(j, k) + h(j, t) * A(i, k) + 2 * h(k, t) * A(i, j);
    s += n2 * (2 * u(i) * u3(j, k, t) + u(i) * u3(j, t, k) + 2 * u(j) * u3(i, k, t) + u(j) * u3(i, t, k) +
               3 * u(k) * u3(i, j, t) + 3 * u(t) * u3(i, j, k));
    s += 2 * n2 * (h(i, j) * h(k, t) + h(i, k) * h(j, t) + h(j, k) * h(i, t));
    for (int l = 0; l < m; ++l) {
      s -= n2 * u(l) * (u3(l, k, t) * d(i, j) + u3(l, j, t) * d(i, k) + u3(l, i, t) * d(j, k));
      s -= n2 * (h(k, l) * h(l, t) * d(i, j) + h(j, l) * h(l, t) * d(i, k) + h(i, l) * h(l, t) * d(j, k));
      s -= A(t, l) * u(l) * u(i) * d(j, k) + A(t, l) * u(l) * u(j) * d(i, k) + 3 * A(i, l) * u(l) * u(t) * d(j, k) +
           3 * A(j, l) * u(l) * u(t) * d(i, k);
    }
    s += a_uu * (d(j, k) * d(i, t) + d(i, k) * d(j, t));
    s += 4 * (u(i) * u(t) * A(j, k) + u(j) * u(t) * A(i, k) + 2 * u(k) * u(t) * A(i, j)) +
         (2 * u(i) * u(j) * A(k, t) + 3 * u(i) * u(k) * A(j, t) + 3 * u(j) * u(k) * A(i, t));
    s -= 8 * n2 *
         (u(i) * u(j) * h(t, k) + u(i) * u(k) * h(j, t) + u(j) * u(k) * h(i, t) + u(i) * u(t) * h(j, k) +
          u(j) * u(t) * h(i, k) + u(k) * u(t) * h(i, j));
    for (int l = 0; l < m; ++l) {
      s -= n2 * u(l) * (u3(l, j, k) * d(i, t) + u3(l, i, k) * d(j, t) + u3(i, j, l) * d(k, t));
      s -= u(l) * (u(j) * A(l, k) * d(i, t) + u(i) * A(l, k) * d(j, t) + u(i) * A(l, j) * d(k, t) +
                   u(j) * A(l, i) * d(k, t) + 2 * u(k) * A(l, j) * d(i, t) + 2 * u(k) * A(l, i) * d(j, t));
      s += n2 * u(l) *
           (3 * u(i) * h(l, t) * d(j, k) + 3 * u(j) * h(l, t) * d(i, k) + 3 * u(k) * h(l, t) * d(i, j) +
            2 * u(i) * h(l, k) * d(j, t) + 2 * u(i) * h(l, j) * d(k, t) + 2 * u(j) * h(l, k) * d(i, t) +
            2 * u(k) * h(l, j) * d(i, t) + 2 * u(j) * h(l, i) * d(k, t) + 2 * u(k) * h(l, i) * d(j, t) +
            3 * u(t) * h(l, k) * d(i, j) + 3 * u(t) * h(l, j) * d(i, k) + 3 * u(t) * h(l, i) * d(j, k));
    }
    s -= g2 * (A(j, k) * d(i, t) + A(i, k) * d(j, t) + 2 * A(i, j) * d(k, t));
    s += g2 * n2 *
         (h(i, t) * d(j, k) + h(j, t) * d(i, k) + h(k, t) * d(i, j) + 2 * h(i, j) * d(k, t) + 2 * h(i, k) * d(j, t) +
          2 * h(j, k) * d(i, t));
    s -= n2 * hess_uu * (d(j, k) * d(i, t) + d(i, k) * d(j, t) + d(i, j) * d(k, t));
    s += 24 * n2 * u(i) * u(j) * u(k) * u(t);
    s -= 4 * n2 * g2 *
         (u(j) * u(k) * d(i, t) + u(i) * u(k) * d(j, t) + u(i) * u(j) * d(k, t) + u(i) * u(t) * d(j, k) +
          u(j) * u(t) * d(i, k) + u(k) * u(t) * d(i, j));
    s += n2 * g2 * g2 * (d(j, k) * d(i, t) + d(i, k) * d(j, t) + d(i, j) * d(k, t));
    return s;
  });
}

Tensor law_cotton(Base& B) {
  const int m = B.m;
  const Tensor& C = B.b.value(Q::Cotton);
  const Tensor& W = B.b.value(Q::Weyl);
  const Tensor& u = B.U(1);
  return Tensor::generate<3>(m, [&](int i, int j, int k) {
    double s = C(i, j, k);
    for (int t = 0; t < m; ++t) s -= B.n2 * u(t) * W(t, i, j, k);
    return s;
  });
}

Tensor law_bach(Base& B) {
  const int m = B.m;
  const Tensor& Bt = B.b.value(Q::Bach);
  const Tensor& C = B.b.value(Q::Cotton);
  const Tensor& W = B.b.value(Q::Weyl);
  const Tensor& u = B.U(1);
  return Tensor::generate<2>(m, [&](int i, int j) {
    double s = 0;
    for (int t = 0; t < m; ++t) {
      for (int k = 0; k < m; ++k) s += u(t) * u(k) * W(t, i, k, j);
      s += (C(i, j, t) + C(j, i, t)) * u(t) / B.n2;
    }
    return Bt(i, j) + (m - 4.0) * s;
  });
}

Tensor law_d_tensor(Base& B) { return duf_best_from(B.F(1), B.R(), B.S(), B.U(1), B.U(2)); }

Tensor law_nabla_d(Base& B) {
  const int m = B.m;
  const double c1 = 1.0 / (m - 2), c2 = 1.0 / ((m - 1.0) * (m - 2.0)), c3 = 1.0 / (m - 1);
  const Tensor& f = B.F(1);
  const Tensor& f2 = B.F(2);
  const Tensor& R = B.R();
  const Tensor& R1 = B.R(1);
  const double S = B.S();
  const Tensor& S1 = B.dS(1);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const Tensor& u3 = B.U(3);
  const Tensor glap = B.grad_lapu();
  const double lap = B.lapu(), g2 = B.gu2(), fu = B.dot(f, u);
  const double lg = lap - g2;
  const double ric_uf = B.quad(R, u, f), hess_uf = B.quad(h, u, f);
  return Tensor::generate<4>(m, [&](int i, int j, int k, int t) {
    const double dd = d(k, t) * d(i, j) - d(j, t) * d(i, k);
    double s = c1 * ((f2(k, t) * R(i, j) - f2(j, t) * R(i, k)) + (f(k) * R1(i, j, t) - f(j) * R1(i, k, t)));
    for (int q = 0; q < m; ++q) {
      s += c2 * (f2(q, t) * (R(q, k) * d(i, j) - R(q, j) * d(i, k)) +
                 f(q) * (R1(q, k, t) * d(i, j) - R1(q, j, t) * d(i, k)));
    }
    s -= c2 * (S1(t) * (f(k) * d(i, j) - f(j) * d(i, k)) + S * (f2(k, t) * d(i, j) - f2(j, t) * d(i, k)));
    s += (h(i, k) * f2(j, t) - h(i, j) * f2(k, t)) + (u3(i, k, t) * f(j) - u3(i, j, t) * f(k)) +
         (u(i) * u(j) * f2(k, t) - u(i) * u(k) * f2(j, t)) + c3 * glap(t) * (f(k) * d(i, j) - f(j) * d(i, k));
    s -= 3 * c1 * u(t) * (f(k) * R(i, j) - f(j) * R(i, k));
    for (int q = 0; q < m; ++q) s -= c3 * f(q) * (u3(q, k, t) * d(i, j) - u3(q, j, t) * d(i, k));
    s -= c1 * f(t) * (u(k) * R(i, j) - u(j) * R(i, k));
    s += c1 * fu * (R(i, j) * d(k, t) - R(i, k) * d(j, t));
    for (int q = 0; q < m; ++q) {
      s += c1 * u(q) * R(q, i) * (f(k) * d(j, t) - f(j) * d(k, t));
      s += c1 * u(q) * d(i, t) * (f(k) * R(q, j) - f(j) * R(q, k));
    }
    s += 3 * u(t) * (f(k) * h(i, j) - f(j) * h(i, k)) + f(t) * (u(k) * h(i, j) - u(j) * h(i, k)) -
         fu * (h(i, j) * d(k, t) - h(i, k) * d(j, t)) + fu * u(i) * (u(j) * d(k, t) - u(k) * d(j, t));
    s += c3 * lg * (f2(k, t) * d(i, j) - f2(j, t) * d(i, k)) - 5 * u(i) * u(t) * (u(j) * f(k) - u(k) * f(j));
    s -= 3 * c3 * lg * u(t) * (f(k) * d(i, j) - f(j) * d(i, k)) + c3 * lg * f(t) * (u(k) * d(i, j) - u(j) * d(i, k));
    s += c3 * fu * lap * (d(i, j) * d(k, t) - d(i, k) * d(j, t)) + g2 * u(i) * (f(k) * d(j, t) - f(j) * d(k, t)) +
         g2 * d(i, t) * (u(j) * f(k) - u(k) * f(j));
    s -= c1 * u(i) * (f(k) * R(j, t) - f(j) * R(k, t)) + c1 * R(i, t) * (u(j) * f(k) - u(k) * f(j));
    s += 2 * u(i) * (f(k) * h(j, t) - f(j) * h(k, t)) + 2 * h(i, t) * (u(j) * f(k) - u(k) * f(j));
    for (int q = 0; q < m; ++q) {
      s -= u(q) * h(q, i) * (f(k) * d(j, t) - f(j) * d(k, t));
      s -= u(q) * d(i, t) * (f(k) * h(q, j) - f(j) * h(q, k));
      s -= 2 * c3 * u(q) * h(q, t) * (f(k) * d(i, j) - f(j) * d(i, k));
      s -= c3 * f2(q, t) * (h(k, q) * d(i, j) - h(j, q) * d(i, k));
      s += c3 * u(q) * f2(q, t) * (u(k) * d(i, j) - u(j) * d(i, k));
      s -= 3 * c2 * u(t) * f(q) * (R(q, k) * d(i, j) - R(q, j) * d(i, k));
      s -= c2 * f(q) * R(q, t) * (u(k) * d(i, j) - u(j) * d(i, k));
      s += 3 * c3 * f(q) * u(t) * (h(q, k) * d(i, j) - h(q, j) * d(i, k));
      s += 2 * c3 * f(q) * h(q, t) * (u(k) * d(i, j) - u(j) * d(i, k));
    }
    s -= 4 * c3 * fu * u(t) * (u(k) * d(i, j) - u(j) * d(i, k));
    s += c3 * fu * (h(k, t) * d(i, j) - h(j, t) * d(i, k));
    // Ric(grad u, grad f) here; with Ric(grad f, grad f) the law fails even on solitons.
    s += c2 * ric_uf * dd - c3 * hess_uf * dd;
    s += 3 * c2 * S * u(t) * (f(k) * d(i, j) - f(j) * d(i, k)) + c2 * S * f(t) * (u(k) * d(i, j) - u(j) * d(i, k));
    s -= c2 * fu * S * dd;
    return s;
  });
}

Tensor law_lie_metric(Base& B) {
  const int m = B.m;
  const Tensor& X0 = B.X(0);
  const Tensor& X1 = B.X(1);
  const double xu = B.dot(X0, B.U(1));
  const double e2u = std::exp(2 * B.b.scalar(Q::U));
  return Tensor::generate<2>(m, [&](int i, int j) { return e2u * (X1(i, j) + X1(j, i) + 2 * xu * d(i, j)); });
}

Tensor law_nabla_X(Base& B) {
  const Tensor& X0 = B.X(0);
  const Tensor& X1 = B.X(1);
  const Tensor& u = B.U(1);
  const double xu = B.dot(X0, u);
  return Tensor::generate<2>(B.m, [&](int i, int k) { return X1(i, k) + X0(i) * u(k) + xu * d(i, k) - u(i) * X0(k); });
}

Tensor law_sym_nabla_X(Base& B) {
  const Tensor& X1 = B.X(1);
  const double xu = B.dot(B.X(0), B.U(1));
  return Tensor::generate<2>(B.m, [&](int i, int k) { return X1(i, k) + X1(k, i) + 2 * xu * d(i, k); });
}

double law_div_X(Base& B) { return trace(B.X(1)) + B.m * B.dot(B.X(0), B.U(1)); }

Tensor law_nabla2_X(Base& B) {
  const int m = B.m;
  const Tensor& X0 = B.X(0);
  const Tensor& X1 = B.X(1);
  const Tensor& X2 = B.X(2);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  const double xu = B.dot(X0, u), g2 = B.gu2();
  return Tensor::generate<3>(m, [&](int i, int j, int k) {
    double s = X2(i, j, k) + (X0(i) * h(j, k) - X0(j) * h(i, k)) - (X1(j, k) + X1(k, j)) * u(i) -
               (X0(i) * u(j) - X0(j) * u(i)) * u(k);
    for (int t = 0; t < m; ++t) {
      s += (X0(t) * h(t, k) + u(t) * X1(t, k)) * d(i, j);
      s += u(t) * (X1(i, t) * d(j, k) + X1(t, j) * d(i, k));
    }
    s += xu * (u(j) * d(i, k) - u(i) * d(j, k)) + g2 * (X0(i) * d(j, k) - X0(j) * d(i, k));
    return s;
  });
}

Tensor law_nabla2_X_traced(Base& B) {
  const int m = B.m;
  const Tensor& X0 = B.X(0);
  const Tensor& X1 = B.X(1);
  const Tensor& X2 = B.X(2);
  const Tensor& u = B.U(1);
  const Tensor& h = B.U(2);
  return Tensor::generate<1>(m, [&](int k) {
    double s = 0;
    for (int t = 0; t < m; ++t) s += X2(t, t, k) + m * (X0(t) * h(t, k) + u(t) * X1(t, k));
    return s;
  });
}

/// Lie derivative of g~ in coordinates, expressed in the base orthonormal frame.
Tensor lie_metric_direct(const ConformalPair& pair, CurvatureBundle& base, std::span<const double> p) {
  const Tensor L = lie_derivative_metric(pair.tilde, pair.tilde.X(), p).components;
  const Tensor E = value_of(base.local().frame());
  const int m = L.dim();
  return Tensor::generate<2>(m, [&](int a, int b) {
    double s = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s += E(a, i) * E(b, j) * L(i, j);
    return s;
  });
}

}  // namespace

const std::vector<LawInfo>& law_registry() { return kLaws; }

const LawInfo& law_info(Law law) {
  for (const auto& l : kLaws)
    if (l.law == law) return l;
  throw ConfigError("unknown law");
}

std::optional<Law> law_from_id(const std::string& id) {
  for (const auto& l : kLaws)
    if (id == l.id) return l.law;
  return std::nullopt;
}

ConformalPair rescale(const GeometryInstance& g, const std::string& u) {
  GeometrySpec s = g.spec();
  s.u = u;
  GeometryInstance base(std::move(s), JetConfig{g.order()});
  GeometryInstance tilde = base.rescaled();
  return {std::move(base), std::move(tilde)};
}

ConformalPair rescale(const GeometryInstance& g) {
  if (!g.has_u()) throw MissingIngredient("no u");
  return rescale(g, *g.spec().u);
}

ConformalPoint::ConformalPoint(const ConformalPair& pair, std::span<const double> p)
    : pair_(pair), base_(pair.base, p), tilde_(pair.tilde, p), u0_(base_.scalar(Q::U)) {}

Tensor ConformalPoint::predict(Law law) {
  Base B{base_, base_.dim(), base_.dim() - 2.0};
  const int m = B.m;
  switch (law) {
    case Law::Riemann04: return law_riemann(B);
    case Law::Ricci: return law_ricci(B);
    case Law::Scalar: return scalar_tensor(m, law_scalar(B));
    case Law::NablaRicci: return law_nabla_ricci(B);
    case Law::Nabla2Ricci: return law_nabla2_ricci(B);
    case Law::NablaScalar: return law_nabla_scalar(B);
    case Law::HessScalar: return law_hess_scalar(B);
    case Law::LapScalar: return scalar_tensor(m, law_lap_scalar(B));
    case Law::HessianF: return law_hessian_f(B);
    case Law::LaplacianF: return scalar_tensor(m, law_laplacian_f(B));
    case Law::ThirdF: return law_third_f(B);
    case Law::ThirdFTraced: return law_third_f_traced(B);
    case Law::Schouten: return law_schouten(B);
    case Law::NablaSchouten: return law_nabla_schouten(B);
    case Law::Nabla2Schouten: return law_nabla2_schouten(B);
    case Law::Weyl13: return base_.value(Q::Weyl);
    case Law::Cotton: return law_cotton(B);
    case Law::Bach: return law_bach(B);
    case Law::DTensor:
    case Law::DTensorReverse: return law_d_tensor(B);
    case Law::NablaD: return law_nabla_d(B);
    case Law::LieMetric: return law_lie_metric(B);
    case Law::NablaX: return law_nabla_X(B);
    case Law::SymNablaX: return law_sym_nabla_X(B);
    case Law::DivX: return scalar_tensor(m, law_div_X(B));
    case Law::Nabla2X: return law_nabla2_X(B);
    case Law::Nabla2XTraced: return law_nabla2_X_traced(B);
  }
  throw ConfigError("unknown law");
}

Tensor ConformalPoint::direct(Law law) {
  const int m = tilde_.dim();
  auto& T = tilde_;
  Tensor q;
  switch (law) {
    case Law::Riemann04: q = T.value(Q::Riemann); break;
    case Law::Ricci: q = T.value(Q::Ricci); break;
    case Law::Scalar: q = T.value(Q::Scalar); break;
    case Law::NablaRicci: q = T.value(Q::Ricci, 1); break;
    case Law::Nabla2Ricci: q = T.value(Q::Ricci, 2); break;
    case Law::NablaScalar: q = T.value(Q::Scalar, 1); break;
    case Law::HessScalar: q = T.value(Q::Scalar, 2); break;
    case Law::LapScalar: q = scalar_tensor(m, trace(T.value(Q::Scalar, 2))); break;
    case Law::HessianF: q = T.value(Q::F, 2); break;
    case Law::LaplacianF: q = scalar_tensor(m, trace(T.value(Q::F, 2))); break;
    case Law::ThirdF: q = T.value(Q::F, 3); break;
    case Law::ThirdFTraced: {
      const Tensor& f3 = T.value(Q::F, 3);
      q = Tensor::generate<1>(m, [&](int k) {
        double s = 0;
        for (int t = 0; t < m; ++t) s += f3(t, t, k);
        return s;
      });
      break;
    }
    case Law::Schouten: q = T.value(Q::Schouten); break;
    case Law::NablaSchouten: q = T.value(Q::Schouten, 1); break;
    case Law::Nabla2Schouten: q = T.value(Q::Schouten, 2); break;
    case Law::Weyl13: q = T.value(Q::Weyl); break;
    case Law::Cotton: q = T.value(Q::Cotton); break;
    case Law::Bach: q = T.value(Q::Bach); break;
    case Law::DTensor:
    case Law::DTensorReverse: q = T.value(Q::D); break;
    case Law::NablaD: q = T.value(Q::D, 1); break;
    case Law::LieMetric: return lie_metric_direct(pair_, base_, base_.local().point());
    case Law::NablaX: q = T.value(Q::X, 1); break;
    case Law::SymNablaX: {
      const Tensor& X1 = T.value(Q::X, 1);
      q = Tensor::generate<2>(m, [&](int i, int k) { return X1(i, k) + X1(k, i); });
      break;
    }
    case Law::DivX: q = scalar_tensor(m, trace(T.value(Q::X, 1))); break;
    case Law::Nabla2X: q = T.value(Q::X, 2); break;
    case Law::Nabla2XTraced: {
      const Tensor& X2 = T.value(Q::X, 2);
      q = Tensor::generate<1>(m, [&](int k) {
        double s = 0;
        for (int t = 0; t < m; ++t) s += X2(t, t, k);
        return s;
      });
      break;
    }
  }
  return std::exp(law_info(law).exponent * u0_) * q;
}

namespace {

TensorValue wrap(std::span<const double> p, Tensor t) {
  TensorValue v;
  v.point.assign(p.begin(), p.end());
  v.frame = FrameKind::Orthonormal;
  v.base_rank = t.rank();
  v.components = std::move(t);
  return v;
}

}  // namespace

TensorValue predict(const ConformalPair& pair, Law law, std::span<const double> p) {
  ConformalPoint cp(pair, p);
  return wrap(p, cp.predict(law));
}

TensorValue direct(const ConformalPair& pair, Law law, std::span<const double> p) {
  ConformalPoint cp(pair, p);
  return wrap(p, cp.direct(law));
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::Error: return "error";
  }
  return "?";
}

CheckResult verify_transform(const ConformalPair& pair, Law law, const std::vector<std::vector<double>>& points,
                             const VerifyOptions& opts) {
  const LawInfo& info = law_info(law);
  CheckResult r;
  r.id = std::string("CONF.") + info.id;
  r.label = info.label;
  r.tol_class = opts.tol_override.value_or(tol_class_for(info.derivs));
  r.tolerance = tolerance(r.tol_class);
  auto has = [&](Structure s) { return std::find(opts.certified.begin(), opts.certified.end(), s) != opts.certified.end(); };
  if (info.needs_f && !pair.base.has_f()) {
    r.reason = "no f";
    return r;
  }
  if (info.needs_X && !pair.base.has_X()) {
    r.reason = "no X";
    return r;
  }
  if (info.gate == LawGate::TildeGradientSoliton && !has(Structure::ConformalGradientSoliton)) {
    r.reason = "rescaled metric not certified as a gradient soliton";
    return r;
  }
  if (info.gate == LawGate::BaseGradientSoliton && !has(Structure::GradientSoliton)) {
    r.reason = "base metric not certified as a gradient soliton";
    return r;
  }
  if (pair.base.order() < info.derivs) {
    r.reason = "jet order " + std::to_string(pair.base.order()) + " < required " + std::to_string(info.derivs);
    return r;
  }
  try {
    for (const auto& p : points) {
      ConformalPoint cp(pair, p);
      const double res = residual(cp.direct(law), cp.predict(law));
      if (r.points == 0 || res > r.max_residual) {
        r.max_residual = res;
        r.worst_point = p;
      }
      ++r.points;
    }
  } catch (const JetOrderError& e) {
    r.status = CheckStatus::Skipped;
    r.reason = e.what();
    return r;
  } catch (const Error& e) {
    r.status = CheckStatus::Error;
    r.reason = e.what();
    return r;
  }
  r.status = r.max_residual < r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return r;
}

}  // namespace ctl

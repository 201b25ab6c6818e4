#include "ctl/identities.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <nlohmann/json.hpp>
#include <thread>

#include "ctl/error.hpp"

namespace ctl {

namespace {

using Q = Quantity;
using Ctx = IdentityContext;

inline double d(int i, int j) { return i == j ? 1.0 : 0.0; }

template <int N, class F>
Tensor gen(int m, F&& f) {
  return Tensor::generate<N>(m, std::forward<F>(f));
}

Tensor num(int m, double v) { return Tensor(m, 0, std::vector<double>{v}); }

double trace(const Tensor& T) {
  double s = 0;
  for (int t = 0; t < T.dim(); ++t) s += T(t, t);
  return s;
}

double dot(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (int t = 0; t < a.dim(); ++t) s += a(t) * b(t);
  return s;
}

/// H(a, b) for a 2-tensor H and vectors a, b.
double quad(const Tensor& H, const Tensor& a, const Tensor& b) {
  const int m = H.dim();
  double s = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s += H(i, j) * a(i) * b(j);
  return s;
}

/// T_{..tt,k} for a 3-tensor: contraction of the first two slots.
Tensor trace12(const Tensor& T) {
  const int m = T.dim();
  return gen<1>(m, [&](int k) { return sum(m, [&](int t) { return T(t, t, k); }); });
}

double frob(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

Ingredient I(Q q, int k = 0) { return {q, k, false}; }
Ingredient Tl(Q q, int k = 0) { return {q, k, true}; }

constexpr Requirements kNone{};
constexpr Requirements kF{.f = true};
constexpr Requirements kX{.X = true};
constexpr Requirements kFL{.f = true, .lambda = true};
constexpr Requirements kXL{.X = true, .lambda = true};
constexpr Requirements kUL{.u = true, .lambda = true};
constexpr Requirements kUFL{.u = true, .f = true, .lambda = true};
constexpr Requirements kUXL{.u = true, .X = true, .lambda = true};

struct Builder {
  std::vector<IdentityRecord> out;
  Family fam = Family::COMM;
  std::optional<Structure> hyp;

  void add(std::string id, std::string label, std::string anchor, Requirements req, std::vector<Ingredient> ing,
           std::function<Sides(Ctx&)> eval) {
    out.push_back({std::string(family_name(fam)) + "." + id, fam, std::move(label), std::move(anchor), req,
                   std::move(ing), hyp, std::move(eval)});
  }
};

// ---------------------------------------------------------------------------
// Commutation rules, Bianchi identities and the divergence identities of the
// Cotton and Bach tensors. These hold on every metric.

void add_commutation(Builder& b) {
  b.fam = Family::COMM;
  b.hyp = std::nullopt;

  b.add("hessian_symmetry", "SecondDerivFunction", "the Hessian of a function is symmetric", kF, {I(Q::F, 2)},
        [](Ctx& c) {
          const Tensor& F2 = c.v(Q::F, 2);
          return Sides{F2, gen<2>(c.dim(), [&](int i, int j) { return F2(j, i); })};
        });

  b.add("third_f_symmetry", "CovDerivSecondDerivFct", "f_ijk is symmetric in its first two indices", kF,
        {I(Q::F, 3)}, [](Ctx& c) {
          const Tensor& F3 = c.v(Q::F, 3);
          return Sides{F3, gen<3>(c.dim(), [&](int i, int j, int k) { return F3(j, i, k); })};
        });

  b.add("third_f_riemann", "ThirdDerivFunctionRiem", "commuting the last two derivatives of f_ij costs f_t R_tijk",
        kF, {I(Q::F, 3), I(Q::Riemann)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F1 = c.v(Q::F, 1), &F3 = c.v(Q::F, 3), &R = c.v(Q::Riemann);
          return Sides{F3, gen<3>(m, [&](int i, int j, int k) {
                         return F3(i, k, j) + sum(m, [&](int t) { return F1(t) * R(t, i, j, k); });
                       })};
        });

  b.add("third_f_weyl", "ThirdDerivFunctionWeyl", "third derivative commutation with Riemann split into Weyl and Ricci",
        kF, {I(Q::F, 3), I(Q::Weyl)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2), bb = 1.0 / ((m - 1.0) * (m - 2.0));
          const Tensor &F1 = c.v(Q::F, 1), &F3 = c.v(Q::F, 3), &W = c.v(Q::Weyl), &Ric = c.v(Q::Ricci);
          const double S = c.s(Q::Scalar);
          return Sides{F3, gen<3>(m, [&](int i, int j, int k) {
                         double r = F3(i, k, j);
                         r += sum(m, [&](int t) { return F1(t) * W(t, i, j, k); });
                         r += a * sum(m, [&](int t) { return F1(t) * (Ric(t, j) * d(i, k) - Ric(t, k) * d(i, j)); });
                         r += a * (F1(j) * Ric(i, k) - F1(k) * Ric(i, j));
                         r -= S * bb * (F1(j) * d(i, k) - F1(k) * d(i, j));
                         return r;
                       })};
        });

  b.add("third_f_schouten", "commutatioThirdDerFunctWeilSchouten",
        "third derivative commutation with Riemann split into Weyl and Schouten", kF, {I(Q::F, 3), I(Q::Weyl)},
        [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2);
          const Tensor &F1 = c.v(Q::F, 1), &F3 = c.v(Q::F, 3), &W = c.v(Q::Weyl), &A = c.v(Q::Schouten);
          return Sides{F3, gen<3>(m, [&](int i, int j, int k) {
                         double r = F3(i, k, j);
                         r += sum(m, [&](int t) { return F1(t) * W(t, i, j, k); });
                         r += a * sum(m, [&](int t) { return F1(t) * (A(t, j) * d(i, k) - A(t, k) * d(i, j)); });
                         r += a * (F1(j) * A(i, k) - F1(k) * A(i, j));
                         return r;
                       })};
        });

  b.add("fourth_f_riemann", "FourthDerivFunctionRiem", "commuting the last two of four derivatives of f", kF,
        {I(Q::F, 4), I(Q::Riemann)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F2 = c.v(Q::F, 2), &F4 = c.v(Q::F, 4), &R = c.v(Q::Riemann);
          return Sides{F4, gen<4>(m, [&](int i, int j, int k, int t) {
                         return F4(i, j, t, k) +
                                sum(m, [&](int l) { return F2(i, l) * R(l, j, k, t) + F2(j, l) * R(l, i, k, t); });
                       })};
        });

  b.add("third_in_fourth_f", "ThirdDerivinfourth", "derivative of the third order commutation rule", kF,
        {I(Q::F, 4), I(Q::Riemann, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F1 = c.v(Q::F, 1), &F2 = c.v(Q::F, 2), &F4 = c.v(Q::F, 4), &R = c.v(Q::Riemann),
                       &dR = c.v(Q::Riemann, 1);
          return Sides{F4, gen<4>(m, [&](int i, int j, int k, int t) {
                         return F4(i, k, j, t) +
                                sum(m, [&](int s) { return F2(s, t) * R(s, i, j, k) + F1(s) * dR(s, i, j, k, t); });
                       })};
        });

  b.add("fourth_f_pairs", "Function12with34", "swapping the first and second pair of four derivatives of f", kF,
        {I(Q::F, 4), I(Q::Riemann, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F1 = c.v(Q::F, 1), &F2 = c.v(Q::F, 2), &F4 = c.v(Q::F, 4), &R = c.v(Q::Riemann),
                       &dR = c.v(Q::Riemann, 1);
          return Sides{F4, gen<4>(m, [&](int i, int j, int k, int t) {
                         return F4(k, t, i, j) + sum(m, [&](int s) {
                                  return F2(i, s) * R(s, k, j, t) + F2(j, s) * R(s, k, i, t) + F2(k, s) * R(s, i, j, t) +
                                         F2(t, s) * R(s, i, j, k) + F1(s) * (dR(s, i, j, k, t) - dR(s, k, t, i, j));
                                });
                       })};
        });

  b.add("traced_third_f", "TracedThirdDerivFunctionRicci", "gradient of the Laplacian against the traced third derivative",
        kF, {I(Q::F, 3), I(Q::Ricci)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F1 = c.v(Q::F, 1), &F3 = c.v(Q::F, 3), &Ric = c.v(Q::Ricci);
          return Sides{gen<1>(m, [&](int i) { return sum(m, [&](int t) { return F3(i, t, t); }); }),
                       gen<1>(m, [&](int i) { return sum(m, [&](int t) { return F3(t, t, i) + F1(t) * Ric(t, i); }); })};
        });

  b.add("traced_fourth_f", "TracedFourthDerivFct", "Laplacian of the Hessian against the Hessian of the Laplacian", kF,
        {I(Q::F, 4), I(Q::Ricci, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F1 = c.v(Q::F, 1), &F2 = c.v(Q::F, 2), &F4 = c.v(Q::F, 4), &R = c.v(Q::Riemann),
                       &Ric = c.v(Q::Ricci), &dRic = c.v(Q::Ricci, 1);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return F4(i, j, t, t); }); }),
                       gen<2>(m, [&](int i, int j) {
                         double r = sum(m, [&](int t) {
                           return F4(t, t, i, j) + F2(i, t) * Ric(t, j) + F2(j, t) * Ric(t, i) +
                                  F1(t) * (dRic(t, j, i) + dRic(t, i, j)) - F1(t) * dRic(i, j, t);
                         });
                         r -= 2 * sum2(m, [&](int s, int t) { return F2(s, t) * R(i, s, j, t); });
                         return r;
                       })};
        });

  b.add("traced_fourth_f_alt", "TracedFourthDerivFctSecondVersion",
        "Laplacian of the Hessian, with the divergence of Riemann", kF, {I(Q::F, 4), I(Q::Riemann, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &F1 = c.v(Q::F, 1), &F2 = c.v(Q::F, 2), &F4 = c.v(Q::F, 4), &R = c.v(Q::Riemann),
                       &dR = c.v(Q::Riemann, 1), &Ric = c.v(Q::Ricci), &dRic = c.v(Q::Ricci, 1);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return F4(i, j, t, t); }); }),
                       gen<2>(m, [&](int i, int j) {
                         double r = sum(m, [&](int t) {
                           return F4(t, t, i, j) + F2(i, t) * Ric(t, j) + F2(j, t) * Ric(t, i) + F1(t) * dRic(i, j, t);
                         });
                         r -= 2 * sum2(m, [&](int s, int t) { return F2(s, t) * R(i, s, j, t); });
                         r -= sum2(m, [&](int s, int t) { return F1(t) * (dR(s, i, t, j, s) + dR(s, j, t, i, s)); });
                         return r;
                       })};
        });

  b.add("vector_second", "CommutationsForVectorFields(1)", "commuting two derivatives of a vector field", kX,
        {I(Q::X, 2), I(Q::Riemann)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &X = c.v(Q::X), &X2 = c.v(Q::X, 2), &R = c.v(Q::Riemann);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return X2(i, j, k) - X2(i, k, j); }),
                       gen<3>(m, [&](int i, int j, int k) { return sum(m, [&](int t) { return X(t) * R(t, i, j, k); }); })};
        });

  b.add("vector_third_inner", "CommutationsForVectorFields(2)",
        "commuting the first two of three derivatives of a vector field", kX, {I(Q::X, 3), I(Q::Riemann, 1)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &X = c.v(Q::X), &X1 = c.v(Q::X, 1), &X3 = c.v(Q::X, 3), &R = c.v(Q::Riemann),
                       &dR = c.v(Q::Riemann, 1);
          return Sides{gen<4>(m, [&](int i, int j, int k, int l) { return X3(i, j, k, l) - X3(i, k, j, l); }),
                       gen<4>(m, [&](int i, int j, int k, int l) {
                         return sum(m, [&](int t) { return R(t, i, j, k) * X1(t, l) + dR(t, i, j, k, l) * X(t); });
                       })};
        });

  b.add("vector_third_outer", "CommutationsForVectorFields(3)",
        "commuting the last two of three derivatives of a vector field", kX, {I(Q::X, 3), I(Q::Riemann)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &X1 = c.v(Q::X, 1), &X3 = c.v(Q::X, 3), &R = c.v(Q::Riemann);
          return Sides{gen<4>(m, [&](int i, int j, int k, int l) { return X3(i, j, k, l) - X3(i, j, l, k); }),
                       gen<4>(m, [&](int i, int j, int k, int l) {
                         return sum(m, [&](int t) { return R(t, i, k, l) * X1(t, j) + R(t, j, k, l) * X1(i, t); });
                       })};
        });

  b.add("first_bianchi", "FirstBianchiRiem", "cyclic sum of the last three Riemann indices vanishes", kNone,
        {I(Q::Riemann)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor& R = c.v(Q::Riemann);
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return R(i, j, k, t) + R(i, t, j, k) + R(i, k, t, j); }),
                       Tensor(m, 4, 0.0)};
        });

  b.add("second_bianchi", "SecondBianchiRiem", "cyclic sum over the derivative and last two Riemann indices", kNone,
        {I(Q::Riemann, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor& dR = c.v(Q::Riemann, 1);
          return Sides{gen<5>(m,
                              [&](int i, int j, int k, int t, int l) {
                                return dR(i, j, k, t, l) + dR(i, j, l, k, t) + dR(i, j, t, l, k);
                              }),
                       Tensor(m, 5, 0.0)};
        });

  b.add("riemann_second", "SecondDerivRiem", "commuting two derivatives of Riemann", kNone, {I(Q::Riemann, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &d2R = c.v(Q::Riemann, 2);
          return Sides{gen<6>(m, [&](int i, int j, int k, int t, int l, int r) { return d2R(i, j, k, t, l, r) - d2R(i, j, k, t, r, l); }),
                       gen<6>(m, [&](int i, int j, int k, int t, int l, int r) {
                         return sum(m, [&](int s) {
                           return R(s, j, k, t) * R(s, i, l, r) + R(i, s, k, t) * R(s, j, l, r) +
                                  R(i, j, s, t) * R(s, k, l, r) + R(i, j, k, s) * R(s, t, l, r);
                         });
                       })};
        });

  b.add("riemann_third", "ThirdDerivRiem", "commuting the last two of three derivatives of Riemann", kNone,
        {I(Q::Riemann, 3)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &dR = c.v(Q::Riemann, 1), &d3R = c.v(Q::Riemann, 3);
          return Sides{gen<7>(m, [&](int i, int j, int k, int t, int l, int r, int s) {
                         return d3R(i, j, k, t, l, r, s) - d3R(i, j, k, t, l, s, r);
                       }),
                       gen<7>(m, [&](int i, int j, int k, int t, int l, int r, int s) {
                         return sum(m, [&](int v) {
                           return dR(v, j, k, t, l) * R(v, i, r, s) + dR(i, v, k, t, l) * R(v, j, r, s) +
                                  dR(i, j, v, t, l) * R(v, k, r, s) + dR(i, j, k, v, l) * R(v, t, r, s) +
                                  dR(i, j, k, t, v) * R(v, l, r, s);
                         });
                       })};
        });

  b.add("ricci_skew", "LemmaFSTDerivRicci(1)", "skew part of the derivative of Ricci is a divergence of Riemann", kNone,
        {I(Q::Riemann, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dRic = c.v(Q::Ricci, 1), &dR = c.v(Q::Riemann, 1);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return dRic(i, j, k) - dRic(i, k, j); }),
                       gen<3>(m, [&](int i, int j, int k) { return -sum(m, [&](int t) { return dR(t, i, j, k, t); }); })};
        });

  b.add("ricci_second", "LemmaFSTDerivRicci(2)", "commuting two derivatives of Ricci", kNone, {I(Q::Ricci, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &Ric = c.v(Q::Ricci), &d2Ric = c.v(Q::Ricci, 2);
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return d2Ric(i, j, k, t) - d2Ric(i, j, t, k); }),
                       gen<4>(m, [&](int i, int j, int k, int t) {
                         return sum(m, [&](int l) { return R(l, i, k, t) * Ric(l, j) + R(l, j, k, t) * Ric(l, i); });
                       })};
        });

  b.add("ricci_third", "LemmaFSTDerivRicci(3)", "commuting the last two of three derivatives of Ricci", kNone,
        {I(Q::Ricci, 3)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &dRic = c.v(Q::Ricci, 1), &d3Ric = c.v(Q::Ricci, 3);
          return Sides{gen<5>(m, [&](int i, int j, int k, int t, int l) { return d3Ric(i, j, k, t, l) - d3Ric(i, j, k, l, t); }),
                       gen<5>(m, [&](int i, int j, int k, int t, int l) {
                         return sum(m, [&](int s) {
                           return dRic(s, j, k) * R(s, i, t, l) + dRic(i, s, k) * R(s, j, t, l) + dRic(i, j, s) * R(s, k, t, l);
                         });
                       })};
        });

  // Printed with the factor on the wrong side; the contracted second Bianchi
  // identity is div Ric = dS / 2.
  b.add("schur", "-", "contracted second Bianchi identity", kNone, {I(Q::Ricci, 1)}, [](Ctx& c) {
    const int m = c.dim();
    const Tensor &dRic = c.v(Q::Ricci, 1), &dS = c.v(Q::Scalar, 1);
    return Sides{gen<1>(m, [&](int i) { return sum(m, [&](int k) { return dRic(i, k, k); }); }),
                 gen<1>(m, [&](int i) { return 0.5 * dS(i); })};
  });

  b.add("ricci_div_commuted", "-", "second divergence of Ricci with commuted derivatives", kNone, {I(Q::Ricci, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &Ric = c.v(Q::Ricci), &d2Ric = c.v(Q::Ricci, 2), &d2S = c.v(Q::Scalar, 2);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int k) { return d2Ric(i, k, j, k); }); }),
                       gen<2>(m, [&](int i, int j) {
                         return 0.5 * d2S(i, j) - sum2(m, [&](int t, int k) { return Ric(t, k) * R(i, t, j, k); }) +
                                sum(m, [&](int t) { return Ric(i, t) * Ric(t, j); });
                       })};
        });

  b.add("cotton_derivative", "-", "derivative of the Cotton tensor through Ricci and the scalar Hessian", kNone,
        {I(Q::Cotton, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const double e = 1.0 / (2.0 * (m - 1));
          const Tensor &dC = c.v(Q::Cotton, 1), &d2Ric = c.v(Q::Ricci, 2), &d2S = c.v(Q::Scalar, 2);
          return Sides{dC, gen<4>(m, [&](int i, int j, int k, int t) {
                         return d2Ric(i, j, k, t) - d2Ric(i, k, j, t) - e * (d2S(k, t) * d(i, j) - d2S(j, t) * d(i, k));
                       })};
        });

  b.add("schouten_skew", "-", "Cotton tensor as a divergence of Weyl", Requirements{.min_dim = 4},
        {I(Q::Schouten, 1), I(Q::Weyl, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const double e = (m - 2.0) / (m - 3.0);
          const Tensor &dA = c.v(Q::Schouten, 1), &dW = c.v(Q::Weyl, 1);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return dA(i, j, k) - dA(i, k, j); }),
                       gen<3>(m, [&](int i, int j, int k) { return e * sum(m, [&](int t) { return dW(t, i, k, j, t); }); })};
        });

  b.add("schouten_second", "-", "commuting two derivatives of Schouten", kNone, {I(Q::Schouten, 2)}, [](Ctx& c) {
    const int m = c.dim();
    const Tensor &R = c.v(Q::Riemann), &A = c.v(Q::Schouten), &d2A = c.v(Q::Schouten, 2);
    return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return d2A(i, j, k, t) - d2A(i, j, t, k); }),
                 gen<4>(m, [&](int i, int j, int k, int t) {
                   return sum(m, [&](int l) { return R(l, i, k, t) * A(l, j) + R(l, j, k, t) * A(l, i); });
                 })};
  });

  b.add("schouten_third", "-", "commuting the last two of three derivatives of Schouten", kNone,
        {I(Q::Schouten, 3)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &dA = c.v(Q::Schouten, 1), &d3A = c.v(Q::Schouten, 3);
          return Sides{gen<5>(m, [&](int i, int j, int k, int t, int l) { return d3A(i, j, k, t, l) - d3A(i, j, k, l, t); }),
                       gen<5>(m, [&](int i, int j, int k, int t, int l) {
                         return sum(m, [&](int s) {
                           return dA(s, j, k) * R(s, i, t, l) + dA(i, s, k) * R(s, j, t, l) + dA(i, j, s) * R(s, k, t, l);
                         });
                       })};
        });

  b.add("weyl_first_bianchi", "-", "cyclic sum of the last three Weyl indices vanishes", kNone, {I(Q::Weyl)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor& W = c.v(Q::Weyl);
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return W(i, j, k, t) + W(i, t, j, k) + W(i, k, t, j); }),
                       Tensor(m, 4, 0.0)};
        });

  b.add("weyl_pseudo_bianchi", "fake2ndBianchiWeyl", "cyclic sum of the derivative of Weyl in terms of Cotton",
        kNone, {I(Q::Weyl, 1), I(Q::Cotton)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2);
          const Tensor &dW = c.v(Q::Weyl, 1), &C = c.v(Q::Cotton);
          return Sides{gen<5>(m,
                              [&](int i, int j, int k, int t, int l) {
                                return dW(i, j, k, t, l) + dW(i, j, l, k, t) + dW(i, j, t, l, k);
                              }),
                       gen<5>(m, [&](int i, int j, int k, int t, int l) {
                         return a * (C(i, t, l) * d(j, k) + C(i, l, k) * d(j, t) + C(i, k, t) * d(j, l) -
                                     C(j, t, l) * d(i, k) - C(j, l, k) * d(i, t) - C(j, k, t) * d(i, l));
                       })};
        });

  b.add("weyl_second", "SecondDerivWeylusingRiem", "commuting two derivatives of Weyl", kNone, {I(Q::Weyl, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &W = c.v(Q::Weyl), &d2W = c.v(Q::Weyl, 2);
          return Sides{gen<6>(m, [&](int i, int j, int k, int l, int s, int t) { return d2W(i, j, k, l, s, t) - d2W(i, j, k, l, t, s); }),
                       gen<6>(m, [&](int i, int j, int k, int l, int s, int t) {
                         return sum(m, [&](int r) {
                           return W(r, j, k, l) * R(r, i, s, t) + W(i, r, k, l) * R(r, j, s, t) +
                                  W(i, j, r, l) * R(r, k, s, t) + W(i, j, k, r) * R(r, l, s, t);
                         });
                       })};
        });

  b.add("weyl_third", "ThirdDerivWeylusingRiem", "commuting the last two of three derivatives of Weyl", kNone,
        {I(Q::Weyl, 3)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &R = c.v(Q::Riemann), &dW = c.v(Q::Weyl, 1), &d3W = c.v(Q::Weyl, 3);
          return Sides{gen<7>(m, [&](int i, int j, int k, int l, int t, int r, int s) {
                         return d3W(i, j, k, l, t, r, s) - d3W(i, j, k, l, t, s, r);
                       }),
                       gen<7>(m, [&](int i, int j, int k, int l, int t, int r, int s) {
                         return sum(m, [&](int v) {
                           return dW(v, j, k, l, t) * R(v, i, r, s) + dW(i, v, k, l, t) * R(v, j, r, s) +
                                  dW(i, j, v, l, t) * R(v, k, r, s) + dW(i, j, k, v, t) * R(v, l, r, s) +
                                  dW(i, j, k, l, v) * R(v, t, r, s);
                         });
                       })};
        });

  b.add("weyl_second_expanded", "-", "commuting two derivatives of Weyl, Riemann expanded into Weyl and Ricci", kNone,
        {I(Q::Weyl, 2)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2), bb = 1.0 / ((m - 1.0) * (m - 2.0));
          const Tensor &Ric = c.v(Q::Ricci), &W = c.v(Q::Weyl), &d2W = c.v(Q::Weyl, 2);
          const double S = c.s(Q::Scalar);
          // Ricci and metric parts of R_{abst} in the Weyl decomposition.
          auto K = [&](int p, int q, int s, int t) {
            return Ric(p, s) * d(q, t) - Ric(p, t) * d(q, s) + Ric(q, t) * d(p, s) - Ric(q, s) * d(p, t);
          };
          auto G = [&](int p, int q, int s, int t) { return d(p, s) * d(q, t) - d(p, t) * d(q, s); };
          return Sides{gen<6>(m, [&](int i, int j, int k, int l, int s, int t) { return d2W(i, j, k, l, s, t) - d2W(i, j, k, l, t, s); }),
                       gen<6>(m, [&](int i, int j, int k, int l, int s, int t) {
                         return sum(m, [&](int r) {
                           double x = W(r, j, k, l) * W(r, i, s, t) + W(i, r, k, l) * W(r, j, s, t) +
                                      W(i, j, r, l) * W(r, k, s, t) + W(i, j, k, r) * W(r, l, s, t);
                           x += a * (W(r, j, k, l) * K(r, i, s, t) + W(i, r, k, l) * K(r, j, s, t) +
                                     W(i, j, r, l) * K(r, k, s, t) + W(i, j, k, r) * K(r, l, s, t));
                           x -= S * bb *
                                (W(r, j, k, l) * G(r, i, s, t) + W(i, r, k, l) * G(r, j, s, t) +
                                 W(i, j, r, l) * G(r, k, s, t) + W(i, j, k, r) * G(r, l, s, t));
                           return x;
                         });
                       })};
        });

  b.add("weyl_second_traced", "-", "traced commutator of two derivatives of Weyl", kNone, {I(Q::Weyl, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2);
          const Tensor &Ric = c.v(Q::Ricci), &W = c.v(Q::Weyl), &d2W = c.v(Q::Weyl, 2);
          return Sides{gen<4>(m,
                              [&](int j, int k, int l, int s) {
                                return sum(m, [&](int t) { return d2W(t, j, k, l, s, t) - d2W(t, j, k, l, t, s); });
                              }),
                       gen<4>(m, [&](int j, int k, int l, int s) {
                         double x = sum(m, [&](int t) { return Ric(s, t) * W(t, j, k, l); });
                         x += sum2(m, [&](int t, int r) {
                           return W(t, r, k, l) * W(r, j, s, t) + W(t, j, r, l) * W(r, k, s, t) + W(t, j, k, r) * W(r, l, s, t);
                         });
                         x += a * sum2(m, [&](int t, int r) {
                           return Ric(t, r) * W(t, j, r, k) * d(l, s) - Ric(t, r) * W(t, j, r, l) * d(k, s);
                         });
                         x += a * sum(m, [&](int t) {
                           return Ric(t, k) * W(t, j, s, l) + Ric(t, l) * W(t, j, k, s) + Ric(t, j) * W(t, s, k, l);
                         });
                         return x;
                       })};
        });

  b.add("weyl_third_expanded", "-",
        "commuting the last two of three derivatives of Weyl, Riemann expanded into Weyl and Ricci", kNone,
        {I(Q::Weyl, 3)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2), bb = 1.0 / ((m - 1.0) * (m - 2.0));
          const Tensor &Ric = c.v(Q::Ricci), &W = c.v(Q::Weyl), &dW = c.v(Q::Weyl, 1), &d3W = c.v(Q::Weyl, 3);
          const double S = c.s(Q::Scalar);
          auto K = [&](int p, int q, int s, int t) {
            return Ric(p, s) * d(q, t) - Ric(p, t) * d(q, s) + Ric(q, t) * d(p, s) - Ric(q, s) * d(p, t);
          };
          auto G = [&](int p, int q, int s, int t) { return d(p, s) * d(q, t) - d(p, t) * d(q, s); };
          return Sides{gen<7>(m, [&](int i, int j, int k, int l, int t, int r, int s) {
                         return d3W(i, j, k, l, t, r, s) - d3W(i, j, k, l, t, s, r);
                       }),
                       gen<7>(m, [&](int i, int j, int k, int l, int t, int r, int s) {
                         return sum(m, [&](int v) {
                           auto term = [&](auto&& Rm) {
                             return dW(v, j, k, l, t) * Rm(v, i, r, s) + dW(i, v, k, l, t) * Rm(v, j, r, s) +
                                    dW(i, j, v, l, t) * Rm(v, k, r, s) + dW(i, j, k, v, t) * Rm(v, l, r, s) +
                                    dW(i, j, k, l, v) * Rm(v, t, r, s);
                           };
                           return term([&](int p, int q, int x, int y) { return W(p, q, x, y); }) + a * term(K) -
                                  S * bb * term(G);
                         });
                       })};
        });

  b.add("cotton_cyclic", "PermutCiclCotton", "cyclic sum of the Cotton tensor vanishes", kNone, {I(Q::Cotton)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor& C = c.v(Q::Cotton);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return C(i, j, k) + C(j, k, i) + C(k, i, j); }),
                       Tensor(m, 3, 0.0)};
        });

  b.add("cotton_divergence", "DiverCotton", "divergence of the Cotton tensor in terms of Ricci", kNone,
        {I(Q::Cotton, 1), I(Q::Ricci, 2)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dC = c.v(Q::Cotton, 1), &R = c.v(Q::Riemann), &Ric = c.v(Q::Ricci), &d2Ric = c.v(Q::Ricci, 2),
                       &d2S = c.v(Q::Scalar, 2);
          const double lapS = trace(d2S);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int k) { return dC(i, j, k, k); }); }),
                       gen<2>(m, [&](int i, int j) {
                         double x = sum(m, [&](int k) { return d2Ric(i, j, k, k); });
                         x -= (m - 2.0) / (2.0 * (m - 1)) * d2S(i, j);
                         x += sum2(m, [&](int t, int k) { return Ric(t, k) * R(i, t, j, k); });
                         x -= sum(m, [&](int t) { return Ric(i, t) * Ric(t, j); });
                         x -= lapS * d(i, j) / (2.0 * (m - 1));
                         return x;
                       })};
        });

  b.add("cotton_divergence_symmetry", "SymmDivCotton", "the divergence of Cotton is symmetric", kNone,
        {I(Q::Cotton, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor& dC = c.v(Q::Cotton, 1);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int k) { return dC(i, j, k, k); }); }),
                       gen<2>(m, [&](int i, int j) { return sum(m, [&](int k) { return dC(j, i, k, k); }); })};
        });

  b.add("cotton_divergence_first", "NullDiverCotton", "divergence of Cotton in its first index vanishes", kNone,
        {I(Q::Cotton, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor& dC = c.v(Q::Cotton, 1);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int k) { return dC(k, i, j, k); }); }),
                       Tensor(m, 2, 0.0)};
        });

  b.add("bach_divergence", "diverBach", "divergence of the Bach tensor through Ricci and Cotton", kNone,
        {I(Q::Bach, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const double e = (m - 4.0) / ((m - 2.0) * (m - 2.0));
          const Tensor &dB = c.v(Q::Bach, 1), &Ric = c.v(Q::Ricci), &C = c.v(Q::Cotton);
          return Sides{gen<1>(m, [&](int i) { return sum(m, [&](int j) { return dB(i, j, j); }); }),
                       gen<1>(m, [&](int i) { return e * sum2(m, [&](int k, int t) { return Ric(k, t) * C(k, t, i); }); })};
        });
}

// ---------------------------------------------------------------------------
// Ricci solitons, generic and gradient.

void add_solitons(Builder& b) {
  b.fam = Family::SOL;
  b.hyp = Structure::GenericSoliton;

  b.add("eq1", "eq1", "generic soliton equation in components", kXL, {I(Q::Ricci), I(Q::X, 1)}, [](Ctx& c) {
    const int m = c.dim();
    const Tensor &Ric = c.v(Q::Ricci), &X1 = c.v(Q::X, 1);
    const double l = c.lambda();
    return Sides{gen<2>(m, [&](int i, int j) { return Ric(i, j) + 0.5 * (X1(i, j) + X1(j, i)); }),
                 gen<2>(m, [&](int i, int j) { return l * d(i, j); })};
  });

  b.add("eq2", "eq2", "traced generic soliton equation", kXL, {I(Q::Scalar), I(Q::X, 1)}, [](Ctx& c) {
    const int m = c.dim();
    return Sides{num(m, c.s(Q::Scalar) + trace(c.v(Q::X, 1))), num(m, m * c.lambda())};
  });

  b.add("eq3", "eq3", "gradient of S against the gradient of div X", kXL, {I(Q::Scalar, 1), I(Q::X, 2)}, [](Ctx& c) {
    const Tensor& X2 = c.v(Q::X, 2);
    return Sides{c.v(Q::Scalar, 1), trace12(X2) * -1.0};
  });

  // Printed with the free index j on the left and k on the right.
  b.add("eq4", "eq4", "Ricci applied to X against the rough Laplacian of X", kXL, {I(Q::Ricci), I(Q::X, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &Ric = c.v(Q::Ricci), &X = c.v(Q::X), &X2 = c.v(Q::X, 2);
          return Sides{gen<1>(m, [&](int k) { return sum(m, [&](int t) { return Ric(t, k) * X(t); }); }),
                       gen<1>(m, [&](int k) { return -sum(m, [&](int t) { return X2(k, t, t); }); })};
        });

  b.add("eq5", "eq5", "skew derivative of Ricci on a generic soliton", kXL, {I(Q::Ricci, 1), I(Q::X, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dRic = c.v(Q::Ricci, 1), &R = c.v(Q::Riemann), &X = c.v(Q::X), &X2 = c.v(Q::X, 2);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return dRic(i, j, k) - dRic(i, k, j); }),
                       gen<3>(m, [&](int i, int j, int k) {
                         return -0.5 * sum(m, [&](int l) { return R(l, i, j, k) * X(l); }) +
                                0.5 * (X2(k, i, j) - X2(j, i, k));
                       })};
        });

  b.add("eq6", "eq6", "skew derivative of Ricci in the outer indices on a generic soliton", kXL,
        {I(Q::Ricci, 1), I(Q::X, 2)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dRic = c.v(Q::Ricci, 1), &R = c.v(Q::Riemann), &X = c.v(Q::X), &X2 = c.v(Q::X, 2);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return dRic(i, j, k) - dRic(k, j, i); }),
                       gen<3>(m, [&](int i, int j, int k) {
                         return 0.5 * sum(m, [&](int l) { return R(l, j, k, i) * X(l); }) +
                                0.5 * (X2(k, j, i) - X2(i, j, k));
                       })};
        });

  b.add("scal_generic", "scalGen", "Laplacian of the scalar curvature on a generic soliton", kXL,
        {I(Q::Scalar, 2), I(Q::X)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &Ric = c.v(Q::Ricci), &dS = c.v(Q::Scalar, 1);
          return Sides{num(m, 0.5 * trace(c.v(Q::Scalar, 2))),
                       num(m, 0.5 * dot(c.v(Q::X), dS) + c.lambda() * c.s(Q::Scalar) - frob(Ric, Ric))};
        });

  b.hyp = Structure::GradientSoliton;

  b.add("eq1g", "eq1g", "gradient soliton equation in components", kFL, {I(Q::Ricci), I(Q::F, 2)}, [](Ctx& c) {
    const int m = c.dim();
    const double l = c.lambda();
    return Sides{c.v(Q::Ricci) + c.v(Q::F, 2), gen<2>(m, [&](int i, int j) { return l * d(i, j); })};
  });

  b.add("eq2g", "eq2g", "traced gradient soliton equation", kFL, {I(Q::Scalar), I(Q::F, 2)}, [](Ctx& c) {
    const int m = c.dim();
    return Sides{num(m, c.s(Q::Scalar) + trace(c.v(Q::F, 2))), num(m, m * c.lambda())};
  });

  b.add("eq3g", "eq3g", "gradient of S is twice Ricci applied to grad f", kFL, {I(Q::Scalar, 1), I(Q::F, 1)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &Ric = c.v(Q::Ricci), &F1 = c.v(Q::F, 1);
          return Sides{c.v(Q::Scalar, 1), gen<1>(m, [&](int k) { return 2 * sum(m, [&](int t) { return F1(t) * Ric(t, k); }); })};
        });

  b.add("eq6g", "eq6g", "skew derivative of Ricci on a gradient soliton", kFL, {I(Q::Ricci, 1), I(Q::F, 1)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dRic = c.v(Q::Ricci, 1), &R = c.v(Q::Riemann), &F1 = c.v(Q::F, 1);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return dRic(i, j, k) - dRic(k, j, i); }),
                       gen<3>(m, [&](int i, int j, int k) { return -sum(m, [&](int t) { return F1(t) * R(t, j, i, k); }); })};
        });

  // Checked in differentiated form: the constant is not known in advance.
  b.add("hamilton", "HamiltonId", "S + |grad f|^2 - 2 lambda f is constant", kFL, {I(Q::Scalar, 1), I(Q::F, 2)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dS = c.v(Q::Scalar, 1), &F1 = c.v(Q::F, 1), &F2 = c.v(Q::F, 2);
          const double l = c.lambda();
          return Sides{gen<1>(m, [&](int k) { return dS(k) + 2 * sum(m, [&](int t) { return F1(t) * F2(t, k); }) - 2 * l * F1(k); }),
                       Tensor(m, 1, 0.0)};
        });

  b.add("scal_gradient", "scalGrad", "Laplacian of the scalar curvature on a gradient soliton", kFL,
        {I(Q::Scalar, 2), I(Q::F, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &Ric = c.v(Q::Ricci), &dS = c.v(Q::Scalar, 1);
          return Sides{num(m, 0.5 * trace(c.v(Q::Scalar, 2))),
                       num(m, 0.5 * dot(c.v(Q::F, 1), dS) + c.lambda() * c.s(Q::Scalar) - frob(Ric, Ric))};
        });

  b.add("first", "firstCaoChen", "Cotton plus grad f contracted with Weyl equals D", kFL,
        {I(Q::Cotton), I(Q::D)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &C = c.v(Q::Cotton), &W = c.v(Q::Weyl), &F1 = c.v(Q::F, 1);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return C(i, j, k) + sum(m, [&](int t) { return F1(t) * W(t, i, j, k); }); }),
                       c.v(Q::D)};
        });

  b.add("second", "secondCaoChen", "Bach tensor through the divergence of D and Cotton", kFL,
        {I(Q::Bach), I(Q::D, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2), e = (m - 3.0) / (m - 2.0);
          const Tensor &Bach = c.v(Q::Bach), &dD = c.v(Q::D, 1), &C = c.v(Q::Cotton), &F1 = c.v(Q::F, 1);
          return Sides{Bach, gen<2>(m, [&](int i, int j) {
                         return a * sum(m, [&](int k) { return dD(i, j, k, k) + e * F1(k) * C(j, i, k); });
                       })};
        });

  b.add("grad_f_cotton", "-", "grad f contracted with Cotton equals grad f contracted with D", kFL,
        {I(Q::Cotton), I(Q::D)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &C = c.v(Q::Cotton), &D = c.v(Q::D), &F1 = c.v(Q::F, 1);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return F1(t) * C(t, i, j); }); }),
                       gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return F1(t) * D(t, i, j); }); })};
        });

  b.add("d_cyclic", "-", "cyclic sum of D vanishes", kFL, {I(Q::D)}, [](Ctx& c) {
    const int m = c.dim();
    const Tensor& D = c.v(Q::D);
    return Sides{gen<3>(m, [&](int i, int j, int k) { return D(i, j, k) + D(j, k, i) + D(k, i, j); }), Tensor(m, 3, 0.0)};
  });

  b.add("d_cyclic_derivative", "-", "cyclic sum of the derivative of D through Cotton", kFL, {I(Q::D, 1), I(Q::Cotton)},
        [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2);
          const Tensor &dD = c.v(Q::D, 1), &C = c.v(Q::Cotton), &F1 = c.v(Q::F, 1);
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return dD(i, j, k, t) + dD(i, k, t, j) + dD(i, t, j, k); }),
                       gen<4>(m, [&](int i, int j, int k, int t) {
                         double x = sum(m, [&](int l) {
                           return F1(l) * (C(l, k, t) * d(i, j) + C(l, t, j) * d(i, k) + C(l, j, k) * d(i, t));
                         });
                         x -= F1(j) * C(i, k, t) + F1(k) * C(i, t, j) + F1(t) * C(i, j, k);
                         return a * x;
                       })};
        });

  b.add("d_cyclic_derivative_d", "-", "cyclic sum of the derivative of D through D and Weyl", kFL,
        {I(Q::D, 1), I(Q::Weyl)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2);
          const Tensor &dD = c.v(Q::D, 1), &D = c.v(Q::D), &W = c.v(Q::Weyl), &F1 = c.v(Q::F, 1);
          auto fW = [&](int i, int j, int k) { return sum(m, [&](int s) { return F1(s) * W(s, i, j, k); }); };
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return dD(i, j, k, t) + dD(i, k, t, j) + dD(i, t, j, k); }),
                       gen<4>(m, [&](int i, int j, int k, int t) {
                         double x = sum(m, [&](int l) {
                           return F1(l) * (D(l, k, t) * d(i, j) + D(l, t, j) * d(i, k) + D(l, j, k) * d(i, t));
                         });
                         x -= F1(j) * (D(i, k, t) - fW(i, k, t)) + F1(k) * (D(i, t, j) - fW(i, t, j)) +
                              F1(t) * (D(i, j, k) - fW(i, j, k));
                         return a * x;
                       })};
        });

  b.add("cotton_cyclic_derivative", "-", "cyclic sum of the derivative of Cotton through Ricci and Weyl", kFL,
        {I(Q::Cotton, 1), I(Q::Weyl)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &dC = c.v(Q::Cotton, 1), &Ric = c.v(Q::Ricci), &W = c.v(Q::Weyl);
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return dC(i, j, k, t) + dC(i, k, t, j) + dC(i, t, j, k); }),
                       gen<4>(m, [&](int i, int j, int k, int t) {
                         return sum(m, [&](int s) {
                           return Ric(s, j) * W(s, i, k, t) + Ric(s, k) * W(s, i, t, j) + Ric(s, t) * W(s, i, j, k);
                         });
                       })};
        });

  b.add("d_cyclic_derivative_mixed", "-", "cyclic sum of the derivative of D mixing both previous forms",
        Requirements{.f = true, .lambda = true, .min_dim = 4}, {I(Q::D, 1), I(Q::Cotton, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2), e = (m - 6.0) / (2.0 * (m - 3));
          const Tensor &dD = c.v(Q::D, 1), &C = c.v(Q::Cotton), &dC = c.v(Q::Cotton, 1), &Ric = c.v(Q::Ricci),
                       &W = c.v(Q::Weyl), &F1 = c.v(Q::F, 1);
          return Sides{gen<4>(m, [&](int i, int j, int k, int t) { return dD(i, j, k, t) + dD(i, k, t, j) + dD(i, t, j, k); }),
                       gen<4>(m, [&](int i, int j, int k, int t) {
                         double rw = sum(m, [&](int s) {
                           return Ric(s, j) * W(s, i, k, t) + Ric(s, k) * W(s, i, t, j) + Ric(s, t) * W(s, i, j, k);
                         });
                         double x = e * (rw - (dC(i, j, k, t) + dC(i, k, t, j) + dC(i, t, j, k)));
                         double y = sum(m, [&](int l) {
                           return F1(l) * (C(l, k, t) * d(i, j) + C(l, t, j) * d(i, k) + C(l, j, k) * d(i, t));
                         });
                         y -= F1(j) * C(i, k, t) + F1(k) * C(i, t, j) + F1(t) * C(i, j, k);
                         return x + a * y;
                       })};
        });
}

// ---------------------------------------------------------------------------
// Shared pieces of the conformal families.

struct Conf {
  Ctx& c;
  int m;
  double n2;
  const Tensor &Ric, &U1, &U2;
  double S, lapu, gu2, e2u;

  explicit Conf(Ctx& ctx)
      : c(ctx),
        m(ctx.dim()),
        n2(m - 2.0),
        Ric(ctx.v(Q::Ricci)),
        U1(ctx.v(Q::U, 1)),
        U2(ctx.v(Q::U, 2)),
        S(ctx.s(Q::Scalar)),
        lapu(trace(U2)),
        gu2(dot(U1, U1)),
        e2u(std::exp(2 * ctx.u0())) {}

  /// R_ij - (m-2) u_ij + (m-2) u_i u_j, or with A in place of R.
  Tensor lhs(const Tensor& base) const {
    return gen<2>(m, [&](int i, int j) { return base(i, j) - n2 * U2(i, j) + n2 * U1(i) * U1(j); });
  }
  Tensor diag(double v) const {
    return gen<2>(m, [&](int i, int j) { return v * d(i, j); });
  }
};

void add_conformally_einstein(Builder& b) {
  b.fam = Family::CE;
  b.hyp = Structure::ConformallyEinstein;

  b.add("ricci", "CE_comp_Riccii", "conformally Einstein equation in components", kUL, {I(Q::Ricci), I(Q::U, 2)},
        [](Ctx& c) {
          Conf k(c);
          return Sides{k.lhs(k.Ric), k.diag((k.S - k.n2 * k.lapu + k.n2 * k.gu2) / k.m)};
        });

  b.add("traced", "CE_tracedlambda", "trace of the conformally Einstein equation", kUL, {I(Q::Scalar), I(Q::U, 2)},
        [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          return Sides{num(m, k.S - 2 * (m - 1) * k.lapu - (m - 1) * k.n2 * k.gu2), num(m, c.lambda() * m * k.e2u)};
        });

  b.add("schouten", "CE_comp_Schouten", "conformally Einstein equation with the Schouten tensor", kUL,
        {I(Q::Schouten), I(Q::U, 2)}, [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          return Sides{k.lhs(c.v(Q::Schouten)),
                       k.diag((k.n2 * k.S / (2.0 * (m - 1)) - k.n2 * k.lapu + k.n2 * k.gu2) / m)};
        });

  b.add("single", "CE_singleEq", "conformally Einstein equation with lambda in place of the trace", kUL,
        {I(Q::Ricci), I(Q::U, 2)}, [](Ctx& c) {
          Conf k(c);
          return Sides{k.lhs(k.Ric), k.diag(k.lapu + k.n2 * k.gu2 + c.lambda() * k.e2u)};
        });

  b.add("first", "FirstCond_GN", "Cotton equals (m-2) grad u contracted with Weyl", kUL,
        {I(Q::Cotton), I(Q::U, 1)}, [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          const Tensor &C = c.v(Q::Cotton), &W = c.v(Q::Weyl);
          return Sides{gen<3>(m, [&](int i, int j, int kk) {
                         return C(i, j, kk) - k.n2 * sum(m, [&](int t) { return k.U1(t) * W(t, i, j, kk); });
                       }),
                       Tensor(m, 3, 0.0)};
        });

  b.add("second", "SecondCond_GN", "Bach tensor equals (m-4) Weyl applied twice to grad u", kUL,
        {I(Q::Bach), I(Q::U, 1)}, [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          const Tensor &Bach = c.v(Q::Bach), &W = c.v(Q::Weyl);
          return Sides{gen<2>(m, [&](int i, int j) {
                         return Bach(i, j) -
                                (m - 4.0) * sum2(m, [&](int t, int l) { return k.U1(t) * k.U1(l) * W(i, t, j, l); });
                       }),
                       Tensor(m, 2, 0.0)};
        });

  b.add("grad_laplacian_u", "CE_nablaDeltau", "gradient of the Laplacian of u", kUL, {I(Q::Scalar, 1), I(Q::U, 3)},
        [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          const Tensor& dS = c.v(Q::Scalar, 1);
          return Sides{trace12(c.v(Q::U, 3)), gen<1>(m, [&](int l) {
                         return dS(l) / (2.0 * (m - 1)) - sum(m, [&](int t) { return k.U1(t) * k.Ric(t, l); }) -
                                k.S * k.U1(l) / (m * (m - 1.0)) + (m + 2.0) / m * k.lapu * k.U1(l) +
                                k.n2 / m * k.gu2 * k.U1(l);
                       })};
        });

  b.add("grad_u_grad_laplacian_u", "CE_gnablaunabladeltau", "previous relation contracted with grad u", kUL,
        {I(Q::Scalar, 1), I(Q::U, 3)}, [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          return Sides{num(m, dot(k.U1, trace12(c.v(Q::U, 3)))),
                       num(m, dot(c.v(Q::Scalar, 1), k.U1) / (2.0 * (m - 1)) - quad(k.Ric, k.U1, k.U1) -
                                  k.S * k.gu2 / (m * (m - 1.0)) + (m + 2.0) / m * k.lapu * k.gu2 +
                                  k.n2 / m * k.gu2 * k.gu2)};
        });

  b.add("ricci_hessian", "CE_ricchess", "Ricci and Hessian of u applied to grad u", kUL, {I(Q::Ricci), I(Q::U, 2)},
        [](Ctx& c) {
          Conf k(c);
          const int m = k.m;
          return Sides{num(m, quad(k.Ric, k.U1, k.U1) - k.n2 * quad(k.U2, k.U1, k.U1)),
                       num(m, k.gu2 / m * (k.S - k.n2 * k.lapu - (m - 1) * k.n2 * k.gu2))};
        });

  auto laplacian_of_scalar = [](Ctx& c, bool with_lambda) {
    Conf k(c);
    const int m = k.m;
    const double lapS = trace(c.v(Q::Scalar, 2));
    const Tensor& U4 = c.v(Q::U, 4);
    const double bilap = sum2(m, [&](int t, int l) { return U4(t, t, l, l); });
    double rhs = (m - 1) * bilap + (m - 1) * k.n2 * frob(k.U2, k.U2) + k.S * k.lapu - 2 * (m - 1) * k.lapu * k.lapu;
    if (with_lambda)
      rhs += (m + 2) * c.lambda() * k.e2u * k.gu2;
    else
      rhs += (m + 2.0) / m * k.gu2 * (k.S - 2 * (m - 1) * k.lapu - (m - 1) * k.n2 * k.gu2);
    return Sides{num(m, 0.5 * (lapS - k.n2 * dot(c.v(Q::Scalar, 1), k.U1))), num(m, rhs)};
  };

  b.add("laplacian_scalar", "CE_LaplacianScalarEq", "Laplacian of S through u up to its bilaplacian", kUL,
        {I(Q::Scalar, 2), I(Q::U, 4)}, [laplacian_of_scalar](Ctx& c) { return laplacian_of_scalar(c, false); });

  b.add("laplacian_scalar_lambda", "CE_LaplacianScalarEqwithLambda", "the same with the trace replaced by lambda", kUL,
        {I(Q::Scalar, 2), I(Q::U, 4)}, [laplacian_of_scalar](Ctx& c) { return laplacian_of_scalar(c, true); });
}

void add_conformal_gradient(Builder& b) {
  b.fam = Family::CGRS;
  b.hyp = Structure::ConformalGradientSoliton;

  struct G : Conf {
    const Tensor &F1, &F2;
    double lapf, fu, gf2;
    explicit G(Ctx& ctx)
        : Conf(ctx),
          F1(ctx.v(Q::F, 1)),
          F2(ctx.v(Q::F, 2)),
          lapf(trace(F2)),
          fu(dot(F1, U1)),
          gf2(dot(F1, F1)) {}
    Tensor lhs(const Tensor& base) const {
      Tensor L = Conf::lhs(base);
      return L + gen<2>(m, [&](int i, int j) { return F2(i, j) - (F1(i) * U1(j) + F1(j) * U1(i)); });
    }
    /// (m-2) u_t - f_t
    double w(int t) const { return n2 * U1(t) - F1(t); }
  };

  b.add("ricci", "CGRS_comp_Ricci", "conformal gradient soliton equation in components", kUFL,
        {I(Q::Ricci), I(Q::U, 2), I(Q::F, 2)}, [](Ctx& c) {
          G k(c);
          return Sides{k.lhs(k.Ric), k.diag((k.S - k.n2 * (k.lapu - k.gu2) + k.lapf - 2 * k.fu) / k.m)};
        });

  b.add("traced", "Eq_CGRSGlobalTraced", "trace of the conformal gradient soliton equation", kUFL,
        {I(Q::Scalar), I(Q::U, 2), I(Q::F, 2)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          return Sides{num(m, k.S - 2 * (m - 1) * k.lapu - (m - 1) * k.n2 * k.gu2 + k.lapf + k.n2 * k.fu),
                       num(m, m * c.lambda() * k.e2u)};
        });

  b.add("schouten", "CGRS_comp_Schouten", "conformal gradient soliton equation with the Schouten tensor", kUFL,
        {I(Q::Schouten), I(Q::U, 2), I(Q::F, 2)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          return Sides{k.lhs(c.v(Q::Schouten)),
                       k.diag((k.n2 / (2.0 * (m - 1)) * k.S - k.n2 * (k.lapu - k.gu2) + k.lapf - 2 * k.fu) / m)};
        });

  b.add("d_forms", "tensorD_u_f", "the two expressions of D^(u,f) agree", kUFL, {I(Q::DUF), I(Q::F, 2)}, [](Ctx& c) {
    G k(c);
    return Sides{c.v(Q::DUF), duf_alt_from(k.F1, k.F2, k.U1)};
  });

  b.add("d_rescaled", "CGRS_D_ufvsTildeD", "D^(u,f) is e^{3u} times D of the rescaled metric", kUFL,
        {I(Q::DUF), Tl(Q::D)}, [](Ctx& c) { return Sides{c.v(Q::DUF), c.tv(Q::D) * std::exp(3 * c.u0())}; });

  b.add("first", "Eq_FirstCondition_CGRSCompNewD", "first integrability condition", kUFL,
        {I(Q::Cotton), I(Q::DUF)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const Tensor &C = c.v(Q::Cotton), &W = c.v(Q::Weyl);
          return Sides{gen<3>(m, [&](int i, int j, int l) {
                         return C(i, j, l) - sum(m, [&](int t) { return k.w(t) * W(t, i, j, l); });
                       }),
                       c.v(Q::DUF)};
        });

  b.add("second", "Eq_SecondConditionBach", "second integrability condition", kUFL,
        {I(Q::Bach), I(Q::DUF, 1)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double a = 1.0 / (m - 2), e = (m - 3.0) / (m - 2.0);
          const Tensor &Bach = c.v(Q::Bach), &C = c.v(Q::Cotton), &W = c.v(Q::Weyl), &dD = c.v(Q::DUF, 1);
          return Sides{Bach, gen<2>(m, [&](int i, int j) {
                         double x = sum(m, [&](int l) { return dD(i, j, l, l) - e * k.w(l) * C(j, i, l); });
                         x += sum2(m, [&](int t, int l) {
                           return (k.F1(t) * k.U1(l) + k.F1(l) * k.U1(t) - k.n2 * k.U1(t) * k.U1(l)) * W(i, t, j, l);
                         });
                         return a * x;
                       })};
        });

  b.add("second_equivalent", "Eq_SecondConditionBach_equivalent",
        "second integrability condition with D^(u,f) in place of Cotton", kUFL, {I(Q::Bach), I(Q::DUF, 1)},
        [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double a = 1.0 / (m - 2), e = (m - 3.0) / (m - 2.0);
          const Tensor &Bach = c.v(Q::Bach), &W = c.v(Q::Weyl), &D = c.v(Q::DUF), &dD = c.v(Q::DUF, 1);
          return Sides{Bach, gen<2>(m, [&](int i, int j) {
                         double x = sum2(m, [&](int t, int l) {
                           const double coef = k.n2 * (m - 4) * k.U1(t) * k.U1(l) -
                                               (m - 4) * (k.U1(l) * k.F1(t) + k.F1(l) * k.U1(t)) + e * k.F1(t) * k.F1(l);
                           return coef * W(i, t, j, l);
                         });
                         x += sum(m, [&](int t) { return -e * k.w(t) * D(j, i, t) + dD(i, j, t, t); });
                         return a * x;
                       })};
        });

  // Printed with u_u u_tk; the index is t.
  b.add("grad_laplacians", "CGRS_SkUttkFttk", "gradients of S, Laplacian of u and Laplacian of f", kUFL,
        {I(Q::Scalar, 1), I(Q::U, 3), I(Q::F, 3)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const Tensor &dS = c.v(Q::Scalar, 1), lu = trace12(c.v(Q::U, 3)), lf = trace12(c.v(Q::F, 3));
          return Sides{gen<1>(m, [&](int l) { return dS(l) / (2.0 * (m - 1)) - lu(l) + lf(l) / k.n2; }),
                       gen<1>(m, [&](int l) {
                         double x = m / (m - 1.0) * sum(m, [&](int t) { return (k.U1(t) - k.F1(t) / k.n2) * k.Ric(t, l); });
                         x -= k.n2 / (m - 1) * sum(m, [&](int t) { return k.U1(t) * k.U2(t, l); });
                         x += 1.0 / (m - 1) * sum(m, [&](int t) { return k.U1(t) * k.F2(t, l) + k.F1(t) * k.U2(t, l); });
                         x -= m / (m - 1.0) * k.lapu * k.U1(l);
                         x += m / ((m - 1.0) * k.n2) * (k.U1(l) * k.lapf + k.F1(l) * k.lapu);
                         return x;
                       })};
        });

  b.add("grad_laplacians_traced", "CGRS_SkUttkFttk_second", "gradient of the traced equation", kUFL,
        {I(Q::Scalar, 1), I(Q::U, 3), I(Q::F, 3)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double h = 1.0 / (2.0 * (m - 1));
          const Tensor &dS = c.v(Q::Scalar, 1), lu = trace12(c.v(Q::U, 3)), lf = trace12(c.v(Q::F, 3));
          return Sides{gen<1>(m, [&](int l) { return h * dS(l) - lu(l) + h * lf(l); }),
                       gen<1>(m, [&](int l) {
                         double x = sum(m, [&](int t) {
                           return k.n2 * k.U1(t) * k.U2(t, l) - k.n2 * h * (k.F1(t) * k.U2(t, l) + k.U1(t) * k.F2(t, l));
                         });
                         x += (k.S / (m - 1) - 2 * k.lapu - k.n2 * k.gu2 + k.lapf / (m - 1) + k.n2 / (m - 1) * k.fu) * k.U1(l);
                         return x;
                       })};
        });

  b.add("grad_laplacian_f_preliminary", "CGRS_Fttk_prelim", "gradient of the Laplacian of f, Hessian of u kept",
        kUFL, {I(Q::F, 3), I(Q::U, 2)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double n2 = k.n2;
          return Sides{trace12(c.v(Q::F, 3)), gen<1>(m, [&](int l) {
                         double x = sum(m, [&](int t) {
                           return 2 * n2 * k.U1(t) * k.Ric(t, l) - 2 * k.F1(t) * k.Ric(t, l) -
                                  2 * n2 * n2 * k.U1(t) * k.U2(t, l) + n2 * k.U1(t) * k.F2(t, l) +
                                  n2 * k.F1(t) * k.U2(t, l);
                         });
                         x += 2 * n2 * n2 / m * k.lapu * k.U1(l) - 2 * n2 / m * k.S * k.U1(l) +
                              2 * (m - 1) * n2 * n2 / m * k.gu2 * k.U1(l) + 4.0 / m * k.lapf * k.U1(l) +
                              2 * k.lapu * k.F1(l) - 2 * n2 * n2 / m * k.fu * k.U1(l);
                         return x;
                       })};
        });

  b.add("grad_laplacian_f", "CGRS_Fttk", "gradient of the Laplacian of f", kUFL, {I(Q::F, 3), I(Q::U, 2)},
        [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double n2 = k.n2;
          return Sides{trace12(c.v(Q::F, 3)), gen<1>(m, [&](int l) {
                         double x = sum(m, [&](int t) {
                           return k.F1(t) * k.F2(t, l) - k.F1(t) * k.Ric(t, l) - n2 * k.U1(t) * k.F2(t, l);
                         });
                         x += n2 * (2 * m - 1.0) / m * k.gu2 * k.F1(l) + 2 * k.lapf * k.U1(l) +
                              (3 * m - 2.0) / m * k.lapu * k.F1(l) + n2 * k.fu * k.U1(l) - k.gf2 * k.U1(l) -
                              (k.S + k.lapf) / m * k.F1(l) - n2 / m * k.fu * k.F1(l);
                         return x;
                       })};
        });

  b.add("grad_laplacian_u", "CGRS_Uttk", "gradient of the Laplacian of u", kUFL, {I(Q::Scalar, 1), I(Q::U, 3)},
        [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double n2 = k.n2, m1 = m - 1.0;
          const Tensor& dS = c.v(Q::Scalar, 1);
          return Sides{trace12(c.v(Q::U, 3)), gen<1>(m, [&](int l) {
                         double x = dS(l) / (2 * m1);
                         x += sum(m, [&](int t) {
                           return -k.U1(t) * k.Ric(t, l) - k.U1(t) * k.F2(t, l) + k.F1(t) * k.F2(t, l) / m1;
                         });
                         x += n2 / m * k.gu2 * k.U1(l) + n2 / m * k.fu * k.U1(l) - k.S / (m * m1) * (k.U1(l) + k.F1(l)) +
                              (m + 2.0) / m * k.lapu * k.U1(l) - k.gf2 / m1 * k.U1(l) + k.lapf / m * k.U1(l) +
                              2 * m1 / m * k.gu2 * k.F1(l) - n2 / (m * m1) * k.fu * k.F1(l) + 2.0 / m * k.lapu * k.F1(l) -
                              k.lapf / (m * m1) * k.F1(l);
                         return x;
                       })};
        });

  b.add("d_divergence_rescaled", "-", "divergence of D^(u,f) through the rescaled divergence of D", kUFL,
        {I(Q::DUF, 1), Tl(Q::D, 1)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const Tensor &D = c.v(Q::DUF), &dD = c.v(Q::DUF, 1), &tdD = c.tv(Q::D, 1);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return dD(i, j, t, t); }); }),
                       gen<2>(m, [&](int i, int j) {
                         return sum(m, [&](int t) {
                           return k.e2u * k.e2u * tdD(i, j, t, t) - (m - 4) * k.U1(t) * D(i, j, t) + k.U1(t) * D(j, i, t);
                         });
                       })};
        });
}

void add_generic(Builder& b) {
  b.fam = Family::GRS;
  b.hyp = Structure::GenericSoliton;

  b.add("first", "firstGenericRSIntCondition", "Cotton plus X contracted with Weyl equals D^X", kXL,
        {I(Q::Cotton), I(Q::DX)}, [](Ctx& c) {
          const int m = c.dim();
          const Tensor &C = c.v(Q::Cotton), &W = c.v(Q::Weyl), &X = c.v(Q::X);
          return Sides{gen<3>(m, [&](int i, int j, int k) { return C(i, j, k) + sum(m, [&](int t) { return X(t) * W(t, i, j, k); }); }),
                       c.v(Q::DX)};
        });

  b.add("second", "secondGenericRSIntCondition", "Bach tensor through the divergence of D^X", kXL,
        {I(Q::Bach), I(Q::DX, 1)}, [](Ctx& c) {
          const int m = c.dim();
          const double a = 1.0 / (m - 2), e = (m - 3.0) / (m - 2.0);
          const Tensor &Bach = c.v(Q::Bach), &C = c.v(Q::Cotton), &W = c.v(Q::Weyl), &dD = c.v(Q::DX, 1),
                       &X = c.v(Q::X), &X1 = c.v(Q::X, 1);
          return Sides{Bach, gen<2>(m, [&](int i, int j) {
                         double x = sum(m, [&](int k) { return dD(i, j, k, k) + e * X(k) * C(j, i, k); });
                         x += 0.5 * sum2(m, [&](int t, int k) { return (X1(t, k) - X1(k, t)) * W(i, t, j, k); });
                         return a * x;
                       })};
        });

  b.add("x_cotton", "-", "X contracted with Cotton equals X contracted with D^X", kXL, {I(Q::Cotton), I(Q::DX)},
        [](Ctx& c) {
          const int m = c.dim();
          const Tensor &C = c.v(Q::Cotton), &D = c.v(Q::DX), &X = c.v(Q::X);
          return Sides{gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return X(t) * C(t, i, j); }); }),
                       gen<2>(m, [&](int i, int j) { return sum(m, [&](int t) { return X(t) * D(t, i, j); }); })};
        });
}

void add_conformal_generic(Builder& b) {
  b.fam = Family::CGERS;
  b.hyp = Structure::ConformalGenericSoliton;

  struct G : Conf {
    const Tensor &X, &X1;
    double divx, xu;
    explicit G(Ctx& ctx) : Conf(ctx), X(ctx.v(Q::X)), X1(ctx.v(Q::X, 1)), divx(trace(X1)), xu(dot(X, U1)) {}
    Tensor lhs(const Tensor& base) const {
      Tensor L = Conf::lhs(base);
      return L + gen<2>(m, [&](int i, int j) { return 0.5 * e2u * (X1(i, j) + X1(j, i)); });
    }
    /// (m-2) u_t - e^{2u} X_t
    double w(int t) const { return n2 * U1(t) - e2u * X(t); }
  };

  b.add("ricci", "CGenericRS_comp_Ricci", "conformal generic soliton equation in components", kUXL,
        {I(Q::Ricci), I(Q::U, 2), I(Q::X, 1)}, [](Ctx& c) {
          G k(c);
          return Sides{k.lhs(k.Ric), k.diag((k.S - k.n2 * (k.lapu - k.gu2) + k.e2u * k.divx) / k.m)};
        });

  b.add("traced", "Eq_CGenericRSGlobalTraced", "trace of the conformal generic soliton equation", kUXL,
        {I(Q::Scalar), I(Q::U, 2), I(Q::X, 1)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          return Sides{num(m, k.S - 2 * (m - 1) * k.lapu - (m - 1) * k.n2 * k.gu2 + k.e2u * (k.divx + m * k.xu)),
                       num(m, m * c.lambda() * k.e2u)};
        });

  b.add("schouten", "CGenericRS_comp_Schouten", "conformal generic soliton equation with the Schouten tensor", kUXL,
        {I(Q::Schouten), I(Q::U, 2), I(Q::X, 1)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          return Sides{k.lhs(c.v(Q::Schouten)),
                       k.diag((k.n2 / (2.0 * (m - 1)) * k.S - k.n2 * (k.lapu - k.gu2) + k.e2u * k.divx) / m)};
        });

  b.add("d_rescaled", "CGeRS_EqDuXe3uDX", "D^(u,X) is e^{3u} times D^X of the rescaled metric", kUXL,
        {I(Q::DUX), Tl(Q::DX)}, [](Ctx& c) { return Sides{c.v(Q::DUX), c.tv(Q::DX) * std::exp(3 * c.u0())}; });

  b.add("first", "Eq_FirstCondition_CGenericRSComponents", "first integrability condition", kUXL,
        {I(Q::Cotton), I(Q::DUX)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const Tensor &C = c.v(Q::Cotton), &W = c.v(Q::Weyl);
          return Sides{gen<3>(m, [&](int i, int j, int l) {
                         return C(i, j, l) - sum(m, [&](int t) { return k.w(t) * W(t, i, j, l); });
                       }),
                       c.v(Q::DUX)};
        });

  b.add("second", "Eq_SecondConditionBach_GENERIC", "second integrability condition", kUXL,
        {I(Q::Bach), I(Q::DUX, 1)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double a = 1.0 / (m - 2), e = (m - 3.0) / (m - 2.0);
          const Tensor &Bach = c.v(Q::Bach), &C = c.v(Q::Cotton), &W = c.v(Q::Weyl), &dD = c.v(Q::DUX, 1);
          return Sides{Bach, gen<2>(m, [&](int i, int j) {
                         double x = sum(m, [&](int l) { return dD(i, j, l, l) - e * k.w(l) * C(j, i, l); });
                         x += sum2(m, [&](int t, int l) {
                           const double coef = 0.5 * k.e2u * (k.X1(t, l) - k.X1(l, t)) + 2 * k.e2u * k.X(t) * k.U1(l) -
                                               k.n2 * k.U1(t) * k.U1(l);
                           return coef * W(i, t, j, l);
                         });
                         return a * x;
                       })};
        });

  // Printed with u_u u_tk; the index is t.
  b.add("grad_laplacians", "CGeRS_SkUttkXttk", "gradients of S, Laplacian of u and divergence of X", kUXL,
        {I(Q::Scalar, 1), I(Q::U, 3), I(Q::X, 2)}, [](Ctx& c) {
          G k(c);
          const int m = k.m;
          const double m1 = m - 1.0;
          const Tensor &dS = c.v(Q::Scalar, 1), &X2 = c.v(Q::X, 2), lu = trace12(c.v(Q::U, 3));
          const Tensor ldx = trace12(X2);
          return Sides{gen<1>(m, [&](int l) { return k.n2 / (2 * m1) * dS(l) - k.n2 * lu(l) + k.e2u * ldx(l); }),
                       gen<1>(m, [&](int l) {
                         double x = m / m1 * sum(m, [&](int t) { return k.w(t) * k.Ric(t, l); });
                         x -= k.n2 * k.n2 / m1 * sum(m, [&](int t) { return k.U1(t) * k.U2(t, l); });
                         x += 2 / m1 * k.e2u * k.divx * k.U1(l) - m * k.n2 / m1 * k.lapu * k.U1(l);
                         x -= m / m1 * k.e2u * sum(m, [&](int t) { return k.U1(t) * (k.X1(t, l) + k.X1(l, t)); });
                         x += m / (2 * m1) * k.e2u * sum(m, [&](int t) { return X2(t, l, t) - X2(l, t, t); });
                         return x;
                       })};
        });

  b.add("vector_commutation", "CGeRS_commutXjik", "rewriting the skew second derivative of X", kUXL,
        {I(Q::X, 2), I(Q::Riemann)}, [](Ctx& c) {
          const int m = c.dim();
          const double e2u = std::exp(2 * c.u0());
          const Tensor &R = c.v(Q::Riemann), &X = c.v(Q::X), &X2 = c.v(Q::X, 2);
          auto xr = [&](int i, int j, int k) { return sum(m, [&](int t) { return X(t) * R(t, i, j, k); }); };
          return Sides{gen<3>(m, [&](int i, int j, int k) { return 0.5 * e2u * xr(i, j, k) + 0.5 * e2u * (X2(j, i, k) - X2(k, j, i)); }),
                       gen<3>(m, [&](int i, int j, int k) {
                         return 0.5 * e2u * (xr(i, j, k) + xr(j, i, k)) + 0.5 * e2u * (X2(j, k, i) - X2(k, j, i));
                       })};
        });
}

void add_higher(Builder& b) {
  b.fam = Family::HIGH;
  b.hyp = Structure::GradientSoliton;
  const Requirements req{.f = true, .lambda = true, .min_dim = 4};

  auto dd2 = [](const Tensor& d2D, int i) {
    const int m = d2D.dim();
    return sum2(m, [&](int t, int k) { return d2D(i, t, k, t, k); });
  };

  b.add("third_ricci_cotton", "thirdCond1", "Ricci contracted with Cotton is a double divergence of D", req,
        {I(Q::Cotton), I(Q::D, 2)}, [dd2](Ctx& c) {
          const int m = c.dim();
          const Tensor &Ric = c.v(Q::Ricci), &C = c.v(Q::Cotton), &d2D = c.v(Q::D, 2);
          return Sides{gen<1>(m, [&](int i) { return sum2(m, [&](int k, int t) { return Ric(k, t) * C(k, t, i); }); }),
                       gen<1>(m, [&](int i) { return (m - 2.0) * dd2(d2D, i); })};
        });

  b.add("third_bach", "thirdCond2", "divergence of Bach is a double divergence of D", req, {I(Q::Bach, 1), I(Q::D, 2)},
        [dd2](Ctx& c) {
          const int m = c.dim();
          const Tensor &dB = c.v(Q::Bach, 1), &d2D = c.v(Q::D, 2);
          return Sides{gen<1>(m, [&](int i) { return sum(m, [&](int k) { return dB(i, k, k); }); }),
                       gen<1>(m, [&](int i) { return (m - 4.0) / (m - 2.0) * dd2(d2D, i); })};
        });

  auto ddd = [](const Tensor& d3D) {
    const int m = d3D.dim();
    double s = 0;
    for (int i = 0; i < m; ++i)
      for (int t = 0; t < m; ++t)
        for (int k = 0; k < m; ++k) s += d3D(i, t, k, t, k, i);
    return s;
  };

  b.add("fourth_ricci_bach", "fourthCond1", "scalar fourth order condition with Cotton, Bach and Weyl", req,
        {I(Q::Bach), I(Q::D, 3)}, [ddd](Ctx& c) {
          const int m = c.dim();
          const Tensor &Ric = c.v(Q::Ricci), &C = c.v(Q::Cotton), &Bach = c.v(Q::Bach), &W = c.v(Q::Weyl);
          double rrw = 0;
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
              for (int k = 0; k < m; ++k)
                for (int t = 0; t < m; ++t) rrw += Ric(i, j) * Ric(k, t) * W(i, k, j, t);
          return Sides{num(m, 0.5 * frob(C, C) + (m - 2) * frob(Ric, Bach) - rrw),
                       num(m, (m - 2.0) * ddd(c.v(Q::D, 3)))};
        });

  b.add("fourth_bach", "fourthCond2", "double divergence of Bach is a triple divergence of D", req,
        {I(Q::Bach, 2), I(Q::D, 3)}, [ddd](Ctx& c) {
          const int m = c.dim();
          const Tensor& d2B = c.v(Q::Bach, 2);
          return Sides{num(m, sum2(m, [&](int i, int k) { return d2B(i, k, k, i); })),
                       num(m, (m - 4.0) / (m - 2.0) * ddd(c.v(Q::D, 3)))};
        });
}

std::vector<IdentityRecord> build_registry() {
  Builder b;
  add_commutation(b);
  add_solitons(b);
  add_conformally_einstein(b);
  add_conformal_gradient(b);
  add_generic(b);
  add_conformal_generic(b);
  add_higher(b);
  return std::move(b.out);
}

constexpr std::array<std::pair<Family, const char*>, 7> kFamilies = {{
    {Family::COMM, "COMM"},
    {Family::SOL, "SOL"},
    {Family::CE, "CE"},
    {Family::CGRS, "CGRS"},
    {Family::GRS, "GRS"},
    {Family::CGERS, "CGERS"},
    {Family::HIGH, "HIGH"},
}};

bool needs(const IdentityRecord& r, const std::string& what) {
  if (what == "u") return r.req.u;
  if (what == "f") return r.req.f;
  if (what == "X") return r.req.X;
  if (what == "lambda") return r.req.lambda;
  throw Error("unknown ingredient: " + what);
}

}  // namespace

const char* family_name(Family f) {
  for (const auto& [k, n] : kFamilies)
    if (k == f) return n;
  return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
  for (const auto& [k, n] : kFamilies)
    if (name == n) return k;
  return std::nullopt;
}

int derivative_order(const Ingredient& in) {
  switch (in.q) {
    case Q::U:
    case Q::F:
    case Q::X: return in.derivs;
    case Q::Cotton:
    case Q::CottonWeyl: return 3 + in.derivs;
    case Q::Bach: return 4 + in.derivs;
    default: return 2 + in.derivs;
  }
}

int IdentityRecord::derivs() const {
  int n = 0;
  for (const auto& in : ingredients) n = std::max(n, derivative_order(in));
  return n;
}

bool IdentityRecord::uses_tilde() const {
  return std::any_of(ingredients.begin(), ingredients.end(), [](const Ingredient& in) { return in.tilde; });
}

// ---------------------------------------------------------------------------

IdentityContext::IdentityContext(const GeometryInstance& g, const GeometryInstance* tilde,
                                 std::span<const double> p, bool zero_X)
    : g_(g), tilde_geo_(tilde), m_(g.dim()), p_(p.begin(), p.end()), zero_X_(zero_X), base_(g, p) {}

double IdentityContext::lambda() const {
  if (lambda_) return *lambda_;
  if (!g_.lambda()) throw MissingIngredient("no lambda");
  return *g_.lambda();
}

double IdentityContext::u0() { return base_.scalar(Q::U); }

const Tensor& IdentityContext::v(Quantity q, int derivs) {
  if (zero_X_ && (q == Q::X || q == Q::DX || q == Q::DUX)) {
    const int rank = (q == Q::X ? 1 : 3) + derivs;
    auto it = zeros_.find({rank, 0});
    if (it == zeros_.end()) it = zeros_.emplace(std::make_pair(rank, 0), Tensor(m_, rank, 0.0)).first;
    return it->second;
  }
  return base_.value(q, derivs);
}

const Tensor& IdentityContext::tv(Quantity q, int derivs) {
  if (!tilde_) {
    if (!tilde_geo_) throw MissingIngredient("no rescaled metric");
    tilde_ = std::make_unique<CurvatureBundle>(*tilde_geo_, p_);
  }
  return tilde_->value(q, derivs);
}

// ---------------------------------------------------------------------------

const std::vector<IdentityRecord>& identity_registry() {
  static const std::vector<IdentityRecord> registry = build_registry();
  return registry;
}

const IdentityRecord* find_identity(const std::string& id) {
  for (const auto& r : identity_registry())
    if (r.id == id) return &r;
  return nullptr;
}

std::vector<const IdentityRecord*> list_identities(const IdentityFilter& filter) {
  std::vector<const IdentityRecord*> out;
  for (const auto& r : identity_registry()) {
    if (filter.family && r.family != *filter.family) continue;
    if (filter.requires_ingredient && !needs(r, *filter.requires_ingredient)) continue;
    if (filter.excludes_ingredient && needs(r, *filter.excludes_ingredient)) continue;
    out.push_back(&r);
  }
  return out;
}

std::vector<const IdentityRecord*> select_identities(const std::string& selector) {
  std::vector<const IdentityRecord*> out;
  auto push = [&](const IdentityRecord* r) {
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  std::size_t start = 0;
  while (start <= selector.size()) {
    const std::size_t comma = std::min(selector.find(',', start), selector.size());
    const std::string tok = selector.substr(start, comma - start);
    start = comma + 1;
    if (tok.empty()) continue;
    if (auto fam = family_from_name(tok)) {
      for (const auto* r : list_identities({.family = fam, .requires_ingredient = {}, .excludes_ingredient = {}})) push(r);
    } else if (const auto* r = find_identity(tok)) {
      push(r);
    } else {
      throw Error("unknown identity or family: " + tok);
    }
  }
  // Registry order regardless of how the selection was written.
  const auto* first = identity_registry().data();
  std::sort(out.begin(), out.end(), [&](const IdentityRecord* a, const IdentityRecord* b) { return a - first < b - first; });
  return out;
}

std::string registry_json(const std::vector<const IdentityRecord*>& records) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto* r : records) {
    nlohmann::ordered_json req;
    req["u"] = r->req.u;
    req["f"] = r->req.f;
    req["X"] = r->req.X;
    req["lambda"] = r->req.lambda;
    req["min_dim"] = r->req.min_dim;
    req["min_jet_order"] = r->min_jet_order();
    if (r->hypothesis) req["hypothesis"] = structure_name(*r->hypothesis);
    list.push_back({{"id", r->id},
                    {"family", family_name(r->family)},
                    {"paper_eq", r->label},
                    {"anchor", r->anchor},
                    {"requires", req},
                    {"tol_class", tol_class_name(r->tol_class())}});
  }
  return list.dump(2);
}

double certification_residual(const GeometryInstance& g, Structure s, const std::vector<std::vector<double>>& points,
                              std::optional<double> lambda) {
  double worst = 0;
  for (const auto& p : points) {
    CurvatureBundle b(g, p);
    const SolitonResidual r = lambda ? soliton_residual(b, s, *lambda) : soliton_residual(b, s);
    worst = std::max(worst, r.max_abs() / (1.0 + max_abs(b.value(Q::Ricci))));
  }
  return worst;
}

double identity_residual(const GeometryInstance& g, const IdentityRecord& rec, std::span<const double> p) {
  std::optional<GeometryInstance> tilde;
  if (rec.uses_tilde()) tilde = g.rescaled();
  IdentityContext ctx(g, tilde ? &*tilde : nullptr, p);
  const Sides s = rec.eval(ctx);
  return residual(s.first, s.second);
}

std::vector<CheckResult> verify_identities(const GeometryInstance& g, const std::vector<const IdentityRecord*>& records,
                                           const std::vector<std::vector<double>>& points, const VerifyOptions& opts) {
  auto certified = [&](Structure s) {
    return std::find(opts.certified.begin(), opts.certified.end(), s) != opts.certified.end();
  };
  auto claimed_lambda = [&](Structure s) -> std::optional<double> {
    for (const auto& [k, l] : opts.lambdas)
      if (k == s) return l;
    return std::nullopt;
  };
  const int m = g.dim();

  std::vector<CheckResult> results(records.size());
  std::vector<char> active(records.size(), 0);
  std::vector<char> zero_X(records.size(), 0);
  std::vector<std::optional<double>> lambdas(records.size());
  bool want_tilde = false;
  for (std::size_t n = 0; n < records.size(); ++n) {
    const IdentityRecord& rec = *records[n];
    CheckResult& r = results[n];
    r.id = rec.id;
    r.label = rec.label;
    r.tol_class = opts.tol_override.value_or(rec.tol_class());
    r.tolerance = tolerance(r.tol_class);
    // A certified Einstein metric is a generic soliton with X = 0.
    const bool trivial_X = rec.hypothesis == Structure::GenericSoliton && !g.has_X() && certified(Structure::Einstein);
    if (rec.hypothesis) lambdas[n] = claimed_lambda(trivial_X ? Structure::Einstein : *rec.hypothesis);
    if (m < rec.req.min_dim)
      r.reason = "dimension " + std::to_string(m) + " < " + std::to_string(rec.req.min_dim);
    else if (rec.req.u && !g.has_u())
      r.reason = "no u";
    else if (rec.req.f && !g.has_f())
      r.reason = "no f";
    else if (rec.req.X && !g.has_X() && !trivial_X)
      r.reason = "no X";
    else if (rec.req.lambda && !g.lambda() && !lambdas[n])
      r.reason = "no lambda";
    else if (rec.hypothesis && !certified(*rec.hypothesis) && !trivial_X)
      r.reason = std::string("hypothesis unmet: ") + structure_name(*rec.hypothesis) + " not certified";
    else if (g.order() < rec.min_jet_order())
      r.reason = "jet order " + std::to_string(g.order()) + " < required " + std::to_string(rec.min_jet_order());
    else {
      active[n] = 1;
      zero_X[n] = trivial_X;
      want_tilde = want_tilde || rec.uses_tilde();
    }
  }

  std::optional<GeometryInstance> tilde;
  if (want_tilde) tilde = g.rescaled();

  // Points are independent: evaluate them in parallel, then fold the
  // outcomes in point order so the report does not depend on scheduling.
  struct Outcome {
    double residual = 0.0;
    CheckStatus status = CheckStatus::Pass;
    std::string reason;
  };
  const std::size_t np = points.size(), nr = records.size();
  std::vector<Outcome> grid(np * nr);
  auto run_point = [&](std::size_t k) {
    const auto& p = points[k];
    IdentityContext plain(g, tilde ? &*tilde : nullptr, p, false);
    std::unique_ptr<IdentityContext> zeroed;
    for (std::size_t n = 0; n < nr; ++n) {
      if (!active[n]) continue;
      Outcome& o = grid[k * nr + n];
      try {
        IdentityContext* ctx = &plain;
        if (zero_X[n]) {
          if (!zeroed) zeroed = std::make_unique<IdentityContext>(g, tilde ? &*tilde : nullptr, p, true);
          ctx = zeroed.get();
        }
        ctx->set_lambda(lambdas[n]);
        const Sides s = records[n]->eval(*ctx);
        o.residual = residual(s.first, s.second);
      } catch (const JetOrderError& e) {
        o.status = CheckStatus::Skipped;
        o.reason = e.what();
      } catch (const Error& e) {
        o.status = CheckStatus::Error;
        o.reason = e.what();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(np, opts.threads > 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < np; ++k) run_point(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < np;) run_point(k);
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t k = 0; k < np; ++k)
    for (std::size_t n = 0; n < nr; ++n) {
      if (!active[n]) continue;
      const Outcome& o = grid[k * nr + n];
      CheckResult& r = results[n];
      if (o.status != CheckStatus::Pass) {
        r.status = o.status;
        r.reason = o.reason;
        active[n] = 0;
        continue;
      }
      if (r.points == 0 || o.residual > r.max_residual || std::isnan(o.residual)) {
        r.max_residual = o.residual;
        r.worst_point = points[k];
      }
      ++r.points;
    }
  for (std::size_t n = 0; n < records.size(); ++n)
    if (active[n]) results[n].status = results[n].max_residual < results[n].tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return results;
}

}  // namespace ctl

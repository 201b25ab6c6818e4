#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctl/curvature.hpp"
#include "ctl/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ctl;
using fixture::conformally_flat;
using fixture::max_abs_diff;
using fixture::wavy;

namespace {

std::vector<double> inverse(std::vector<double> A, int m) {
  std::vector<double> I(m * m, 0.0);
  for (int i = 0; i < m; ++i) I[i * m + i] = 1.0;
  for (int c = 0; c < m; ++c) {
    const double piv = A[c * m + c];
    for (int k = 0; k < m; ++k) {
      A[c * m + k] /= piv;
      I[c * m + k] /= piv;
    }
    for (int r = 0; r < m; ++r)
      if (r != c) {
        const double f = A[r * m + c];
        for (int k = 0; k < m; ++k) {
          A[r * m + k] -= f * A[c * m + k];
          I[r * m + k] -= f * I[c * m + k];
        }
      }
  }
  return I;
}

/// Scalar curvature from finite differences of finite-difference Christoffels.
double scalar_fd(const GeometryInstance& g, const std::vector<double>& p) {
  const int m = g.dim();
  const double h = 1e-3;
  const Tensor G = fixture::christoffel_fd(g, p);
  std::vector<Tensor> dG;  // dG[mu](r, a, b) = d_mu Gamma^r_ab
  for (int mu = 0; mu < m; ++mu) {
    auto shifted = [&](double s) {
      std::vector<double> q = p;
      q[mu] += s;
      return fixture::christoffel_fd(g, q);
    };
    const Tensor a = shifted(2 * h), b = shifted(h), c = shifted(-h), d = shifted(-2 * h);
    dG.push_back((-1.0 * a + 8.0 * b - 8.0 * c + d) * (1.0 / (12 * h)));
  }
  std::vector<double> gv(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) gv[i * m + j] = eval_expr(g.metric(i, j), p);
  const auto gi = inverse(gv, m);
  double S = 0;
  for (int s = 0; s < m; ++s)
    for (int nu = 0; nu < m; ++nu) {
      double ric = 0;  // R^r_{s r nu}
      for (int r = 0; r < m; ++r) {
        ric += dG[r](r, nu, s) - dG[nu](r, r, s);
        for (int l = 0; l < m; ++l) ric += G(r, r, l) * G(l, nu, s) - G(r, nu, l) * G(l, r, s);
      }
      S += gi[s * m + nu] * ric;
    }
  return S;
}

std::vector<std::vector<double>> points(int m, int n, unsigned seed, double box = 0.7) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < n; ++k) out.push_back(oracle::random_point(rng, m, -box, box));
  return out;
}

GeometrySpec sphere(int m) {
  std::string r2 = "x1^2";
  for (int i = 2; i <= m; ++i) r2 += " + x" + std::to_string(i) + "^2";
  return conformally_flat(m, "4/(1 + " + r2 + ")^2");
}

GeometrySpec hyperbolic(int m) {
  std::string r2 = "x1^2";
  for (int i = 2; i <= m; ++i) r2 += " + x" + std::to_string(i) + "^2";
  GeometrySpec s = conformally_flat(m, "4/(1 - (" + r2 + "))^2");
  s.domain.assign(m, {-0.5, 0.5});
  return s;
}

GeometrySpec conformal_flat_random(int m) {
  return conformally_flat(m, "exp(2*(0.3*x1*x2 - 0.2*x3^2 + 0.1*sin(x1 + x" + std::to_string(m) + ")))");
}

}  // namespace

TEST(Riemann, EuclideanVanishes) {
  GeometryInstance g(conformally_flat(4, "1"));
  const double p[] = {0.1, 0.2, 0.3, 0.4};
  CurvatureBundle b(g, p);
  EXPECT_LT(max_abs(b.value(Quantity::Riemann)), 1e-14);
  EXPECT_LT(max_abs(b.value(Quantity::Weyl)), 1e-14);
  EXPECT_LT(max_abs(b.value(Quantity::Bach)), 1e-14);
}

TEST(Riemann, RoundSphereHasConstantCurvature) {
  for (int m : {3, 4}) {
    GeometryInstance g(sphere(m));
    for (const auto& p : points(m, 4, 10 + m)) {
      CurvatureBundle b(g, p);
      EXPECT_NEAR(b.scalar(Quantity::Scalar), m * (m - 1.0), 1e-11);
      EXPECT_NEAR(scalar_fd(g, p), m * (m - 1.0), 1e-5);
      const Tensor& ric = b.value(Quantity::Ricci);
      const Tensor& A = b.value(Quantity::Schouten);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          EXPECT_NEAR(ric(i, j), (m - 1.0) * delta(i, j), 1e-11);
          EXPECT_NEAR(A(i, j), 0.5 * (m - 2.0) * delta(i, j), 1e-11);
        }
      const Tensor& R = b.value(Quantity::Riemann);
      const Tensor KN = kulkarni_nomizu(Tensor::generate<2>(m, delta), Tensor::generate<2>(m, delta));
      EXPECT_LT(max_abs_diff(R, 0.5 * KN), 1e-11);
      EXPECT_LT(max_abs(b.value(Quantity::Cotton)), 1e-10);
      EXPECT_LT(max_abs(b.value(Quantity::Bach)), 1e-9);
    }
  }
}

TEST(Riemann, HyperbolicBallHasNegativeScalarCurvature) {
  GeometryInstance g(hyperbolic(3));
  for (const auto& p : points(3, 4, 3, 0.4)) {
    EXPECT_NEAR(scalar_curvature(g, p), -6.0, 1e-10);
    EXPECT_NEAR(scalar_fd(g, p), -6.0, 1e-5);
  }
}

TEST(Riemann, WavyMetricAgainstFiniteDifferences) {
  GeometryInstance g(wavy(3));
  for (const auto& p : points(3, 3, 4, 0.5)) EXPECT_NEAR(scalar_curvature(g, p), scalar_fd(g, p), 1e-5);
}

TEST(Riemann, SymmetriesAndFirstBianchi) {
  for (int m : {3, 4, 5}) {
    GeometryInstance g(wavy(m));
    for (const auto& p : points(m, 3, 20 + m)) {
      const Tensor R = riemann(g, p).components;
      double worst = 0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k)
            for (int t = 0; t < m; ++t) {
              const double r = R(i, j, k, t);
              worst = std::max({worst, std::abs(r + R(j, i, k, t)), std::abs(r + R(i, j, t, k)),
                                std::abs(r - R(k, t, i, j)), std::abs(r + R(j, k, i, t) + R(k, i, j, t))});
            }
      EXPECT_LT(worst, 1e-10) << "m = " << m;
    }
  }
}

TEST(KulkarniNomizu, DeltaDelta) {
  const int m = 3;
  const Tensor d = Tensor::generate<2>(m, delta);
  const Tensor K = kulkarni_nomizu(d, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int t = 0; t < m; ++t)
          EXPECT_EQ(K(i, j, k, t), 2.0 * (delta(i, k) * delta(j, t) - delta(i, t) * delta(j, k)));
}

TEST(Ricci, SymmetricTraceAndContractedBianchi) {
  for (int m : {3, 4}) {
    GeometryInstance g(wavy(m));
    for (const auto& p : points(m, 3, 30 + m)) {
      CurvatureBundle b(g, p);
      const Tensor& ric = b.value(Quantity::Ricci);
      const Tensor& dric = b.value(Quantity::Ricci, 1);
      const Tensor& dS = b.value(Quantity::Scalar, 1);
      const Tensor& A = b.value(Quantity::Schouten);
      double trA = 0, trR = 0;
      for (int i = 0; i < m; ++i) {
        trA += A(i, i);
        trR += ric(i, i);
        double div = 0;
        for (int k = 0; k < m; ++k) {
          EXPECT_NEAR(ric(i, k), ric(k, i), 1e-11);
          div += dric(i, k, k);
        }
        EXPECT_NEAR(div, 0.5 * dS(i), 1e-8);
      }
      EXPECT_NEAR(trR, b.scalar(Quantity::Scalar), 1e-12);
      EXPECT_NEAR(trA, (m - 2.0) / (2.0 * (m - 1.0)) * trR, 1e-10);
    }
  }
}

TEST(Ricci, NormAgreesWithCoordinateContraction) {
  GeometryInstance g(wavy(4));
  const std::vector<double> p = {0.2, -0.1, 0.3, 0.4};
  CurvatureBundle b(g, p);
  const int m = 4;
  const Tensor Rc = value_of(b.riemann_coord());
  const Tensor gi = value_of(b.local().inverse_metric());
  Tensor ric(m, 2, 0.0);
  for (int s = 0; s < m; ++s)
    for (int n = 0; n < m; ++n)
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) ric(s, n) += gi(a, c) * Rc(a, s, c, n);
  double coord = 0, frame = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) coord += gi(i, a) * gi(j, c) * ric(i, j) * ric(a, c);
  for (double x : b.value(Quantity::Ricci).data()) frame += x * x;
  EXPECT_NEAR(coord, frame, 1e-10 * (1 + frame));
}

TEST(Weyl, DecompositionTraceFreeAndRoutes) {
  for (int m : {3, 4, 5}) {
    GeometryInstance g(wavy(m));
    for (const auto& p : points(m, 2, 40 + m)) {
      CurvatureBundle b(g, p);
      const Tensor& R = b.value(Quantity::Riemann);
      const Tensor& W = b.value(Quantity::Weyl);
      const Tensor KN = kulkarni_nomizu(b.value(Quantity::Schouten), Tensor::generate<2>(m, delta));
      const Tensor closure = R - W - (1.0 / (m - 2)) * KN;
      EXPECT_LT(max_abs(closure), 1e-11);
      double tr = 0;
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          double s = 0, u = 0;
          for (int i = 0; i < m; ++i) {
            s += W(i, j, i, k);
            u += W(j, i, k, i);
          }
          tr = std::max({tr, std::abs(s), std::abs(u)});
        }
      EXPECT_LT(tr, 1e-10);
      if (m == 3) EXPECT_LT(max_abs(W), 1e-10);
    }
  }
}

TEST(Weyl, ConformallyFlatMetricHasNoWeyl) {
  GeometryInstance g(conformal_flat_random(4));
  for (const auto& p : points(4, 3, 50)) {
    const Tensor W = weyl(g, p).components;
    EXPECT_LT(max_abs(W), 1e-10);
  }
  EXPECT_THROW(weyl(GeometryInstance(wavy(2)), std::vector<double>{0.1, 0.2}), ShapeError);
}

TEST(Cotton, SkewTraceFreeCyclicAndDivergenceFree) {
  for (int m : {3, 4}) {
    GeometryInstance g(wavy(m));
    for (const auto& p : points(m, 2, 60 + m)) {
      CurvatureBundle b(g, p);
      const Tensor& C = b.value(Quantity::Cotton);
      const Tensor& dC = b.value(Quantity::Cotton, 1);
      double worst = 0, div = 0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double trace = 0, d = 0;
          for (int k = 0; k < m; ++k) {
            worst = std::max({worst, std::abs(C(i, j, k) + C(i, k, j)),
                              std::abs(C(i, j, k) + C(j, k, i) + C(k, i, j))});
            trace += C(k, k, i) + C(k, i, k);
            d += dC(k, i, j, k);
          }
          worst = std::max(worst, std::abs(trace));
          div = std::max(div, std::abs(d));
        }
      EXPECT_LT(worst, 1e-9);
      EXPECT_LT(div, 1e-8);
    }
  }
}

TEST(Cotton, SchoutenAndWeylRoutesAgree) {
  for (int m : {4, 5}) {
    GeometryInstance g(wavy(m));
    for (const auto& p : points(m, 2, 70 + m)) {
      CurvatureBundle b(g, p);
      EXPECT_LT(max_abs_diff(b.value(Quantity::Cotton), b.value(Quantity::CottonWeyl)), 1e-8);
    }
  }
  EXPECT_THROW(cotton(GeometryInstance(wavy(3)), std::vector<double>{0.1, 0.2, 0.3}, CottonRoute::Weyl),
               ShapeError);
}

TEST(Bach, SymmetricTraceFreeAndDivergence) {
  for (int m : {3, 4, 5}) {
    GeometryInstance g(wavy(m));
    const auto p = points(m, 1, 80 + m)[0];
    CurvatureBundle b(g, p);
    const Tensor& B = b.value(Quantity::Bach);
    const Tensor& dB = b.value(Quantity::Bach, 1);
    const Tensor& ric = b.value(Quantity::Ricci);
    const Tensor& C = b.value(Quantity::Cotton);
    const double scale = 1 + max_abs(B);
    double tr = 0;
    for (int i = 0; i < m; ++i) {
      tr += B(i, i);
      for (int j = 0; j < m; ++j) EXPECT_LT(std::abs(B(i, j) - B(j, i)) / scale, 1e-8);
      double lhs = 0, rhs = 0;
      for (int j = 0; j < m; ++j) lhs += dB(i, j, j);
      for (int k = 0; k < m; ++k)
        for (int t = 0; t < m; ++t) rhs += ric(k, t) * C(k, t, i);
      rhs *= (m - 4.0) / ((m - 2.0) * (m - 2.0));
      EXPECT_LT(std::abs(lhs - rhs) / (1 + std::max(std::abs(lhs), std::abs(rhs))), 1e-7) << "m = " << m;
    }
    EXPECT_LT(std::abs(tr), 1e-9 * scale);
  }
}

TEST(DTensor, DegenerationsAndTraces) {
  GeometrySpec s = wavy(3);
  s.f = "1.5";
  const std::vector<double> p = {0.1, 0.2, -0.3};
  EXPECT_LT(max_abs(d_tensor(GeometryInstance(s), p).components), 1e-14);

  GeometrySpec gauss = conformally_flat(4, "1");
  gauss.f = "0.5*(x1^2 + x2^2 + x3^2 + x4^2)";
  EXPECT_LT(max_abs(d_tensor(GeometryInstance(gauss), std::vector<double>{0.1, 0.2, 0.3, 0.4}).components), 1e-14);

  s.f = "x1*x2 + sin(x3)";
  const Tensor D = d_tensor(GeometryInstance(s), p).components;
  EXPECT_GT(max_abs(D), 1e-3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double t1 = 0, t2 = 0;
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(D(i, j, k), -D(i, k, j), 1e-12);
        t1 += D(k, k, i);
        t2 += D(k, i, k);
      }
      EXPECT_NEAR(t1, 0, 1e-12);
      EXPECT_NEAR(t2, 0, 1e-12);
    }

  GeometrySpec nof = wavy(3);
  EXPECT_THROW(d_tensor(GeometryInstance(nof), p), MissingIngredient);
}

TEST(DTensor, FormsAgreeOnSteadySoliton) {
  GeometrySpec s = conformally_flat(3, "1/(1 + x1^2 + x2^2)");
  s.metric[2][2] = "1";
  s.f = "-log(1 + x1^2 + x2^2)";
  GeometryInstance g(s);
  for (const auto& p : points(3, 3, 90)) {
    CurvatureBundle b(g, p);
    const Tensor eq = b.value(Quantity::Ricci) + b.value(Quantity::F, 2);
    EXPECT_LT(max_abs(eq), 1e-11);
    const Tensor D1 = d_tensor(g, p, 1).components;
    for (int form : {2, 3, 4}) EXPECT_LT(max_abs_diff(D1, d_tensor(g, p, form).components), 1e-8) << form;
  }
}

TEST(DXTensor, GradientFieldReproducesD) {
  GeometryInstance g(fixture::diagonal_with_gradient());
  for (const auto& p : points(3, 3, 100, 0.6)) {
    const Tensor D = d_tensor(g, p).components;
    EXPECT_GT(max_abs(D), 1e-4);
    EXPECT_LT(max_abs_diff(dx_tensor(g, p).components, D), 1e-9);
  }
}

TEST(DXTensor, ZeroFieldAndFlatAgainstFiniteDifferences) {
  GeometrySpec s = wavy(3);
  s.X = std::vector<std::string>{"0", "0", "0"};
  const std::vector<double> p = {0.3, 0.1, -0.2};
  EXPECT_LT(max_abs(dx_tensor(GeometryInstance(s), p).components), 1e-14);

  // Flat metric: Ricci terms vanish and X_{ijk} = d_k d_j X_i.
  const int m = 3;
  GeometrySpec flat = conformally_flat(m, "1");
  flat.X = std::vector<std::string>{"x2*x3^2", "sin(x1)*x3", "x1^2*x2"};
  GeometryInstance g(flat);
  const Tensor DX = dx_tensor(g, p).components;
  std::vector<Expr> X;
  for (const auto& e : *flat.X) X.push_back(parse_expr(e, flat.coords));
  auto X2 = [&](int i, int j, int k) {
    std::vector<int> a(m, 0);
    ++a[j];
    ++a[k];
    oracle::Fn f = [&, i](const std::vector<double>& x) { return eval_expr(X[i], x); };
    return oracle::fd_derivative(f, p, a, 1e-2);
  };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double ref = 0.5 * (X2(k, j, i) - X2(j, k, i));
        for (int t = 0; t < m; ++t)
          ref += 0.25 * ((X2(t, k, t) - X2(k, t, t)) * delta(i, j) - (X2(t, j, t) - X2(j, t, t)) * delta(i, k));
        EXPECT_NEAR(DX(i, j, k), ref, 1e-9);
      }
}

TEST(DufTensor, Degenerations) {
  const std::vector<double> p = {0.2, -0.1, 0.3};
  GeometrySpec s = fixture::diagonal_with_gradient();
  s.u = "0";
  GeometryInstance g0(s);
  EXPECT_LT(max_abs_diff(duf_tensor(g0, p).components, d_tensor(g0, p).components), 1e-12);
  EXPECT_LT(max_abs_diff(dux_tensor(g0, p).components, dx_tensor(g0, p).components), 1e-12);

  s.u = "0.2*x1*x3 - 0.1*x2^2";
  s.f = "2";
  s.X = std::vector<std::string>{"0", "0", "0"};
  GeometryInstance g1(s);
  EXPECT_LT(max_abs(duf_tensor(g1, p).components), 1e-13);
  EXPECT_LT(max_abs(dux_tensor(g1, p).components), 1e-13);

  GeometrySpec none = fixture::diagonal_with_gradient();
  EXPECT_THROW(duf_tensor(GeometryInstance(none), p), MissingIngredient);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctl/conformal.hpp"
#include "ctl/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ctl;
using fixture::conformally_flat;
using fixture::max_abs_diff;
using fixture::wavy;

namespace {

std::vector<std::vector<double>> points(int m, int n, unsigned seed, double box = 0.5) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < n; ++k) out.push_back(oracle::random_point(rng, m, -box, box));
  return out;
}

/// Generic metric with u, f and X in dimension m (3..5).
GeometrySpec dressed(int m) {
  GeometrySpec s = wavy(m);
  s.u = "0.3*x1*x2 + 0.2*sin(x3) + 0.1*x1^2";
  s.f = "x1*x3 + 0.5*cos(x2) + x2^3/3";
  s.X = std::vector<std::string>{"x2", "sin(x1)", "x3*x1"};
  for (int i = 4; i <= m; ++i) {
    const std::string xi = "x" + std::to_string(i);
    *s.u += " + 0.1*" + xi + "^2";
    *s.f += " + " + xi;
    s.X->push_back("1 + " + xi + "*x1");
  }
  return s;
}

VerifyOptions all_certified() {
  VerifyOptions o;
  o.certified = {Structure::GradientSoliton, Structure::ConformalGradientSoliton};
  return o;
}

}  // namespace

TEST(ConformalLaws, AllLawsOnGenericGeometry) {
  for (int m : {3, 4, 5}) {
    const ConformalPair pair = rescale(GeometryInstance(dressed(m)));
    const auto pts = points(m, 2, 10 + m);
    for (const auto& info : law_registry()) {
      const CheckResult r = verify_transform(pair, info.law, pts, all_certified());
      EXPECT_EQ(r.status, CheckStatus::Pass) << "m=" << m << " " << info.id << " residual " << r.max_residual << " "
                                             << r.reason;
    }
  }
}

namespace {

/// Base metric e^{-2u} (cigar x line), so the rescaled metric is the steady
/// cigar soliton times a line with f = -log(1 + x^2 + y^2).
GeometrySpec cigar_pullback() {
  const std::string u = "0.2*x1 + 0.1*x2*x3 + 0.05*x3^2";
  GeometrySpec s = conformally_flat(3, "1");
  s.metric[0][0] = s.metric[1][1] = "exp(-2*(" + u + "))/(1 + x1^2 + x2^2)";
  s.metric[2][2] = "exp(-2*(" + u + "))";
  s.u = u;
  s.f = "-log(1 + x1^2 + x2^2)";
  s.lambda = 0.0;
  return s;
}

}  // namespace

TEST(ConformalLaws, DerivativeOfDOnConformalSoliton) {
  const ConformalPair pair = rescale(GeometryInstance(cigar_pullback()));
  const CheckResult r = verify_transform(pair, Law::NablaD, points(3, 4, 5), all_certified());
  EXPECT_EQ(r.status, CheckStatus::Pass) << r.max_residual;
}

namespace {

std::string radius2(int m) {
  std::string r2 = "x1^2";
  for (int i = 2; i <= m; ++i) r2 += " + x" + std::to_string(i) + "^2";
  return r2;
}

/// Base metric e^{-2u} times a given diagonal factor.
GeometrySpec pulled_back(int m, const std::string& factor, const std::string& u) {
  GeometrySpec s = conformally_flat(m, "exp(-2*(" + u + "))*(" + factor + ")");
  s.u = u;
  return s;
}

double u_at(const GeometryInstance& g, const std::vector<double>& p) { return eval_expr(g.u(), p); }

}  // namespace

TEST(Rescale, ZeroFactorKeepsMetric) {
  const ConformalPair pair = rescale(GeometryInstance(wavy(3)), "0");
  for (const auto& p : points(3, 3, 1))
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(eval_expr(pair.tilde.metric(i, j), p), eval_expr(pair.base.metric(i, j), p), 1e-15);
  EXPECT_THROW(rescale(GeometryInstance(wavy(3))), MissingIngredient);
}

TEST(Rescale, ConstantFactorScalesScalarCurvature) {
  const double c = 0.4;
  const ConformalPair pair = rescale(GeometryInstance(wavy(3)), "0.4");
  for (const auto& p : points(3, 3, 2)) {
    const double S = scalar_curvature(pair.base, p), St = scalar_curvature(pair.tilde, p);
    EXPECT_NEAR(St, std::exp(-2 * c) * S, 1e-12);
    EXPECT_NEAR(predict(pair, Law::Scalar, p).components(), std::exp(2 * c) * St, 1e-11);
  }
}

TEST(Rescale, StereographicFactorGivesRoundSphere) {
  const ConformalPair pair = rescale(GeometryInstance(conformally_flat(3, "1")), "log(2/(1 + " + radius2(3) + "))");
  for (const auto& p : points(3, 5, 3, 0.8)) EXPECT_NEAR(scalar_curvature(pair.tilde, p), 6.0, 1e-10);
}

TEST(ConformalLaws, ScalarOnSphereWithConstantFactor) {
  const ConformalPair pair =
      rescale(GeometryInstance(conformally_flat(3, "4/(1 + " + radius2(3) + ")^2")), "-0.3");
  const std::vector<double> p = {0.2, -0.1, 0.4};
  const double pr = predict(pair, Law::Scalar, p).components();
  EXPECT_NEAR(pr, 6.0, 1e-10);
  EXPECT_NEAR(direct(pair, Law::Scalar, p).components(), pr, 1e-10);
  EXPECT_NEAR(scalar_curvature(pair.tilde, p), std::exp(0.6) * 6.0, 1e-10);
}

TEST(ConformalLaws, WeylIsInvariantInDimensionFour) {
  GeometrySpec s = wavy(4);
  s.u = "0.2*x1*x4 + 0.3*sin(x2) - 0.1*x3^2";
  const ConformalPair pair = rescale(GeometryInstance(s));
  for (const auto& p : points(4, 3, 4)) {
    ConformalPoint cp(pair, p);
    EXPECT_LT(max_abs_diff(cp.direct(Law::Weyl13), cp.base().value(Quantity::Weyl)), 1e-9);
  }
}

TEST(ConformalLaws, HessianOfPotentialWithConstantFactor) {
  GeometrySpec s = wavy(3);
  s.f = "x1*x2*x3 + exp(x2)";
  const ConformalPair pair = rescale(GeometryInstance(s), "0.7");
  const std::vector<double> p = {0.1, 0.3, -0.2};
  ConformalPoint cp(pair, p);
  EXPECT_LT(max_abs_diff(cp.direct(Law::HessianF), cp.base().value(Quantity::F, 2)), 1e-12);
  EXPECT_LT(max_abs_diff(cp.predict(Law::HessianF), cp.base().value(Quantity::F, 2)), 1e-15);
}

TEST(ConformalLaws, SecondDerivativeOfRicciInDimensionFour) {
  GeometrySpec s = wavy(4);
  s.u = "0.25*x1*x2 - 0.2*cos(x3*x4) + 0.1*x4";
  const ConformalPair pair = rescale(GeometryInstance(s));
  const CheckResult r = verify_transform(pair, Law::Nabla2Ricci, points(4, 3, 6));
  EXPECT_LT(r.max_residual, 1e-6);
  EXPECT_EQ(r.tol_class, TolClass::B);
}

TEST(ConformalLaws, KillingFieldWithoutRescaling) {
  GeometrySpec s = conformally_flat(3, "1");
  s.X = std::vector<std::string>{"-x2", "x1", "0"};
  const ConformalPair pair = rescale(GeometryInstance(s), "0");
  const std::vector<double> p = {0.3, 0.2, -0.5};
  EXPECT_LT(max_abs(predict(pair, Law::LieMetric, p).components), 1e-15);
  EXPECT_LT(max_abs(direct(pair, Law::LieMetric, p).components), 1e-14);
}

TEST(ConformalLaws, DivergenceOfGradientMatchesLaplacianLaw) {
  GeometrySpec s = fixture::diagonal_with_gradient();
  s.u = "0.3*x1 - 0.2*x2*x3";
  const ConformalPair pair = rescale(GeometryInstance(s));
  for (const auto& p : points(3, 4, 7)) {
    ConformalPoint cp(pair, p);
    // With X = grad f: div~ X - m X.du = lap f = e^{2u} lap~ f - (m-2) df.du.
    const Tensor& df = cp.base().value(Quantity::F, 1);
    const Tensor& du = cp.base().value(Quantity::U, 1);
    double fu = 0;
    for (int t = 0; t < 3; ++t) fu += df(t) * du(t);
    EXPECT_NEAR(cp.predict(Law::DivX)() - 3 * fu, cp.predict(Law::LaplacianF)() - fu, 1e-12);
    EXPECT_NEAR(cp.direct(Law::DivX)() - 3 * fu, cp.direct(Law::LaplacianF)() - fu, 1e-9);
  }
}

TEST(ConformalProperty, CompositionOfRescalings) {
  const std::string u = "0.2*x1*x2 + 0.1*sin(x3)", v = "-0.15*x3*x1 + 0.1*x2";
  GeometrySpec s = wavy(4);
  const GeometryInstance g(s);
  const ConformalPair whole = rescale(g, "(" + u + ") + (" + v + ")");
  const ConformalPair first = rescale(g, u);
  const ConformalPair second = rescale(first.tilde, v);
  for (const auto& p : points(4, 3, 8)) {
    const double eu = std::exp(2 * u_at(first.base, p));
    for (Law law : {Law::Scalar, Law::Ricci, Law::Weyl13}) {
      const Tensor a = predict(whole, law, p).components;
      const Tensor b = eu * predict(second, law, p).components;
      EXPECT_LT(residual(a, b), 1e-8) << law_info(law).id;
    }
  }
}

TEST(ConformalProperty, TracedLawsAreTracesOfUntraced) {
  for (int m : {3, 4}) {
    const ConformalPair pair = rescale(GeometryInstance(dressed(m)));
    for (const auto& p : points(m, 3, 20 + m)) {
      ConformalPoint cp(pair, p);
      const Tensor f3 = cp.predict(Law::ThirdF), x2 = cp.predict(Law::Nabla2X), hs = cp.predict(Law::HessScalar);
      const Tensor tf = cp.predict(Law::ThirdFTraced), tx = cp.predict(Law::Nabla2XTraced);
      for (int k = 0; k < m; ++k) {
        double a = 0, b = 0;
        for (int t = 0; t < m; ++t) {
          a += f3(t, t, k);
          b += x2(t, t, k);
        }
        EXPECT_NEAR(tf(k), a, 1e-8 * (1 + std::abs(a)));
        EXPECT_NEAR(tx(k), b, 1e-8 * (1 + std::abs(b)));
      }
      double lap = 0;
      for (int t = 0; t < m; ++t) lap += hs(t, t);
      EXPECT_NEAR(cp.predict(Law::LapScalar)(), lap, 1e-8 * (1 + std::abs(lap)));
    }
  }
}

TEST(ConformalProperty, RandomPairsAllLaws) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> c(-0.3, 0.3);
  for (int trial = 0; trial < 3; ++trial) {
    const int m = 3 + trial % 2;
    GeometrySpec s = dressed(m);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.4f*x1*x2 + %.4f*x2^2 + %.4f*sin(x3 + x1)", c(rng), c(rng), c(rng));
    s.u = buf;
    const ConformalPair pair = rescale(GeometryInstance(s));
    const auto pts = points(m, 2, 100 + trial);
    for (const auto& info : law_registry()) {
      const CheckResult r = verify_transform(pair, info.law, pts, all_certified());
      EXPECT_EQ(r.status, CheckStatus::Pass) << info.id << " " << r.max_residual;
    }
  }
}

TEST(VerifyTransform, GatesAndSkips) {
  GeometrySpec s = wavy(3);
  s.u = "0.1*x1";
  const ConformalPair bare = rescale(GeometryInstance(s));
  const auto pts = points(3, 1, 9);
  CheckResult r = verify_transform(bare, Law::HessianF, pts);
  EXPECT_EQ(r.status, CheckStatus::Skipped);
  EXPECT_EQ(r.reason, "no f");
  EXPECT_EQ(verify_transform(bare, Law::DivX, pts).reason, "no X");

  s.f = "x1*x2";
  const ConformalPair with_f = rescale(GeometryInstance(s));
  EXPECT_EQ(verify_transform(with_f, Law::DTensor, pts).status, CheckStatus::Skipped);
  EXPECT_EQ(verify_transform(with_f, Law::DTensorReverse, pts).status, CheckStatus::Skipped);
  VerifyOptions o;
  o.certified = {Structure::ConformalGradientSoliton};
  EXPECT_EQ(verify_transform(with_f, Law::DTensor, pts, o).status, CheckStatus::Pass);

  const ConformalPair low = rescale(GeometryInstance(s, JetConfig{3}));
  r = verify_transform(low, Law::Nabla2Ricci, pts);
  EXPECT_EQ(r.status, CheckStatus::Skipped);
  EXPECT_EQ(r.reason, "jet order 3 < required 4");
  EXPECT_EQ(verify_transform(low, Law::Ricci, pts).status, CheckStatus::Pass);

  o.tol_override = TolClass::C;
  EXPECT_EQ(verify_transform(with_f, Law::Ricci, pts, o).tolerance, 1e-5);
  EXPECT_EQ(verify_transform(with_f, Law::Ricci, pts).id, "CONF.ricci");
}

TEST(LawRegistry, IdsRoundTrip) {
  EXPECT_EQ(law_registry().size(), 27u);
  for (const auto& info : law_registry()) EXPECT_EQ(law_from_id(info.id), info.law);
  EXPECT_FALSE(law_from_id("nope").has_value());
}

// ---------------------------------------------------------------------------

TEST(SolitonResidual, EinsteinAndGradientSolitons) {
  GeometrySpec sph = conformally_flat(3, "4/(1 + " + radius2(3) + ")^2");
  sph.lambda = 2.0;
  GeometrySpec gauss = conformally_flat(3, "1");
  gauss.f = "0.5*(" + radius2(3) + ")";
  gauss.lambda = 1.0;
  for (const auto& p : points(3, 3, 11)) {
    CurvatureBundle a(GeometryInstance(sph), p), b(GeometryInstance(gauss), p);
    EXPECT_LT(soliton_residual(a, Structure::Einstein).max_abs(), 1e-12);
    EXPECT_LT(soliton_residual(b, Structure::GradientSoliton).max_abs(), 1e-13);
    EXPECT_GT(soliton_residual(b, Structure::GradientSoliton, 0.5).max_abs(), 0.4);
    EXPECT_THROW(soliton_residual(a, Structure::GradientSoliton), MissingIngredient);
  }
}

TEST(SolitonResidual, GenericSolitonWithKillingPart) {
  GeometrySpec s = conformally_flat(3, "1");
  s.X = std::vector<std::string>{"x1 - x2", "x2 + x1", "x3"};
  s.lambda = 1.0;
  CurvatureBundle b(GeometryInstance(s), std::vector<double>{0.2, 0.1, -0.3});
  EXPECT_LT(soliton_residual(b, Structure::GenericSoliton).max_abs(), 1e-14);
}

TEST(SolitonResidual, ConformalStructuresOnPulledBackSolitons) {
  const std::string u = "0.2*x1 - 0.1*x2*x3 + 0.05*x1^2";
  // Sphere rescaled back: conformally Einstein with lambda = 2.
  GeometrySpec ce = pulled_back(3, "4/(1 + " + radius2(3) + ")^2", u);
  ce.lambda = 2.0;
  // Gaussian soliton rescaled back.
  GeometrySpec cg = pulled_back(3, "1", u);
  cg.f = "0.5*(" + radius2(3) + ")";
  cg.lambda = 1.0;
  // Gaussian plus rotation.
  GeometrySpec cx = cg;
  cx.f.reset();
  cx.X = std::vector<std::string>{"x1 - x2", "x2 + x1", "x3"};
  for (const auto& p : points(3, 3, 12)) {
    CurvatureBundle a(GeometryInstance(ce), p), b(GeometryInstance(cg), p), c(GeometryInstance(cx), p);
    EXPECT_LT(soliton_residual(a, Structure::ConformallyEinstein).max_abs(), 1e-11);
    EXPECT_LT(soliton_residual(b, Structure::ConformalGradientSoliton).max_abs(), 1e-11);
    EXPECT_LT(soliton_residual(c, Structure::ConformalGenericSoliton).max_abs(), 1e-11);
    EXPECT_GT(soliton_residual(b, Structure::GradientSoliton).max_abs(), 1e-3);
  }
  CurvatureBundle d(GeometryInstance(cigar_pullback()), std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_LT(soliton_residual(d, Structure::ConformalGradientSoliton).max_abs(), 1e-12);
}

TEST(SolitonResidual, StructureNamesRoundTrip) {
  for (Structure s : {Structure::Einstein, Structure::GradientSoliton, Structure::GenericSoliton,
                      Structure::ConformallyEinstein, Structure::ConformalGradientSoliton,
                      Structure::ConformalGenericSoliton})
    EXPECT_EQ(structure_from_name(structure_name(s)), s);
  EXPECT_FALSE(structure_from_name("ricci_flat").has_value());
}

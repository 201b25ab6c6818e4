#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "ctl/error.hpp"
#include "ctl/identities.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ctl;

namespace {

using fixture::conformally_flat;
using fixture::max_abs_diff;
using fixture::wavy;

std::vector<std::vector<double>> points(int m, int n, unsigned seed, double box = 0.5) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < n; ++k) out.push_back(oracle::random_point(rng, m, -box, box));
  return out;
}

std::string radius2(int m) {
  std::string r2 = "x1^2";
  for (int i = 2; i <= m; ++i) r2 += " + x" + std::to_string(i) + "^2";
  return r2;
}

/// Generic metric carrying u, f, X and lambda.
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
  s.lambda = 0.7;
  return s;
}

const std::string kU = "0.2*x1 - 0.1*x2*x3 + 0.05*x1^2";

/// Steady cigar soliton times a flat factor, optionally pulled back by e^{-2u}.
/// The gradient version has f = -log(1 + x1^2 + x2^2); the generic one has
/// X = grad f plus a rotation, which is Killing for the cigar.
GeometrySpec cigar(int m, const std::string& u, bool generic) {
  GeometrySpec s = conformally_flat(m, "1");
  const std::string e = u.empty() ? "1" : "exp(-2*(" + u + "))";
  for (int i = 0; i < m; ++i) s.metric[i][i] = e;
  s.metric[0][0] = s.metric[1][1] = e + "/(1 + x1^2 + x2^2)";
  if (!u.empty()) s.u = u;
  s.lambda = 0.0;
  if (generic) {
    s.X = std::vector<std::string>(m, "0");
    (*s.X)[0] = "-2*x1 - x2";
    (*s.X)[1] = "-2*x2 + x1";
  } else {
    s.f = "-log(1 + x1^2 + x2^2)";
  }
  return s;
}

/// Round sphere of radius 1 in stereographic coordinates, pulled back by e^{-2u}.
GeometrySpec sphere(int m, const std::string& u = "") {
  const std::string factor = "4/(1 + " + radius2(m) + ")^2";
  GeometrySpec s = conformally_flat(m, u.empty() ? factor : "exp(-2*(" + u + "))*" + factor);
  if (!u.empty()) s.u = u;
  s.lambda = m - 1.0;
  return s;
}

VerifyOptions certify(std::vector<Structure> s) {
  VerifyOptions o;
  o.certified = std::move(s);
  return o;
}

void expect_all_pass(const GeometrySpec& s, const std::string& selector, const VerifyOptions& opts,
                     unsigned seed = 7, int npts = 3) {
  GeometryInstance g(s);
  for (const auto& r : verify_identities(g, select_identities(selector), points(g.dim(), npts, seed), opts)) {
    if (r.status == CheckStatus::Skipped && r.reason.rfind("dimension", 0) == 0) continue;
    EXPECT_EQ(r.status, CheckStatus::Pass) << "m=" << g.dim() << " " << r.id << " residual " << r.max_residual
                                           << " " << r.reason;
  }
}

Sides sides(const GeometrySpec& s, const std::string& id, const std::vector<double>& p) {
  GeometryInstance g(s);
  std::optional<GeometryInstance> tilde;
  const IdentityRecord* rec = find_identity(id);
  if (rec->uses_tilde()) tilde = g.rescaled();
  IdentityContext ctx(g, tilde ? &*tilde : nullptr, p);
  return rec->eval(ctx);
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(IdentityFamilies, CommutationsOnGenericMetrics) {
  for (int m : {3, 4, 5}) expect_all_pass(dressed(m), "COMM", {}, 20 + m, m == 5 ? 1 : 2);
}

const char* kGenericRows = "SOL.eq1,SOL.eq2,SOL.eq3,SOL.eq4,SOL.eq5,SOL.eq6,SOL.scal_generic,GRS";

TEST(IdentityFamilies, SolitonRowsOnCigar) {
  for (int m : {3, 4}) {
    // The gradient soliton is also a generic one with X = grad f.
    GeometrySpec s = cigar(m, "", false);
    s.X = std::vector<std::string>(m, "0");
    (*s.X)[0] = "-2*x1";
    (*s.X)[1] = "-2*x2";
    expect_all_pass(s, "SOL,GRS", certify({Structure::GradientSoliton, Structure::GenericSoliton}));
    expect_all_pass(cigar(m, "", true), kGenericRows, certify({Structure::GenericSoliton}));
  }
}

TEST(IdentityFamilies, GenericRowsOnSphereRunWithZeroField) {
  GeometryInstance g(sphere(3));
  const auto rs = verify_identities(g, select_identities("SOL.eq1,SOL.eq4,SOL.scal_generic,SOL.eq1g"),
                                    points(3, 2, 3), certify({Structure::Einstein}));
  EXPECT_EQ(rs[0].status, CheckStatus::Pass) << rs[0].max_residual;
  EXPECT_EQ(rs[1].status, CheckStatus::Pass) << rs[1].max_residual;
  EXPECT_EQ(rs[2].status, CheckStatus::Pass) << rs[2].max_residual;
  EXPECT_EQ(rs[3].status, CheckStatus::Skipped);
  EXPECT_EQ(rs[3].reason, "no f");
}

TEST(IdentityFamilies, HamiltonOnGaussian) {
  GeometrySpec s = conformally_flat(3, "1");
  s.f = "0.5*(" + radius2(3) + ")";
  s.lambda = 1.0;
  GeometryInstance g(s);
  const auto r = verify_identities(g, select_identities("SOL.hamilton"), points(3, 4, 1),
                                   certify({Structure::GradientSoliton}));
  EXPECT_EQ(r[0].status, CheckStatus::Pass);
  EXPECT_LT(r[0].max_residual, 1e-9);
}

TEST(IdentityFamilies, ConformallyEinsteinOnPulledBackSphere) {
  for (int m : {3, 4}) expect_all_pass(sphere(m, kU), "CE", certify({Structure::ConformallyEinstein}));
}

TEST(IdentityFamilies, ConformalSolitonsOnPulledBackCigar) {
  for (int m : {3, 4}) {
    expect_all_pass(cigar(m, kU, false), "CGRS", certify({Structure::ConformalGradientSoliton}));
    expect_all_pass(cigar(m, kU, true), "CGERS", certify({Structure::ConformalGenericSoliton}));
  }
}

TEST(IdentityFamilies, HigherConditionsOnCigarTimesFlat) {
  for (int m : {4, 5}) expect_all_pass(cigar(m, "", false), "HIGH", certify({Structure::GradientSoliton}), 5, 2);
}

TEST(IdentityFamilies, HigherConditionsAreMutuallyConsistent) {
  const GeometrySpec s = cigar(5, "", false);
  for (const auto& p : points(5, 2, 9)) {
    const Sides a = sides(s, "HIGH.third_ricci_cotton", p), b = sides(s, "HIGH.third_bach", p);
    // Divergence of Bach ties the two right sides: (m-4)/(m-2)^2 Ric.C = div B.
    EXPECT_LT(max_abs_diff(a.first * (1.0 / 9.0), b.second), 1e-8);
    EXPECT_GT(max_abs(b.second), 1e-3);
  }
}

TEST(IdentityFamilies, ConditionalRowsFailWithoutTheirStructure) {
  // Forcing the certification on a generic metric must expose the rows that
  // depend on the structure.
  GeometryInstance g(dressed(4));
  const auto rs = verify_identities(g, select_identities("SOL.eq1g,CE.first,CGRS.first,GRS.first,CGERS.first"),
                                    points(4, 1, 3),
                                    certify({Structure::GradientSoliton, Structure::GenericSoliton,
                                             Structure::ConformallyEinstein, Structure::ConformalGradientSoliton,
                                             Structure::ConformalGenericSoliton}));
  for (const auto& r : rs) EXPECT_EQ(r.status, CheckStatus::Fail) << r.id;
}

// ---------------------------------------------------------------------------
// Degenerations between families.

TEST(IdentityDegenerations, GenericRowsWithGradientFieldMatchGradientRows) {
  GeometrySpec s = cigar(4, "", false);
  s.X = std::vector<std::string>{"-2*x1", "-2*x2", "0", "0"};
  for (const auto& p : points(4, 2, 4)) {
    const Sides a = sides(s, "GRS.first", p), b = sides(s, "SOL.first", p);
    EXPECT_LT(max_abs_diff(a.first, b.first), 1e-10);
    EXPECT_LT(max_abs_diff(a.second, b.second), 1e-10);
    const Sides c = sides(s, "GRS.second", p), d = sides(s, "SOL.second", p);
    EXPECT_LT(max_abs_diff(c.second, d.second), 1e-10);
    const Sides e = sides(s, "SOL.eq6", p), f = sides(s, "SOL.eq6g", p);
    EXPECT_LT(max_abs_diff(e.second, f.second), 1e-10);
  }
}

TEST(IdentityDegenerations, ZeroFactorReducesConformalRowsToSolitonRows) {
  for (const auto& p : points(4, 2, 5)) {
    const Sides a = sides(cigar(4, "0", false), "CGRS.first", p), b = sides(cigar(4, "", false), "SOL.first", p);
    EXPECT_LT(max_abs_diff(a.first, b.first), 1e-10);
    EXPECT_LT(max_abs_diff(a.second, b.second), 1e-10);
    const Sides c = sides(cigar(4, "0", true), "CGERS.first", p), d = sides(cigar(4, "", true), "GRS.first", p);
    EXPECT_LT(max_abs_diff(c.first, d.first), 1e-10);
    EXPECT_LT(max_abs_diff(c.second, d.second), 1e-10);
  }
}

TEST(IdentityDegenerations, ConstantPotentialReducesGradientRowsToEinsteinRows) {
  GeometrySpec s = sphere(4, kU);
  s.f = "2";
  for (const auto& p : points(4, 2, 6)) {
    const Sides a = sides(s, "CGRS.first", p), b = sides(s, "CE.first", p);
    EXPECT_LT(max_abs_diff(a.first - a.second, b.first - b.second), 1e-10);
    EXPECT_LT(max_abs(a.second), 1e-10);
    const Sides c = sides(s, "CGRS.ricci", p), d = sides(s, "CE.ricci", p);
    EXPECT_LT(max_abs_diff(c.first, d.first), 1e-10);
    EXPECT_LT(max_abs_diff(c.second, d.second), 1e-10);
  }
  expect_all_pass(s, "CGRS", certify({Structure::ConformalGradientSoliton}));
}

TEST(IdentityDegenerations, ZeroFieldReducesGenericConformalRowsToEinsteinRows) {
  GeometrySpec s = sphere(4, kU);
  s.X = std::vector<std::string>(4, "0");
  for (const auto& p : points(4, 2, 8)) {
    for (const auto& [a_id, b_id] : {std::pair{"CGERS.first", "CE.first"}, std::pair{"CGERS.second", "CE.second"},
                                     std::pair{"CGERS.ricci", "CE.ricci"}}) {
      const Sides a = sides(s, a_id, p), b = sides(s, b_id, p);
      EXPECT_LT(max_abs_diff(a.first - a.second, b.first - b.second), 1e-10) << a_id;
    }
  }
  expect_all_pass(s, "CGERS", certify({Structure::ConformalGenericSoliton}));
}

TEST(IdentityDegenerations, ZeroFieldOnSphereLeavesEinsteinRows) {
  GeometrySpec s = sphere(3);
  s.X = std::vector<std::string>{"0", "0", "0"};
  expect_all_pass(s, kGenericRows, certify({Structure::GenericSoliton}));
}

// ---------------------------------------------------------------------------

TEST(IdentityDriver, SkipReasons) {
  GeometrySpec s = wavy(3);
  s.f = "x1";
  GeometryInstance g(s);
  const auto rs = verify_identities(
      g, select_identities("COMM.schouten_skew,CE.ricci,COMM.vector_second,SOL.eq1g,SOL.hamilton,HIGH.third_bach"),
      points(3, 1, 1));
  std::map<std::string, std::string> why;
  for (const auto& r : rs) {
    EXPECT_EQ(r.status, CheckStatus::Skipped) << r.id;
    why[r.id] = r.reason;
  }
  EXPECT_EQ(why["COMM.schouten_skew"], "dimension 3 < 4");
  EXPECT_EQ(why["CE.ricci"], "no u");
  EXPECT_EQ(why["COMM.vector_second"], "no X");
  EXPECT_EQ(why["SOL.eq1g"], "no lambda");
  EXPECT_EQ(why["HIGH.third_bach"], "dimension 3 < 4");

  s.lambda = 1.0;
  const auto r2 = verify_identities(GeometryInstance(s), select_identities("SOL.eq1g"), points(3, 1, 1));
  EXPECT_EQ(r2[0].reason, "hypothesis unmet: gradient_soliton not certified");

  GeometryInstance low(wavy(3), JetConfig{3});
  const auto r3 = verify_identities(low, select_identities("COMM.riemann_second,COMM.first_bianchi"), points(3, 1, 1));
  // Results come back in registry order.
  EXPECT_EQ(r3[0].id, "COMM.first_bianchi");
  EXPECT_EQ(r3[0].status, CheckStatus::Pass);
  EXPECT_EQ(r3[1].status, CheckStatus::Skipped);
  EXPECT_EQ(r3[1].reason, "jet order 3 < required 4");
}

TEST(IdentityDriver, DeterministicAndOverridable) {
  GeometryInstance g(dressed(3));
  const auto sel = select_identities("COMM.third_f_riemann,COMM.cotton_divergence");
  const auto a = verify_identities(g, sel, points(3, 3, 2)), b = verify_identities(g, sel, points(3, 3, 2));
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].max_residual, b[k].max_residual);
    EXPECT_EQ(a[k].worst_point, b[k].worst_point);
    EXPECT_EQ(a[k].points, 3);
  }
  VerifyOptions o;
  o.tol_override = TolClass::C;
  EXPECT_EQ(verify_identities(g, sel, points(3, 1, 2), o)[0].tolerance, 1e-5);
}

TEST(IdentityDriver, CertificationResidual) {
  const auto pts = points(3, 3, 8);
  EXPECT_LT(certification_residual(GeometryInstance(cigar(3, "", false)), Structure::GradientSoliton, pts),
            kCertifyTolerance);
  EXPECT_LT(certification_residual(GeometryInstance(sphere(3, kU)), Structure::ConformallyEinstein, pts),
            kCertifyTolerance);
  EXPECT_GT(certification_residual(GeometryInstance(dressed(3)), Structure::GradientSoliton, pts), 1e-3);
}

// ---------------------------------------------------------------------------

TEST(IdentityRegistry, IdsAreUniqueAndResolvable) {
  std::set<std::string> ids;
  for (const auto& r : identity_registry()) {
    EXPECT_TRUE(ids.insert(r.id).second) << r.id;
    EXPECT_EQ(find_identity(r.id), &r);
    EXPECT_EQ(r.id.substr(0, r.id.find('.')), family_name(r.family));
    EXPECT_FALSE(r.anchor.empty());
    EXPECT_LE(r.derivs(), 7);
  }
  EXPECT_EQ(find_identity("COMM.nope"), nullptr);
}

TEST(IdentityRegistry, Filters) {
  EXPECT_EQ(list_identities({.family = Family::HIGH}).size(), 4u);
  EXPECT_GE(list_identities({.family = Family::COMM}).size(), 30u);
  for (const auto* r : list_identities({.requires_ingredient = std::string("f")})) EXPECT_NE(r->family, Family::CE);
  for (const auto* r : list_identities({.excludes_ingredient = std::string("lambda")}))
    EXPECT_EQ(r->family, Family::COMM);
  EXPECT_THROW(list_identities({.requires_ingredient = std::string("g")}), Error);
}

TEST(IdentityRegistry, Selection) {
  const auto a = select_identities("HIGH,SOL.hamilton");
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[0]->id, "SOL.hamilton");
  EXPECT_EQ(select_identities("SOL.hamilton,SOL.hamilton").size(), 1u);
  EXPECT_THROW(select_identities("SOL.nope"), Error);
  EXPECT_THROW(select_identities("FOO"), Error);
}

TEST(IdentityRegistry, ToleranceClassFollowsDerivativeCount) {
  EXPECT_EQ(find_identity("COMM.hessian_symmetry")->tol_class(), TolClass::A);
  EXPECT_EQ(find_identity("COMM.first_bianchi")->tol_class(), TolClass::A);
  EXPECT_EQ(find_identity("COMM.second_bianchi")->tol_class(), TolClass::B);
  EXPECT_EQ(find_identity("COMM.bach_divergence")->tol_class(), TolClass::C);
  EXPECT_EQ(find_identity("HIGH.fourth_bach")->min_jet_order(), 6);
  EXPECT_TRUE(find_identity("CGRS.d_rescaled")->uses_tilde());
}

TEST(IdentityRegistry, JsonDump) {
  const auto j = nlohmann::json::parse(registry_json(list_identities({.family = Family::HIGH})));
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[0]["id"], "HIGH.third_ricci_cotton");
  EXPECT_EQ(j[0]["family"], "HIGH");
  EXPECT_EQ(j[0]["paper_eq"], "thirdCond1");
  EXPECT_EQ(j[0]["requires"]["min_dim"], 4);
  EXPECT_EQ(j[0]["requires"]["f"], true);
  EXPECT_EQ(j[0]["requires"]["u"], false);
  EXPECT_EQ(j[3]["tol_class"], "C");
  for (const auto& e : j) EXPECT_TRUE(e.contains("anchor"));
}

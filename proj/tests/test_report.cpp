#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "ctl/error.hpp"
#include "ctl/report.hpp"

using namespace ctl;

namespace {

RunConfig catalog_run(const std::string& name, std::vector<std::string> suites, int points = 2) {
  RunConfig c;
  c.catalog = name;
  c.suites = std::move(suites);
  c.points = points;
  c.seed = 5;
  return c;
}

const ReportRow* row(const VerificationReport& r, const std::string& id) {
  for (const auto& x : r.rows)
    if (x.id == id) return &x;
  return nullptr;
}

}  // namespace

TEST(Report, FlatCommutationsPass) {
  const auto rep = run_verification(catalog_run("euclidean", {"COMM"}));
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.dim, 3);
  EXPECT_EQ(rep.source, "catalog:euclidean");
  EXPECT_EQ(rep.certified, (std::vector<std::string>{"einstein", "gradient_soliton"}));
  EXPECT_GT(rep.count(CheckStatus::Pass), 30);
  for (const auto& r : rep.rows) EXPECT_EQ(r.family, "COMM");
}

TEST(Report, SelectionKeepsRegistryOrder) {
  RunConfig c = catalog_run("conformal_gaussian", {});
  c.ids = {"CONF.cotton", "COMM.second_bianchi", "COMM.hessian_symmetry"};
  c.laws = {"ExpochangenablasquaredRicci"};
  const auto rep = run_verification(c);
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_EQ(rep.rows[0].id, "COMM.hessian_symmetry");
  EXPECT_EQ(rep.rows[1].id, "COMM.second_bianchi");
  EXPECT_EQ(rep.rows[2].id, "CONF.nabla2_ricci");
  EXPECT_EQ(rep.rows[3].id, "CONF.cotton");
  EXPECT_TRUE(rep.passed());
}

TEST(Report, LawsWithoutFactorAreSkipped) {
  RunConfig c = catalog_run("hyperbolic", {"CONF"}, 1);
  const auto rep = run_verification(c);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.status, CheckStatus::Skipped);
    EXPECT_EQ(r.reason, "no u");
  }
}

TEST(Report, BadConfigs) {
  EXPECT_THROW(run_verification(catalog_run("nope", {"COMM"})), ConfigError);
  EXPECT_THROW(run_verification(catalog_run("euclidean", {"NOPE"})), ConfigError);
  RunConfig c = catalog_run("euclidean", {"COMM"});
  c.points = 0;
  EXPECT_THROW(run_verification(c), ConfigError);
  c = catalog_run("euclidean", {"COMM"});
  c.jet_order = 1;
  EXPECT_THROW(run_verification(c), ConfigError);
  c = catalog_run("euclidean", {});
  c.ids = {"COMM.nothing"};
  EXPECT_THROW(run_verification(c), ConfigError);
  c = catalog_run("euclidean", {"COMM"});
  c.spec_path = "/nonexistent.json";
  EXPECT_THROW(run_verification(c), ConfigError);
  c.catalog.reset();
  EXPECT_THROW(run_verification(c), ConfigError);
}

TEST(Report, ToleranceOverrides) {
  RunConfig c;
  parse_tol_classes("A=1e-30, c=2e-4", c);
  EXPECT_EQ(c.tol_values[0], 1e-30);
  EXPECT_FALSE(c.tol_values[1].has_value());
  EXPECT_EQ(c.tol_values[2], 2e-4);
  EXPECT_THROW(parse_tol_classes("D=1", c), ConfigError);
  EXPECT_THROW(parse_tol_classes("A=-1", c), ConfigError);
  EXPECT_THROW(parse_tol_classes("A=x", c), ConfigError);

  RunConfig run = catalog_run("random", {"COMM"});
  run.params.dim = 3;
  run.tol_values = c.tol_values;
  const auto rep = run_verification(run);
  const ReportRow* r = row(rep, "COMM.hessian_symmetry");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->tol, 1e-30);
  EXPECT_EQ(r->status, r->max_residual < 1e-30 ? CheckStatus::Pass : CheckStatus::Fail);
  EXPECT_EQ(row(rep, "COMM.bach_divergence")->tol, 2e-4);
}

TEST(Report, JsonRoundTripsAndIsDeterministic) {
  RunConfig c = catalog_run("sphere", {"SOL", "CE"});
  c.laws = {"CONF"};
  const auto a = run_verification(c), b = run_verification(c);
  EXPECT_EQ(report_to_json(a, false), report_to_json(b, false));
  const auto back = report_from_json(report_to_json(a));
  EXPECT_EQ(back, a);
  EXPECT_EQ(report_to_json(back), report_to_json(a));

  const auto j = nlohmann::json::parse(report_to_json(a));
  EXPECT_EQ(j["overall"], "pass");
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_FALSE(nlohmann::json::parse(report_to_json(a, false)).contains("timestamp"));
  for (const auto& r : j["rows"])
    for (const char* key : {"id", "family", "paper_eq", "anchor", "max_residual", "tol", "status"})
      EXPECT_TRUE(r.contains(key)) << key;
  EXPECT_THROW(report_from_json("{}"), ParseError);
}

TEST(Report, OverallFailsOnFailure) {
  VerificationReport r;
  r.rows.resize(2);
  r.rows[0].status = CheckStatus::Pass;
  r.rows[1].status = CheckStatus::Skipped;
  EXPECT_TRUE(r.passed());
  r.rows[1].status = CheckStatus::Error;
  EXPECT_FALSE(r.passed());
  r.rows[1].status = CheckStatus::Fail;
  EXPECT_FALSE(r.passed());
  EXPECT_NE(render_table(r).find("FAIL"), std::string::npos);
}

TEST(Report, SpecFilesAreCertifiedFromTheirIngredients) {
  CatalogParams p;
  p.dim = 4;
  GeometrySpec s = build_entry("cigar_x_line", p).spec;
  const std::string path = testing::TempDir() + "ctl_cigar.json";
  {
    std::ofstream out(path);
    out << spec_to_json(s);
  }
  RunConfig c;
  c.spec_path = path;
  c.suites = {"SOL", "HIGH"};
  c.points = 2;
  const auto rep = run_verification(c);
  EXPECT_EQ(rep.certified, (std::vector<std::string>{"gradient_soliton"}));
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(row(rep, "HIGH.fourth_bach")->status, CheckStatus::Pass);

  // A wrong constant leaves the structure uncertified, so its rows skip.
  s.lambda = 0.5;
  {
    std::ofstream out(path);
    out << spec_to_json(s);
  }
  const auto rep2 = run_verification(c);
  EXPECT_TRUE(rep2.certified.empty());
  EXPECT_EQ(row(rep2, "SOL.first")->status, CheckStatus::Skipped);
  std::remove(path.c_str());
}

TEST(Eval, KnownValues) {
  CatalogParams p;
  p.dim = 3;
  const GeometryInstance sphere(build_entry("sphere", p).spec);
  const std::vector<double> origin(3, 0.0);
  EXPECT_EQ(format_components(eval_quantity(sphere, "scalar", origin)), "6.000000000000\n");

  p.dim = 4;
  p.seed = 2;
  const GeometryInstance rnd(build_entry("random", p).spec);
  const std::vector<double> x{0.1, -0.2, 0.3, 0.05};
  const Tensor tr = eval_quantity(rnd, "cotton_trace", x);
  EXPECT_EQ(tr.rank(), 1);
  EXPECT_LT(max_abs(tr), 1e-9);
  EXPECT_THROW(eval_quantity(rnd, "torsion", x), ConfigError);
  EXPECT_THROW(eval_quantity(rnd, "scalar", std::vector<double>{5, 0, 0, 0}), DomainError);
}

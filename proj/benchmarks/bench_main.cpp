#include <benchmark/benchmark.h>

#include "ctl/catalog.hpp"
#include "ctl/conformal.hpp"
#include "ctl/curvature.hpp"
#include "ctl/expr.hpp"
#include "ctl/identities.hpp"

namespace {

ctl::Jet random_jet(int m, int order, double seed) {
  ctl::Jet j(m, order);
  auto c = j.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::sin(seed + 0.37 * static_cast<double>(k));
  return j;
}

ctl::GeometrySpec random_spec(int m) {
  ctl::CatalogParams p;
  p.dim = m;
  p.seed = 1;
  return ctl::build_entry("random", p).spec;
}

void BM_JetProduct(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0)), order = static_cast<int>(st.range(1));
  const ctl::Jet a = random_jet(m, order, 0.1), b = random_jet(m, order, 0.7);
  for (auto _ : st) {
    ctl::Jet c = a;
    c *= b;
    benchmark::DoNotOptimize(c.coeffs().data());
  }
}
BENCHMARK(BM_JetProduct)->Args({3, 6})->Args({4, 6})->Args({5, 6})->Args({6, 4});

void BM_ExprJet(benchmark::State& st) {
  const auto spec = random_spec(4);
  const ctl::Expr e = ctl::parse_expr(spec.metric[0][1], spec.coords);
  const std::vector<double> p{0.1, 0.2, -0.1, 0.3};
  for (auto _ : st) benchmark::DoNotOptimize(ctl::eval_expr_jet(e, p, 6).value());
}
BENCHMARK(BM_ExprJet);

/// Everything up to Bach and its second derivatives at one point.
void BM_CurvatureStack(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  const ctl::GeometryInstance g(random_spec(m));
  const std::vector<double> p(m, 0.1);
  for (auto _ : st) {
    ctl::CurvatureBundle b(g, p);
    benchmark::DoNotOptimize(b.value(ctl::Quantity::Bach, 2).data().data());
  }
}
BENCHMARK(BM_CurvatureStack)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_CommutationFamily(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  const ctl::GeometryInstance g(random_spec(m));
  const auto recs = ctl::select_identities("COMM");
  const auto pts = ctl::sample_points(g.spec(), 1, 3);
  ctl::VerifyOptions o;
  o.threads = 1;
  for (auto _ : st) benchmark::DoNotOptimize(ctl::verify_identities(g, recs, pts, o).size());
}
BENCHMARK(BM_CommutationFamily)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ConformalLaws(benchmark::State& st) {
  ctl::CatalogParams p;
  p.seed = 2;
  const ctl::CatalogEntry e = ctl::load_entry("conformal_gaussian", p);
  const ctl::ConformalPair pair = ctl::rescale(ctl::GeometryInstance(e.spec));
  const auto pts = ctl::sample_points(e.spec, 1, 3);
  const auto opts = ctl::verify_options(e);
  for (auto _ : st)
    for (const auto& l : ctl::law_registry()) benchmark::DoNotOptimize(ctl::verify_transform(pair, l.law, pts, opts));
}
BENCHMARK(BM_ConformalLaws)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

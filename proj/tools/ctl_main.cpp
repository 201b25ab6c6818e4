#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctl/catalog.hpp"
#include "ctl/error.hpp"
#include "ctl/identities.hpp"
#include "ctl/report.hpp"

namespace {

// Exit codes: pass, identity failure, bad input, broken certification.
constexpr int kPass = 0, kFail = 1, kConfig = 2, kCertification = 3;

struct GeometryFlags {
  std::string catalog, spec;
  ctl::CatalogParams params;
  int dim = 0;

  void add(CLI::App* app) {
    auto* c = app->add_option("--catalog", catalog, "catalog entry name");
    auto* s = app->add_option("--spec", spec, "geometry spec JSON file");
    c->excludes(s);
    app->add_option("--dim", dim, "dimension of the catalog entry");
    app->add_option("--radius", params.radius, "sphere radius");
    app->add_option("--lambda", params.lambda, "soliton constant of the Gaussian entries");
    app->add_option("--degree", params.degree, "polynomial degree of random entries");
    app->add_option("--eps", params.eps, "perturbation size of random entries");
  }

  void into(ctl::RunConfig& cfg) const {
    if (catalog.empty() == spec.empty()) throw ctl::ConfigError("give exactly one of --catalog and --spec");
    if (!catalog.empty()) cfg.catalog = catalog;
    if (!spec.empty()) cfg.spec_path = spec;
    cfg.params = params;
    if (dim) cfg.params.dim = dim;
  }
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ctl::ConfigError("cannot write " + path);
  out << text;
}

ctl::OutputFormat format_from(const std::string& s) {
  if (s == "table") return ctl::OutputFormat::Table;
  if (s == "json") return ctl::OutputFormat::Json;
  throw ctl::ConfigError("format must be table or json");
}

std::string catalog_table() {
  std::string out;
  char buf[256];
  for (const auto& i : ctl::catalog_info()) {
    std::string claims;
    for (auto s : i.claims) claims += (claims.empty() ? "" : ",") + std::string(ctl::structure_name(s));
    std::snprintf(buf, sizeof buf, "%-32s dims %d-%d  claims: %s\n  %s\n", i.name.c_str(), i.min_dim, i.max_dim,
                  claims.empty() ? "none" : claims.c_str(), i.summary.c_str());
    out += buf;
  }
  return out;
}

std::string identity_table(const std::vector<const ctl::IdentityRecord*>& recs) {
  std::string out;
  char buf[512];
  for (const auto* r : recs) {
    std::snprintf(buf, sizeof buf, "%-36s %s  %s\n", r->id.c_str(), ctl::tol_class_name(r->tol_class()),
                  r->anchor.c_str());
    out += buf;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of curvature identities on local charts", "ctl"};
  app.set_version_flag("--version", std::string(ctl::tool_version()));
  app.require_subcommand(1);

  // verify
  ctl::RunConfig cfg;
  GeometryFlags vgeo;
  std::string suites, ids, laws, tol, vformat = "table", vout;
  auto* verify = app.add_subcommand("verify", "run identity families and transformation laws");
  vgeo.add(verify);
  verify->add_option("--suite", suites, "families, comma separated (CONF selects the laws)");
  verify->add_option("--id", ids, "identity or law ids, comma separated");
  verify->add_option("--law", laws, "law ids or labels, comma separated");
  verify->add_option("--points", cfg.points, "sample points")->check(CLI::PositiveNumber);
  verify->add_option("--seed", cfg.seed, "seed for sample points and random entries");
  auto* jet = verify->add_option("--jet-order", cfg.jet_order, "truncation order (default CTL_JET_ORDER or 6)");
  verify->add_option("--tol-class", tol, "tolerance overrides, e.g. A=1e-9,B=1e-7,C=1e-5");
  verify->add_option("--format", vformat, "table or json");
  verify->add_option("--out", vout, "write the report here");

  // eval
  GeometryFlags egeo;
  std::string quantity, point, eout;
  int derivs = 0, eseed = 0;
  auto* eval = app.add_subcommand("eval", "print frame components of a quantity at a point");
  egeo.add(eval);
  eval->add_option("--seed", eseed, "seed of random entries");
  eval->add_option("quantity", quantity, "riemann, ricci, scalar, weyl, cotton, cotton_trace, bach, ...")->required();
  eval->add_option("--point", point, "comma separated coordinates (default: box centre)");
  eval->add_option("--derivs", derivs, "frame derivatives");
  eval->add_option("--out", eout, "write here");

  // catalog
  auto* catalog = app.add_subcommand("catalog", "built-in certified geometries");
  catalog->require_subcommand(1);
  std::string cformat = "table";
  auto* clist = catalog->add_subcommand("list", "names and claims");
  clist->add_option("--format", cformat, "table or json");
  GeometryFlags xgeo;
  std::string xname, xout;
  int xseed = 0;
  auto* cexport = catalog->add_subcommand("export", "write an entry as a geometry spec");
  cexport->add_option("name", xname, "entry")->required();
  cexport->add_option("--dim", xgeo.dim, "dimension");
  cexport->add_option("--radius", xgeo.params.radius, "sphere radius");
  cexport->add_option("--lambda", xgeo.params.lambda, "soliton constant");
  cexport->add_option("--degree", xgeo.params.degree, "random degree");
  cexport->add_option("--eps", xgeo.params.eps, "random perturbation size");
  cexport->add_option("--seed", xseed, "seed of random entries");
  cexport->add_option("--out", xout, "write here");

  // identities
  auto* idents = app.add_subcommand("identities", "identity registry");
  idents->require_subcommand(1);
  std::string family, iformat = "table";
  auto* ilist = idents->add_subcommand("list", "registered identities");
  ilist->add_option("--family", family, "restrict to one family");
  ilist->add_option("--format", iformat, "table or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }

  try {
    if (*verify) {
      if (!*jet) cfg.jet_order = ctl::default_run_config().jet_order;
      vgeo.into(cfg);
      cfg.params.seed = cfg.seed;
      cfg.suites = split(suites);
      cfg.ids = split(ids);
      cfg.laws = split(laws);
      if (!tol.empty()) ctl::parse_tol_classes(tol, cfg);
      cfg.format = format_from(vformat);
      if (!vout.empty()) cfg.out = vout;
      const ctl::VerificationReport rep = ctl::run_verification(cfg);
      emit(cfg.format == ctl::OutputFormat::Json ? ctl::report_to_json(rep) : ctl::render_table(rep), vout);
      return rep.passed() ? kPass : kFail;
    }
    if (*eval) {
      ctl::RunConfig ec;
      egeo.into(ec);
      ec.params.seed = static_cast<std::uint64_t>(eseed);
      const ctl::GeometrySpec spec = ctl::load_geometry(ec);
      std::vector<double> p;
      if (point.empty()) {
        for (const auto& [lo, hi] : spec.domain) p.push_back(0.5 * (lo + hi));
      } else {
        for (const auto& s : split(point)) p.push_back(std::stod(s));
      }
      if (static_cast<int>(p.size()) != spec.dim)
        throw ctl::ConfigError("point needs " + std::to_string(spec.dim) + " coordinates");
      const ctl::GeometryInstance g(spec, ctl::JetConfig{std::min(ctl::kMaxJetOrder, derivs + 4)});
      emit(ctl::format_components(ctl::eval_quantity(g, quantity, p, derivs)), eout);
      return kPass;
    }
    if (*clist) {
      emit(format_from(cformat) == ctl::OutputFormat::Json ? ctl::catalog_json() + "\n" : catalog_table(), "");
      return kPass;
    }
    if (*cexport) {
      ctl::CatalogParams p = xgeo.params;
      if (xgeo.dim) p.dim = xgeo.dim;
      p.seed = static_cast<std::uint64_t>(xseed);
      emit(ctl::spec_to_json(ctl::load_entry(xname, p).spec) + "\n", xout);
      return kPass;
    }
    if (*ilist) {
      ctl::IdentityFilter f;
      if (!family.empty()) {
        f.family = ctl::family_from_name(family);
        if (!f.family) throw ctl::ConfigError("unknown family: " + family);
      }
      const auto recs = ctl::list_identities(f);
      emit(format_from(iformat) == ctl::OutputFormat::Json ? ctl::registry_json(recs) + "\n" : identity_table(recs),
           "");
      return kPass;
    }
  } catch (const ctl::CertificationError& e) {
    std::fprintf(stderr, "ctl: certification failed: %s\n", e.what());
    return kCertification;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ctl: %s\n", e.what());
    return kConfig;
  }
  return kConfig;
}

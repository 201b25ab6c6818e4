#include "ctl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ctl/error.hpp"
#include "ctl/identities.hpp"

#ifndef CTL_VERSION
#define CTL_VERSION "0.0.0"
#endif

namespace ctl {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kLawFamily = "CONF";

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Selection {
  std::vector<const IdentityRecord*> records;
  std::vector<Law> laws;
};

Selection select(const RunConfig& cfg) {
  std::vector<bool> rec_on(identity_registry().size(), false), law_on(law_registry().size(), false);
  auto add_record = [&](const IdentityRecord* r) { rec_on[r - identity_registry().data()] = true; };
  auto add_law = [&](Law l) {
    for (std::size_t k = 0; k < law_registry().size(); ++k)
      if (law_registry()[k].law == l) law_on[k] = true;
  };
  auto all_laws = [&] { std::fill(law_on.begin(), law_on.end(), true); };

  auto law_by_name = [](std::string s) -> std::optional<Law> {
    if (s.rfind(kLawFamily, 0) == 0 && s.size() > 4 && s[4] == '.') s = s.substr(5);
    if (auto l = law_from_id(s)) return l;
    for (const auto& info : law_registry())
      if (s == info.label) return info.law;
    return std::nullopt;
  };

  const bool everything = cfg.suites.empty() && cfg.ids.empty() && cfg.laws.empty();
  if (everything) {
    std::fill(rec_on.begin(), rec_on.end(), true);
    all_laws();
  }
  for (const auto& s : cfg.suites) {
    if (s == kLawFamily) {
      all_laws();
      continue;
    }
    const auto fam = family_from_name(s);
    if (!fam) throw ConfigError("unknown suite: " + s);
    for (const auto* r : list_identities({.family = fam, .requires_ingredient = {}, .excludes_ingredient = {}}))
      add_record(r);
  }
  for (const auto& id : cfg.ids) {
    if (const auto* r = find_identity(id)) {
      add_record(r);
    } else if (auto l = law_by_name(id)) {
      add_law(*l);
    } else {
      throw ConfigError("unknown identity: " + id);
    }
  }
  for (const auto& id : cfg.laws) {
    if (id == kLawFamily) {
      all_laws();
      continue;
    }
    const auto l = law_by_name(id);
    if (!l) throw ConfigError("unknown law: " + id);
    add_law(*l);
  }

  Selection sel;
  for (std::size_t k = 0; k < rec_on.size(); ++k)
    if (rec_on[k]) sel.records.push_back(&identity_registry()[k]);
  for (std::size_t k = 0; k < law_on.size(); ++k)
    if (law_on[k]) sel.laws.push_back(law_registry()[k].law);
  return sel;
}

/// Structures whose ingredients a spec file carries.
std::vector<Structure> candidate_structures(const GeometrySpec& s) {
  std::vector<Structure> out;
  if (!s.lambda) return out;
  out.push_back(Structure::Einstein);
  if (s.f) out.push_back(Structure::GradientSoliton);
  if (s.X) out.push_back(Structure::GenericSoliton);
  if (s.u) {
    out.push_back(Structure::ConformallyEinstein);
    if (s.f) out.push_back(Structure::ConformalGradientSoliton);
    if (s.X) out.push_back(Structure::ConformalGenericSoliton);
  }
  return out;
}

ReportRow to_row(const CheckResult& r, std::string family, std::string anchor) {
  ReportRow row;
  row.id = r.id;
  row.family = std::move(family);
  row.paper_eq = r.label;
  row.anchor = std::move(anchor);
  row.max_residual = r.points > 0 ? r.max_residual : 0.0;
  row.tol = r.tolerance;
  row.tol_class = r.tol_class;
  row.status = r.status;
  row.reason = r.reason;
  row.points = r.points;
  row.worst_point = r.worst_point;
  return row;
}

void apply_tolerances(ReportRow& row, const RunConfig& cfg) {
  const auto& v = cfg.tol_values[static_cast<int>(row.tol_class)];
  if (!v) return;
  row.tol = *v;
  if (row.status == CheckStatus::Pass || row.status == CheckStatus::Fail)
    row.status = row.max_residual < row.tol ? CheckStatus::Pass : CheckStatus::Fail;
}

CheckStatus status_from_name(const std::string& s) {
  for (auto st : {CheckStatus::Pass, CheckStatus::Fail, CheckStatus::Skipped, CheckStatus::Error})
    if (s == status_name(st)) return st;
  throw ParseError(0, "unknown status: " + s);
}


}  // namespace

const char* tool_version() { return CTL_VERSION; }

RunConfig default_run_config() {
  RunConfig c;
  c.jet_order = JetConfig::from_env().order;
  return c;
}

void parse_tol_classes(const std::string& text, RunConfig& cfg) {
  for (const auto& item : split(text)) {
    const auto eq = item.find('=');
    const auto cls = eq == std::string::npos ? std::nullopt : tol_class_from_name(item.substr(0, eq));
    if (!cls) throw ConfigError("bad tolerance override '" + item + "', expected CLASS=VALUE");
    const std::string v = item.substr(eq + 1);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !(x > 0) || !std::isfinite(x))
      throw ConfigError("tolerance must be a positive number: " + item);
    cfg.tol_values[static_cast<int>(*cls)] = x;
  }
}

bool VerificationReport::passed() const { return count(CheckStatus::Fail) == 0 && count(CheckStatus::Error) == 0; }

int VerificationReport::count(CheckStatus s) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const ReportRow& r) { return r.status == s; }));
}

GeometrySpec load_geometry(const RunConfig& cfg) {
  if (cfg.catalog.has_value() == cfg.spec_path.has_value())
    throw ConfigError("give exactly one of --catalog and --spec");
  if (cfg.catalog) return load_entry(*cfg.catalog, cfg.params).spec;
  return spec_from_json(read_file(*cfg.spec_path));
}

VerificationReport run_verification(const RunConfig& cfg) {
  if (cfg.points < 1) throw ConfigError("point count must be at least 1");
  if (cfg.jet_order < 2 || cfg.jet_order > kMaxJetOrder)
    throw ConfigError("jet order must be in [2, " + std::to_string(kMaxJetOrder) + "]");
  if (cfg.catalog.has_value() == cfg.spec_path.has_value())
    throw ConfigError("give exactly one of --catalog and --spec");
  const Selection sel = select(cfg);

  VerificationReport rep;
  rep.version = tool_version();
  rep.timestamp = utc_now();
  rep.jet_order = cfg.jet_order;
  rep.seed = cfg.seed;
  rep.points = cfg.points;

  GeometrySpec spec;
  VerifyOptions opts;
  std::vector<std::vector<double>> pts;
  if (cfg.catalog) {
    const CatalogEntry e = load_entry(*cfg.catalog, cfg.params);
    spec = e.spec;
    opts = verify_options(e);
    rep.source = "catalog:" + *cfg.catalog;
    pts = sample_points(spec, cfg.points, cfg.seed);
  } else {
    spec = spec_from_json(read_file(*cfg.spec_path));
    rep.source = "file:" + *cfg.spec_path;
    pts = sample_points(spec, cfg.points, cfg.seed);
    const GeometryInstance low(spec, JetConfig{2});
    for (Structure s : candidate_structures(spec))
      if (certification_residual(low, s, pts) < kCertifyTolerance) opts.certified.push_back(s);
  }
  for (Structure s : opts.certified) rep.certified.push_back(structure_name(s));

  const GeometryInstance g(spec, JetConfig{cfg.jet_order});
  rep.geometry = g.name();
  rep.geometry_hash = g.id();
  rep.dim = g.dim();

  for (const auto& r : verify_identities(g, sel.records, pts, opts)) {
    const IdentityRecord* rec = find_identity(r.id);
    rep.rows.push_back(to_row(r, family_name(rec->family), rec->anchor));
  }
  std::optional<ConformalPair> pair;
  if (!sel.laws.empty() && g.has_u()) pair = rescale(g);
  for (Law l : sel.laws) {
    const LawInfo& info = law_info(l);
    const std::string anchor = "weight e^{" + std::to_string(info.exponent) + "u}";
    if (!pair) {
      CheckResult r;
      r.id = std::string(kLawFamily) + "." + info.id;
      r.label = info.label;
      r.tol_class = tol_class_for(info.derivs);
      r.tolerance = tolerance(r.tol_class);
      r.reason = "no u";
      rep.rows.push_back(to_row(r, kLawFamily, anchor));
      continue;
    }
    rep.rows.push_back(to_row(verify_transform(*pair, l, pts, opts), kLawFamily, anchor));
  }
  for (auto& row : rep.rows) apply_tolerances(row, cfg);
  return rep;
}

std::string report_to_json(const VerificationReport& r, bool with_timestamp) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json wp = json::array();
    for (double x : row.worst_point) wp.push_back(x);
    rows.push_back({{"id", row.id},
                    {"family", row.family},
                    {"paper_eq", row.paper_eq},
                    {"anchor", row.anchor},
                    {"max_residual", row.points > 0 ? json(row.max_residual) : json(nullptr)},
                    {"tol", row.tol},
                    {"tol_class", tol_class_name(row.tol_class)},
                    {"status", status_name(row.status)},
                    {"reason", row.reason},
                    {"points", row.points},
                    {"worst_point", wp}});
  }
  json j;
  j["tool"] = "ctl";
  j["version"] = r.version;
  if (with_timestamp) j["timestamp"] = r.timestamp;
  j["geometry"] = {{"name", r.geometry}, {"hash", r.geometry_hash}, {"dim", r.dim}, {"source", r.source}};
  j["jet_order"] = r.jet_order;
  j["seed"] = r.seed;
  j["points"] = r.points;
  j["certified"] = r.certified;
  j["rows"] = rows;
  j["summary"] = {{"pass", r.count(CheckStatus::Pass)},
                  {"fail", r.count(CheckStatus::Fail)},
                  {"skipped", r.count(CheckStatus::Skipped)},
                  {"error", r.count(CheckStatus::Error)}};
  j["overall"] = r.passed() ? "pass" : "fail";
  return j.dump(2) + "\n";
}

VerificationReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    VerificationReport r;
    r.version = j.at("version").get<std::string>();
    r.timestamp = j.value("timestamp", "");
    const json& geo = j.at("geometry");
    r.geometry = geo.at("name").get<std::string>();
    r.geometry_hash = geo.at("hash").get<std::string>();
    r.dim = geo.at("dim").get<int>();
    r.source = geo.at("source").get<std::string>();
    r.jet_order = j.at("jet_order").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.points = j.at("points").get<int>();
    r.certified = j.at("certified").get<std::vector<std::string>>();
    for (const json& x : j.at("rows")) {
      ReportRow row;
      row.id = x.at("id").get<std::string>();
      row.family = x.at("family").get<std::string>();
      row.paper_eq = x.at("paper_eq").get<std::string>();
      row.anchor = x.at("anchor").get<std::string>();
      const json& mr = x.at("max_residual");
      row.max_residual = mr.is_null() ? 0.0 : mr.get<double>();
      row.tol = x.at("tol").get<double>();
      const auto cls = tol_class_from_name(x.at("tol_class").get<std::string>());
      if (!cls) throw ParseError(0, "bad tol_class");
      row.tol_class = *cls;
      row.status = status_from_name(x.at("status").get<std::string>());
      row.reason = x.at("reason").get<std::string>();
      row.points = x.at("points").get<int>();
      row.worst_point = x.at("worst_point").get<std::vector<double>>();
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("bad report: ") + e.what());
  }
}

std::string render_table(const VerificationReport& r) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "geometry %s (dim %d, %s, hash %s)\n", r.geometry.c_str(), r.dim, r.source.c_str(),
                r.geometry_hash.c_str());
  out += buf;
  std::string cert;
  for (const auto& c : r.certified) cert += (cert.empty() ? "" : ", ") + c;
  std::snprintf(buf, sizeof buf, "jet order %d, %d points, seed %llu, certified: %s\n\n", r.jet_order, r.points,
                static_cast<unsigned long long>(r.seed), cert.empty() ? "none" : cert.c_str());
  out += buf;

  std::size_t w = 2;
  for (const auto& row : r.rows) w = std::max(w, row.id.size());
  std::snprintf(buf, sizeof buf, "%-*s  %-7s  %-11s  %-9s  %s\n", static_cast<int>(w), "id", "status", "residual",
                "tol", "note");
  out += buf;
  for (const auto& row : r.rows) {
    char res[32] = "-";
    if (row.points > 0) std::snprintf(res, sizeof res, "%.3e", row.max_residual);
    std::snprintf(buf, sizeof buf, "%-*s  %-7s  %-11s  %.1e %s  %s\n", static_cast<int>(w), row.id.c_str(),
                  status_name(row.status), res, row.tol, tol_class_name(row.tol_class), row.reason.c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\n%d pass, %d fail, %d skipped, %d error: %s\n", r.count(CheckStatus::Pass),
                r.count(CheckStatus::Fail), r.count(CheckStatus::Skipped), r.count(CheckStatus::Error),
                r.passed() ? "PASS" : "FAIL");
  out += buf;
  return out;
}

Tensor eval_quantity(const GeometryInstance& g, const std::string& quantity, std::span<const double> p, int derivs) {
  if (derivs < 0) throw ConfigError("derivative count must be non-negative");
  if (!g.contains(p)) throw DomainError("point outside the chart domain");
  CurvatureBundle b(g, p);
  if (quantity == "cotton_trace") {
    const Tensor& c = b.value(Quantity::Cotton, derivs);
    const int m = g.dim();
    // Contract the first two indices; the remaining ones keep their order.
    const std::size_t inner = c.size() / (static_cast<std::size_t>(m) * m);
    std::vector<double> out(inner, 0.0);
    for (int i = 0; i < m; ++i)
      for (std::size_t k = 0; k < inner; ++k) out[k] += c.data()[(static_cast<std::size_t>(i) * m + i) * inner + k];
    return Tensor(m, c.rank() - 2, out);
  }
  const auto q = quantity_from_name(quantity);
  if (!q) throw ConfigError("unknown quantity: " + quantity);
  return b.value(*q, derivs);
}

std::string format_components(const Tensor& t) {
  std::string out;
  std::vector<int> idx(t.rank());
  char buf[64];
  for (std::size_t k = 0; k < t.size(); ++k) {
    t.unflat(k, idx);
    std::string name;
    for (int i : idx) name += std::to_string(i + 1);
    double v = t.data()[k];
    if (std::abs(v) < 5e-13) v = 0;  // no "-0.000000000000"
    std::snprintf(buf, sizeof buf, "%.12f", v);
    out += (name.empty() ? std::string() : name + " ") + buf + "\n";
  }
  return out;
}

}  // namespace ctl

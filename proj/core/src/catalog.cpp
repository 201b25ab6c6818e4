#include "ctl/catalog.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <nlohmann/json.hpp>
#include <random>

#include "ctl/error.hpp"
#include "ctl/identities.hpp"

namespace ctl {

namespace {

using S = Structure;

/// Shortest text that reads back as the same double.
std::string num(double v) {
  char buf[32];
  for (int digits = 6; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string xi(int i) { return "x" + std::to_string(i + 1); }

/// x_a^2 + ... over coordinates [from, to).
std::string radius2(int from, int to) {
  std::string r;
  for (int i = from; i < to; ++i) r += (r.empty() ? "" : " + ") + xi(i) + "^2";
  return r;
}

GeometrySpec flat(const std::string& name, int m, double half = 1.0) {
  GeometrySpec s;
  s.name = name;
  s.dim = m;
  s.coords = default_coords(m);
  s.domain.assign(m, {-half, half});
  s.metric.assign(m, std::vector<std::string>(m, "0"));
  for (int i = 0; i < m; ++i) s.metric[i][i] = "1";
  return s;
}

void scale_diagonal(GeometrySpec& s, const std::string& factor, int from = 0, int to = -1) {
  if (to < 0) to = s.dim;
  for (int i = from; i < to; ++i)
    s.metric[i][i] = s.metric[i][i] == "1" ? factor : "(" + factor + ")*(" + s.metric[i][i] + ")";
}

/// Random polynomial with coefficients in [-1, 1] on monomials of degree
/// 1..degree, normalised so that its sup norm on the unit box is at most 1.
std::string random_poly(std::mt19937_64& rng, int m, int degree, double scale) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<std::pair<double, std::string>> terms;
  std::vector<int> alpha(m, 0);
  // Monomials by total degree, then lexicographically.
  for (int d = 1; d <= degree; ++d) {
    std::function<void(int, int)> rec = [&](int i, int left) {
      if (i == m - 1) {
        alpha[i] = left;
        std::string mono;
        for (int k = 0; k < m; ++k) {
          if (alpha[k] == 0) continue;
          if (!mono.empty()) mono += "*";
          mono += xi(k);
          if (alpha[k] > 1) mono += "^" + std::to_string(alpha[k]);
        }
        terms.push_back({coef(rng), mono});
        return;
      }
      for (int a = left; a >= 0; --a) {
        alpha[i] = a;
        rec(i + 1, left - a);
      }
    };
    rec(0, d);
  }
  double total = 0;
  for (const auto& t : terms) total += std::abs(t.first);
  std::string out;
  for (const auto& [c, mono] : terms) {
    const double v = std::round(c * scale / total * 1e4) / 1e4;
    if (v == 0.0) continue;
    if (out.empty())
      out = num(v) + "*" + mono;
    else
      out += (v < 0 ? " - " : " + ") + num(std::abs(v)) + "*" + mono;
  }
  return out.empty() ? "0" : out;
}

std::string random_u(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 17);
  return random_poly(rng, m, 2, 0.4);
}

/// Pulls the metric back by e^{-2u}, so that e^{2u} g is the original.
void pull_back(GeometrySpec& s, const std::string& u) {
  for (auto& row : s.metric)
    for (auto& e : row)
      if (e != "0") e = "exp(-2*(" + u + "))*(" + e + ")";
  s.u = u;
}

GeometrySpec stereographic_sphere(const std::string& name, int m, double r) {
  GeometrySpec s = flat(name, m);
  scale_diagonal(s, num(4 * r * r) + "/(1 + " + radius2(0, m) + ")^2");
  return s;
}

GeometrySpec s2xs2(const std::string& name) {
  GeometrySpec s = flat(name, 4);
  scale_diagonal(s, "4/(1 + " + radius2(0, 2) + ")^2", 0, 2);
  scale_diagonal(s, "4/(1 + " + radius2(2, 4) + ")^2", 2, 4);
  return s;
}

GeometrySpec cigar(const std::string& name, int m) {
  GeometrySpec s = flat(name, m);
  scale_diagonal(s, "1/(1 + x1^2 + x2^2)", 0, 2);
  s.f = "-log(1 + x1^2 + x2^2)";
  return s;
}

/// Gaussian expanding field lambda x plus a rotation in the (x1, x2) plane.
std::vector<std::string> gaussian_killing_field(int m, double lambda) {
  std::vector<std::string> X;
  for (int i = 0; i < m; ++i) X.push_back(num(lambda) + "*" + xi(i));
  X[0] += " - x2";
  X[1] += " + x1";
  return X;
}

GeometrySpec random_metric(const std::string& name, int m, int degree, double eps, std::uint64_t seed) {
  GeometrySpec s = flat(name, m);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const std::string q = random_poly(rng, m, degree, eps);
      s.metric[i][j] = i == j ? "1 + " + q : q;
      s.metric[j][i] = s.metric[i][j];
    }
  s.u = random_poly(rng, m, degree, 0.5);
  s.f = random_poly(rng, m, degree, 1.0);
  s.X.emplace();
  for (int i = 0; i < m; ++i) s.X->push_back(random_poly(rng, m, degree, 1.0));
  return s;
}

const std::vector<CatalogInfo> kInfo = {
    {"euclidean", "flat space with the Gaussian potential lambda |x|^2 / 2", {S::Einstein, S::GradientSoliton}, 3, 2, 6},
    {"sphere", "round sphere of radius r, stereographic chart; u flattens it", {S::Einstein, S::ConformallyEinstein}, 3, 2, 6},
    {"hyperbolic", "Poincare ball patch of curvature -1", {S::Einstein}, 3, 2, 6},
    {"s2xs2", "product of two unit spheres, Einstein with nonzero Weyl", {S::Einstein}, 4, 4, 4},
    {"conformal_s2xs2", "s2xs2 pulled back by a random factor", {S::ConformallyEinstein}, 4, 4, 4},
    {"cigar_x_line", "steady cigar soliton times a flat factor", {S::GradientSoliton}, 3, 3, 6},
    {"conformal_gaussian", "flat Gaussian soliton pulled back by a random factor", {S::ConformalGradientSoliton}, 3, 3, 6},
    {"gaussian_plus_killing", "flat space with X = lambda x plus a rotation", {S::GenericSoliton}, 3, 2, 6},
    {"conformal_gaussian_plus_killing", "gaussian_plus_killing pulled back by a random factor",
     {S::ConformalGenericSoliton}, 3, 3, 6},
    {"random", "delta + eps Q(x) with random polynomial Q, carrying random u, f and X", {}, 3, 2, 6},
};

}  // namespace

const std::vector<CatalogInfo>& catalog_info() { return kInfo; }

const CatalogInfo* find_catalog(const std::string& name) {
  for (const auto& i : kInfo)
    if (i.name == name) return &i;
  return nullptr;
}

CatalogEntry build_entry(const std::string& name, const CatalogParams& p) {
  const CatalogInfo* info = find_catalog(name);
  if (!info) throw ConfigError("unknown catalog entry: " + name);
  const int m = p.dim.value_or(info->default_dim);
  if (m < info->min_dim || m > info->max_dim)
    throw ConfigError(name + " needs dimension in [" + std::to_string(info->min_dim) + ", " +
                std::to_string(info->max_dim) + "], got " + std::to_string(m));
  if (p.radius <= 0) throw ConfigError("radius must be positive");

  CatalogEntry e;
  e.name = name;
  const double l = p.lambda;
  if (name == "euclidean") {
    e.spec = flat(name, m);
    e.spec.f = num(l / 2) + "*(" + radius2(0, m) + ")";
    e.spec.lambda = l;
    e.claims = {{S::Einstein, 0.0}, {S::GradientSoliton, l}};
    e.note = "Hess f = lambda g and Ric = 0";
  } else if (name == "sphere") {
    e.spec = stereographic_sphere(name, m, p.radius);
    e.spec.u = "-log(" + num(2 * p.radius) + "/(1 + " + radius2(0, m) + "))";
    e.spec.lambda = (m - 1) / (p.radius * p.radius);
    e.claims = {{S::Einstein, *e.spec.lambda}, {S::ConformallyEinstein, 0.0}};
    e.note = "Ric = (m-1)/r^2 g; e^{2u} g is flat";
  } else if (name == "hyperbolic") {
    // Keep the box inside the unit ball.
    e.spec = flat(name, m, 0.9 / std::sqrt(static_cast<double>(m)));
    scale_diagonal(e.spec, "4/(1 - (" + radius2(0, m) + "))^2");
    e.spec.lambda = -(m - 1.0);
    e.claims = {{S::Einstein, -(m - 1.0)}};
    e.note = "Ric = -(m-1) g";
  } else if (name == "s2xs2") {
    e.spec = s2xs2(name);
    e.spec.lambda = 1.0;
    e.claims = {{S::Einstein, 1.0}};
    e.note = "Ric = g, W != 0";
  } else if (name == "conformal_s2xs2") {
    e.spec = s2xs2(name);
    pull_back(e.spec, random_u(4, p.seed));
    e.spec.lambda = 1.0;
    e.claims = {{S::ConformallyEinstein, 1.0}};
    e.note = "e^{2u} g is s2xs2";
  } else if (name == "cigar_x_line") {
    e.spec = cigar(name, m);
    e.spec.lambda = 0.0;
    e.claims = {{S::GradientSoliton, 0.0}};
    e.note = "steady soliton, f = -log(1 + x1^2 + x2^2)";
  } else if (name == "conformal_gaussian") {
    e.spec = flat(name, m);
    pull_back(e.spec, random_u(m, p.seed));
    e.spec.f = num(l / 2) + "*(" + radius2(0, m) + ")";
    e.spec.lambda = l;
    e.claims = {{S::ConformalGradientSoliton, l}};
    e.note = "e^{2u} g is the flat Gaussian soliton";
  } else if (name == "gaussian_plus_killing") {
    e.spec = flat(name, m);
    e.spec.X = gaussian_killing_field(m, l);
    e.spec.lambda = l;
    e.claims = {{S::GenericSoliton, l}};
    e.note = "the rotation is Killing, so L_X g = L_grad f g";
  } else if (name == "conformal_gaussian_plus_killing") {
    e.spec = flat(name, m);
    pull_back(e.spec, random_u(m, p.seed));
    e.spec.X = gaussian_killing_field(m, l);
    e.spec.lambda = l;
    e.claims = {{S::ConformalGenericSoliton, l}};
    e.note = "e^{2u} g is gaussian_plus_killing";
  } else {  // random
    if (p.degree < 1 || p.degree > 4) throw ConfigError("random needs degree in [1, 4]");
    if (!(p.eps > 0 && p.eps * m < 1)) throw ConfigError("random needs 0 < eps < 1/m");
    e.spec = random_metric(name, m, p.degree, p.eps, p.seed);
    e.note = "for unconditional identities";
  }
  return e;
}

std::vector<std::vector<double>> sample_points(const GeometrySpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("point count must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> out(n, std::vector<double>(spec.dim));
  for (auto& p : out)
    for (int i = 0; i < spec.dim; ++i) {
      const auto [lo, hi] = spec.domain[i];
      const double pad = 0.1 * (hi - lo) / 2;
      p[i] = lo + pad + (hi - lo - 2 * pad) * unit(rng);
    }
  return out;
}

namespace {

/// Fixed certification grid: the box centre plus seeded samples.
std::vector<std::vector<double>> certification_grid(const GeometrySpec& spec) {
  auto pts = sample_points(spec, 6, 0x5eed);
  std::vector<double> centre(spec.dim);
  for (int i = 0; i < spec.dim; ++i) centre[i] = 0.5 * (spec.domain[i].first + spec.domain[i].second);
  pts.insert(pts.begin(), centre);
  return pts;
}

/// Corners and midpoints of the box, 3^m points.
std::vector<std::vector<double>> box_lattice(const GeometrySpec& spec) {
  std::vector<std::vector<double>> out;
  const int m = spec.dim;
  int total = 1;
  for (int i = 0; i < m; ++i) total *= 3;
  for (int k = 0; k < total; ++k) {
    std::vector<double> p(m);
    int r = k;
    for (int i = 0; i < m; ++i, r /= 3) {
      const auto [lo, hi] = spec.domain[i];
      p[i] = lo + 0.5 * (r % 3) * (hi - lo);
    }
    out.push_back(std::move(p));
  }
  return out;
}

double killing_residual(const GeometryInstance& g, const std::vector<std::vector<double>>& pts, double lambda) {
  const int m = g.dim();
  std::vector<Expr> grad;
  for (int i = 0; i < m; ++i) grad.push_back(parse_expr(num(lambda) + "*" + xi(i), g.spec().coords));
  double worst = 0;
  for (const auto& p : pts) {
    const Tensor a = lie_derivative_metric(g, g.X(), p).components;
    const Tensor b = lie_derivative_metric(g, grad, p).components;
    worst = std::max(worst, max_abs(a - b));
  }
  return worst;
}

}  // namespace

std::vector<ClaimCheck> certify_entry(const CatalogEntry& entry) {
  const GeometryInstance g(entry.spec, JetConfig{2});
  const auto grid = certification_grid(entry.spec);
  std::vector<ClaimCheck> out;
  for (const Claim& c : entry.claims) {
    ClaimCheck k{c, certification_residual(g, c.structure, grid, c.lambda), false};
    k.certified = k.residual < kCertifyTolerance;
    out.push_back(k);
  }
  if (entry.name == "gaussian_plus_killing") {
    // Only the symmetric part of nabla X enters, and the rotation drops out.
    const double r = killing_residual(g, grid, *entry.spec.lambda);
    if (!(r < 1e-11)) throw CertificationError(entry.name + ": rotation is not Killing, residual " + std::to_string(r));
  }
  if (entry.name == "random") {
    for (const auto& p : box_lattice(entry.spec)) {
      try {
        LocalGeometry lg(g, p);
      } catch (const GeometryError&) {
        throw CertificationError(entry.name + ": metric not positive definite on the grid");
      }
    }
  }
  return out;
}

CatalogEntry load_entry(const std::string& name, const CatalogParams& params) {
  CatalogEntry e = build_entry(name, params);
  for (const auto& k : certify_entry(e))
    if (!k.certified)
      throw CertificationError(name + ": claim " + structure_name(k.claim.structure) + " fails certification, residual " +
                               std::to_string(k.residual));
  return e;
}

VerifyOptions verify_options(const CatalogEntry& entry) {
  VerifyOptions o;
  for (const Claim& c : entry.claims) {
    o.certified.push_back(c.structure);
    o.lambdas.emplace_back(c.structure, c.lambda);
  }
  return o;
}

std::string catalog_json() {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& i : kInfo) {
    nlohmann::ordered_json claims = nlohmann::ordered_json::array();
    for (S s : i.claims) claims.push_back(structure_name(s));
    list.push_back({{"name", i.name},
                    {"summary", i.summary},
                    {"claims", claims},
                    {"default_dim", i.default_dim},
                    {"dims", {i.min_dim, i.max_dim}}});
  }
  return list.dump(2);
}

}  // namespace ctl

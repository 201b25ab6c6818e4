#include "ctl/geometry.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <nlohmann/json.hpp>

#include "ctl/error.hpp"

namespace ctl {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> default_coords(int dim) {
  std::vector<std::string> c;
  for (int i = 0; i < dim; ++i) c.push_back("x" + std::to_string(i + 1));
  return c;
}

namespace {

std::string entry_text(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw GeometryError(where + ": expected an expression string or a number");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void validate(const GeometrySpec& s) {
  if (s.dim < 2 || s.dim > kMaxJetDim)
    throw GeometryError("dim must lie in [2, " + std::to_string(kMaxJetDim) + "]");
  if (static_cast<int>(s.coords.size()) != s.dim) throw GeometryError("coords must list dim names");
  if (static_cast<int>(s.domain.size()) != s.dim) throw GeometryError("domain must list dim intervals");
  for (const auto& [lo, hi] : s.domain)
    if (!(lo < hi)) throw GeometryError("domain interval must satisfy lo < hi");
  if (static_cast<int>(s.metric.size()) != s.dim) throw GeometryError("metric must have dim rows");
  for (const auto& row : s.metric)
    if (static_cast<int>(row.size()) != s.dim) throw GeometryError("metric rows must have dim entries");
  if (s.X && static_cast<int>(s.X->size()) != s.dim) throw GeometryError("X must have dim components");
  for (std::size_t i = 0; i < s.coords.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (s.coords[i] == s.coords[j]) throw GeometryError("duplicate coordinate name " + s.coords[i]);
}

Expr parse_field(const std::string& text, const std::vector<std::string>& coords, const std::string& where) {
  try {
    return parse_expr(text, coords);
  } catch (const ParseError& e) {
    throw ParseError(e.offset(), where + ": " + e.what());
  }
}

}  // namespace

GeometrySpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw GeometryError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw GeometryError("geometry spec must be a JSON object");
  GeometrySpec s;
  try {
    s.name = j.value("name", std::string("unnamed"));
    if (!j.contains("dim")) throw GeometryError("missing field: dim");
    s.dim = j.at("dim").get<int>();
    if (s.dim < 2 || s.dim > kMaxJetDim)
      throw GeometryError("dim must lie in [2, " + std::to_string(kMaxJetDim) + "]");
    s.coords = j.contains("coords") ? j.at("coords").get<std::vector<std::string>>() : default_coords(s.dim);
    if (j.contains("domain")) {
      for (const auto& iv : j.at("domain")) {
        if (!iv.is_array() || iv.size() != 2) throw GeometryError("domain entries must be [lo, hi]");
        s.domain.emplace_back(iv[0].get<double>(), iv[1].get<double>());
      }
    } else {
      s.domain.assign(s.dim, {-1.0, 1.0});
    }
    if (!j.contains("metric")) throw GeometryError("missing field: metric");
    const auto& mj = j.at("metric");
    if (!mj.is_array() || static_cast<int>(mj.size()) != s.dim)
      throw GeometryError("metric must have dim rows");
    s.metric.assign(s.dim, std::vector<std::string>(s.dim));
    // A full matrix or its lower triangle, decided by the first row.
    const bool full = mj[0].is_array() && static_cast<int>(mj[0].size()) == s.dim;
    for (int i = 0; i < s.dim; ++i) {
      if (!mj[i].is_array()) throw GeometryError("metric rows must be arrays");
      if (static_cast<int>(mj[i].size()) != (full ? s.dim : i + 1))
        throw GeometryError("metric row " + std::to_string(i) + " has wrong length");
    }
    for (int i = 0; i < s.dim; ++i)
      for (int k = 0; k <= i; ++k) {
        const std::string t = entry_text(mj[i][k], "metric[" + std::to_string(i) + "][" + std::to_string(k) + "]");
        s.metric[i][k] = t;
        s.metric[k][i] = t;
      }
    if (full) {
      // The upper triangle must agree with the lower one.
      for (int i = 0; i < s.dim; ++i)
        for (int k = i + 1; k < s.dim; ++k) {
          const std::string up = entry_text(mj[i][k], "metric");
          const auto a = parse_field(up, s.coords, "metric[" + std::to_string(i) + "][" + std::to_string(k) + "]");
          const auto b = parse_field(s.metric[i][k], s.coords, "metric");
          if (!structurally_equal(a, b)) throw GeometryError("metric is not symmetric");
        }
    }
    if (j.contains("u") && !j.at("u").is_null()) s.u = entry_text(j.at("u"), "u");
    if (j.contains("f") && !j.at("f").is_null()) s.f = entry_text(j.at("f"), "f");
    if (j.contains("X") && !j.at("X").is_null()) {
      std::vector<std::string> x;
      for (const auto& v : j.at("X")) x.push_back(entry_text(v, "X"));
      s.X = x;
    }
    if (j.contains("lambda") && !j.at("lambda").is_null()) s.lambda = j.at("lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw GeometryError(std::string("malformed geometry spec: ") + e.what());
  }
  validate(s);
  return s;
}

std::string spec_to_json(const GeometrySpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["dim"] = s.dim;
  j["coords"] = s.coords;
  ordered_json dom = ordered_json::array();
  for (const auto& [lo, hi] : s.domain) dom.push_back({lo, hi});
  j["domain"] = dom;
  ordered_json met = ordered_json::array();
  for (int i = 0; i < s.dim; ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k <= i; ++k) row.push_back(s.metric[i][k]);
    met.push_back(row);
  }
  j["metric"] = met;
  if (s.u) j["u"] = *s.u;
  if (s.f) j["f"] = *s.f;
  if (s.X) j["X"] = *s.X;
  if (s.lambda) j["lambda"] = *s.lambda;
  return j.dump(2);
}

JetConfig JetConfig::from_env() {
  JetConfig c;
  if (const char* v = std::getenv("CTL_JET_ORDER")) {
    char* end = nullptr;
    const long k = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || k < 2 || k > kMaxJetOrder)
      throw ConfigError("CTL_JET_ORDER must be an integer in [2, " + std::to_string(kMaxJetOrder) + "]");
    c.order = static_cast<int>(k);
  }
  return c;
}

// ---------------------------------------------------------------------------

GeometryInstance::GeometryInstance(GeometrySpec spec, JetConfig cfg) : spec_(std::move(spec)), cfg_(cfg) {
  validate(spec_);
  if (cfg_.order < 1 || cfg_.order > kMaxJetOrder)
    throw ConfigError("jet order must lie in [1, " + std::to_string(kMaxJetOrder) + "]");
  const int m = spec_.dim;
  metric_.resize(m * m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= i; ++k) {
      auto e = parse_field(spec_.metric[i][k], spec_.coords,
                           "metric[" + std::to_string(i) + "][" + std::to_string(k) + "]");
      metric_[i * m + k] = e;
      metric_[k * m + i] = e;
    }
  if (spec_.u) u_ = parse_field(*spec_.u, spec_.coords, "u");
  if (spec_.f) f_ = parse_field(*spec_.f, spec_.coords, "f");
  if (spec_.X)
    for (int i = 0; i < m; ++i) X_.push_back(parse_field((*spec_.X)[i], spec_.coords, "X[" + std::to_string(i) + "]"));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(spec_to_json(spec_))));
  id_ = buf;
}

bool GeometryInstance::contains(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != spec_.dim) return false;
  for (int i = 0; i < spec_.dim; ++i)
    if (!(p[i] >= spec_.domain[i].first && p[i] <= spec_.domain[i].second)) return false;
  return true;
}

GeometryInstance GeometryInstance::rescaled(const std::string& u_text) const {
  GeometrySpec s = spec_;
  s.name = spec_.name + "~";
  const std::string factor = "exp(2*(" + u_text + "))";
  for (int i = 0; i < s.dim; ++i)
    for (int k = 0; k < s.dim; ++k) {
      const auto& g = spec_.metric[i][k];
      if (g != "0") s.metric[i][k] = factor + "*(" + g + ")";
    }
  return GeometryInstance(std::move(s), cfg_);
}

GeometryInstance GeometryInstance::rescaled() const {
  if (!spec_.u) throw MissingIngredient("no u");
  return rescaled(*spec_.u);
}

GeometryInstance GeometryInstance::with_order(int order) const {
  JetConfig c = cfg_;
  c.order = order;
  return GeometryInstance(spec_, c);
}

// ---------------------------------------------------------------------------

namespace {

/// out_{.. a ..} = sum_i M(a, i) T_{.. i ..} on one slot.
JetTensor transform_slot(const JetTensor& T, const JetTensor& M, int slot) {
  const int m = T.dim();
  const int n = T.rank();
  const int ro = std::min(order_of(T), order_of(M));
  JetTensor out(m, n, Jet(m, ro));
  std::size_t stride = 1;
  for (int s = n - 1; s > slot; --s) stride *= m;
  std::vector<int> idx(n);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.unflat(k, idx);
    const int a = idx[slot];
    const std::size_t base = k - static_cast<std::size_t>(a) * stride;
    Jet& o = out.data()[k];
    for (int i = 0; i < m; ++i) o.add_product(M(a, i), T.data()[base + i * stride]);
  }
  return out;
}

JetTensor transform_all(const JetTensor& T, const JetTensor& M) {
  if (T.rank() == 0) return T;
  JetTensor r = transform_slot(T, M, 0);
  for (int s = 1; s < T.rank(); ++s) r = transform_slot(r, M, s);
  return r;
}

}  // namespace

LocalGeometry::LocalGeometry(const GeometryInstance& geo, std::span<const double> point)
    : m_(geo.dim()), order_(geo.order()), point_(point.begin(), point.end()) {
  const int m = m_;
  const int K = order_;
  if (static_cast<int>(point.size()) != m) throw ShapeError("point has wrong dimension");
  if (!geo.contains(point)) throw DomainError("point outside the domain box");
  if (K < 1) throw JetOrderError("jet order must be at least 1");
  const Jet zero(m, K);
  g_ = JetTensor(m, 2, zero);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= i; ++k) {
      Jet v = eval_expr_jet(geo.metric(i, k), point, K);
      g_(i, k) = v;
      g_(k, i) = v;
    }
  // Cholesky factor L (lower triangular) with g = L L^T.
  JetTensor L(m, 2, zero);
  for (int j = 0; j < m; ++j) {
    Jet d = g_(j, j);
    for (int k = 0; k < j; ++k) d.add_product(L(j, k), L(j, k), -1.0);
    if (!(d.value() > 0.0)) throw GeometryError("metric is not positive definite at the sample point");
    L(j, j) = sqrt(d);
    for (int i = j + 1; i < m; ++i) {
      Jet s = g_(i, j);
      for (int k = 0; k < j; ++k) s.add_product(L(i, k), L(j, k), -1.0);
      L(i, j) = s / L(j, j);
    }
  }
  JetTensor Linv(m, 2, zero);
  for (int i = 0; i < m; ++i) {
    Linv(i, i) = 1.0 / L(i, i);
    for (int j = 0; j < i; ++j) {
      Jet s(m, K);
      for (int k = j; k < i; ++k) s.add_product(L(i, k), Linv(k, j));
      Linv(i, j) = -(s / L(i, i));
    }
  }
  e_ = JetTensor::generate<2>(m, [&](int a, int i) { return L(i, a); });
  E_ = Linv;
  ginv_ = JetTensor(m, 2, zero);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Jet s(m, K);
      for (int a = 0; a < m; ++a) s.add_product(E_(a, i), E_(a, j));
      ginv_(i, j) = s;
    }
  // Christoffel symbols of the second kind.
  std::vector<JetTensor> dg;
  for (int s = 0; s < m; ++s)
    dg.push_back(JetTensor::generate<2>(m, [&](int i, int k) { return g_(i, k).partial(s); }));
  const JetTensor first = JetTensor::generate<3>(m, [&](int s, int j, int k) {
    Jet v = dg[j](s, k) + dg[k](s, j) - dg[s](j, k);
    v *= 0.5;
    return v;
  });
  gamma_ = JetTensor(m, 3, Jet(m, K - 1));
  for (int l = 0; l < m; ++l)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int s = 0; s < m; ++s) gamma_(l, j, k).add_product(ginv_(l, s), first(s, j, k));
  // Connection one-forms of the frame: omega^d_{ca} = theta^d(nabla_{E_c} E_a).
  if (K >= 1) {
    JetTensor tmp(m, 3, Jet(m, K - 1));  // (c, a, nu)
    for (int a = 0; a < m; ++a)
      for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu) {
          Jet de = E_(a, nu).partial(mu);
          for (int l = 0; l < m; ++l) de.add_product(gamma_(nu, mu, l), E_(a, l));
          for (int c = 0; c < m; ++c) tmp(c, a, nu).add_product(E_(c, mu), de);
        }
    omega_ = JetTensor(m, 3, Jet(m, K - 1));
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int d = 0; d < m; ++d)
          for (int nu = 0; nu < m; ++nu) omega_(c, a, d).add_product(e_(d, nu), tmp(c, a, nu));
  }
}

Jet LocalGeometry::scalar(const Expr& h) const { return eval_expr_jet(h, point_, order_); }

JetTensor LocalGeometry::vector_coord(const std::vector<Expr>& X) const {
  if (static_cast<int>(X.size()) != m_) throw ShapeError("vector field has wrong dimension");
  std::vector<Jet> v;
  for (const auto& x : X) v.push_back(eval_expr_jet(x, point_, order_));
  return JetTensor(m_, 1, std::move(v));
}

JetTensor LocalGeometry::vector_frame(const std::vector<Expr>& X) const {
  const JetTensor xc = vector_coord(X);
  return JetTensor::generate<1>(m_, [&](int a) {
    Jet s(m_, order_);
    for (int i = 0; i < m_; ++i) s.add_product(e_(a, i), xc(i));
    return s;
  });
}

JetTensor LocalGeometry::coord_derivative(const JetTensor& T) const {
  const int m = m_;
  const int n = T.rank();
  const int r = order_of(T);
  if (r < 1) throw JetOrderError("jet order exhausted: cannot take another covariant derivative");
  const int ro = std::min(r - 1, order_of(gamma_));
  std::vector<std::vector<Jet>> dT(m);
  for (int k = 0; k < m; ++k) {
    dT[k].reserve(T.size());
    for (const auto& c : T.data()) dT[k].push_back(c.partial(k));
  }
  JetTensor out(m, n + 1, Jet(m, ro));
  std::vector<std::size_t> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * m;
  std::vector<int> idx(n);
  for (std::size_t q = 0; q < T.size(); ++q) {
    T.unflat(q, idx);
    for (int k = 0; k < m; ++k) {
      Jet& o = out.data()[q * m + k];
      o += dT[k][q];
      for (int s = 0; s < n; ++s) {
        const std::size_t base = q - static_cast<std::size_t>(idx[s]) * stride[s];
        for (int l = 0; l < m; ++l) o.add_product(gamma_(l, k, idx[s]), T.data()[base + l * stride[s]], -1.0);
      }
    }
  }
  return out;
}

JetTensor LocalGeometry::frame_derivative(const JetTensor& T) const {
  const int m = m_;
  const int n = T.rank();
  const int r = order_of(T);
  if (r < 1) throw JetOrderError("jet order exhausted: cannot take another covariant derivative");
  const int ro = std::min(r - 1, order_of(omega_));
  std::vector<std::vector<Jet>> dT(m);
  for (int mu = 0; mu < m; ++mu) {
    dT[mu].reserve(T.size());
    for (const auto& c : T.data()) dT[mu].push_back(c.partial(mu));
  }
  JetTensor out(m, n + 1, Jet(m, ro));
  std::vector<std::size_t> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * m;
  std::vector<int> idx(n);
  for (std::size_t q = 0; q < T.size(); ++q) {
    T.unflat(q, idx);
    for (int c = 0; c < m; ++c) {
      Jet& o = out.data()[q * m + c];
      for (int mu = 0; mu < m; ++mu) o.add_product(E_(c, mu), dT[mu][q]);
      for (int s = 0; s < n; ++s) {
        const std::size_t base = q - static_cast<std::size_t>(idx[s]) * stride[s];
        for (int d = 0; d < m; ++d) o.add_product(omega_(c, idx[s], d), T.data()[base + d * stride[s]], -1.0);
      }
    }
  }
  return out;
}

JetTensor LocalGeometry::to_frame(const JetTensor& T) const { return transform_all(T, E_); }

JetTensor LocalGeometry::to_coord(const JetTensor& T) const {
  const JetTensor et = JetTensor::generate<2>(m_, [&](int i, int a) { return e_(a, i); });
  return transform_all(T, et);
}

// ---------------------------------------------------------------------------

namespace {

TensorValue make_value(std::span<const double> p, FrameKind fk, int base, int derivs, Tensor t) {
  TensorValue v;
  v.point.assign(p.begin(), p.end());
  v.frame = fk;
  v.base_rank = base;
  v.derivs = derivs;
  v.components = std::move(t);
  return v;
}

}  // namespace

TensorValue christoffel(const GeometryInstance& g, std::span<const double> p) {
  LocalGeometry lg(g, p);
  return make_value(p, FrameKind::Coordinate, 3, 0, value_of(lg.christoffel()));
}

JetTensor covariant_derivative(const LocalGeometry& lg, const JetTensor& T, int times) {
  JetTensor r = T;
  for (int i = 0; i < times; ++i) r = lg.coord_derivative(r);
  return r;
}

TensorValue hessian(const GeometryInstance& g, const Expr& h, std::span<const double> p) {
  LocalGeometry lg(g, p);
  JetTensor s(g.dim(), 0, lg.scalar(h));
  return make_value(p, FrameKind::Coordinate, 0, 2, value_of(covariant_derivative(lg, s, 2)));
}

double laplacian(const GeometryInstance& g, const Expr& h, std::span<const double> p) {
  LocalGeometry lg(g, p);
  JetTensor s(g.dim(), 0, lg.scalar(h));
  const Tensor H = value_of(covariant_derivative(lg, s, 2));
  const Tensor gi = value_of(lg.inverse_metric());
  return sum2(g.dim(), [&](int i, int j) { return gi(i, j) * H(i, j); });
}

TensorValue lie_derivative_metric(const GeometryInstance& g, const std::vector<Expr>& X,
                                  std::span<const double> p) {
  LocalGeometry lg(g, p);
  const int m = g.dim();
  const JetTensor xc = lg.vector_coord(X);
  const JetTensor xl = JetTensor::generate<1>(m, [&](int i) {
    Jet s(m, lg.order());
    for (int j = 0; j < m; ++j) s.add_product(lg.metric()(i, j), xc(j));
    return s;
  });
  const Tensor dx = value_of(lg.coord_derivative(xl));
  return make_value(p, FrameKind::Coordinate, 2, 0,
                    Tensor::generate<2>(m, [&](int i, int j) { return dx(i, j) + dx(j, i); }));
}

TensorValue to_orthonormal(const GeometryInstance& g, const TensorValue& T) {
  if (T.frame == FrameKind::Orthonormal) return T;
  LocalGeometry lg(g.with_order(1), T.point);
  const int m = g.dim();
  JetTensor jt(m, T.components.rank(), Jet(m, 0));
  for (std::size_t k = 0; k < jt.size(); ++k) jt.data()[k] = Jet::constant(T.components.data()[k], m, 0);
  TensorValue out = T;
  out.frame = FrameKind::Orthonormal;
  out.components = value_of(lg.to_frame(jt));
  return out;
}

}  // namespace ctl

#include "ctl/curvature.hpp"

#include "ctl/error.hpp"

namespace ctl {

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::Riemann: return "riemann";
    case Quantity::Ricci: return "ricci";
    case Quantity::Scalar: return "scalar";
    case Quantity::Schouten: return "schouten";
    case Quantity::Weyl: return "weyl";
    case Quantity::Einstein: return "einstein";
    case Quantity::Cotton: return "cotton";
    case Quantity::CottonWeyl: return "cotton_weyl";
    case Quantity::Bach: return "bach";
    case Quantity::U: return "u";
    case Quantity::F: return "f";
    case Quantity::X: return "X";
    case Quantity::D: return "d_tensor";
    case Quantity::DX: return "dx_tensor";
    case Quantity::DUF: return "duf_tensor";
    case Quantity::DUX: return "dux_tensor";
  }
  return "?";
}

std::optional<Quantity> quantity_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(Quantity::DUX); ++k) {
    const auto q = static_cast<Quantity>(k);
    if (name == quantity_name(q)) return q;
  }
  return std::nullopt;
}

CurvatureBundle::CurvatureBundle(GeometryInstance g, std::span<const double> point)
    : geo_(std::move(g)), local_(geo_, point) {}

const JetTensor& CurvatureBundle::riemann_coord() {
  if (have_riem_coord_) return riem_coord_;
  const int m = dim();
  const JetTensor& G = local_.christoffel();
  if (order_of(G) < 1) throw JetOrderError("jet order too low for curvature");
  std::vector<JetTensor> dG;
  for (int mu = 0; mu < m; ++mu)
    dG.push_back(JetTensor::generate<3>(m, [&](int a, int b, int c) { return G(a, b, c).partial(mu); }));
  const int ro = order_of(dG[0]);
  // R^r_{s mu nu}
  JetTensor up(m, 4, Jet(m, ro));
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s)
      for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu) {
          Jet& o = up(r, s, mu, nu);
          o += dG[mu](r, nu, s);
          o -= dG[nu](r, mu, s);
          for (int l = 0; l < m; ++l) {
            o.add_product(G(r, mu, l), G(l, nu, s));
            o.add_product(G(r, nu, l), G(l, mu, s), -1.0);
          }
        }
  riem_coord_ = JetTensor(m, 4, Jet(m, ro));
  const JetTensor& g = local_.metric();
  for (int k = 0; k < m; ++k)
    for (int s = 0; s < m; ++s)
      for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu)
          for (int r = 0; r < m; ++r) riem_coord_(k, s, mu, nu).add_product(g(k, r), up(r, s, mu, nu));
  have_riem_coord_ = true;
  return riem_coord_;
}

JetTensor CurvatureBundle::compute(Quantity q) {
  const int m = dim();
  auto need_dim = [&](int k, const char* what) {
    if (m < k) throw ShapeError(std::string(what) + " needs dimension >= " + std::to_string(k));
  };
  switch (q) {
    case Quantity::Riemann: return local_.to_frame(riemann_coord());
    case Quantity::Ricci: return ricci_from(field(Quantity::Riemann));
    case Quantity::Scalar: return trace2(field(Quantity::Ricci));
    case Quantity::Schouten: return schouten_from(field(Quantity::Ricci), field(Quantity::Scalar)());
    case Quantity::Einstein: return einstein_from(field(Quantity::Ricci), field(Quantity::Scalar)());
    case Quantity::Weyl:
      need_dim(3, "the Weyl tensor");
      return weyl_from(field(Quantity::Riemann), field(Quantity::Ricci), field(Quantity::Scalar)());
    case Quantity::Cotton: return cotton_from(field(Quantity::Schouten, 1));
    case Quantity::CottonWeyl:
      need_dim(4, "the Weyl form of the Cotton tensor");
      return cotton_weyl_from(field(Quantity::Weyl, 1));
    case Quantity::Bach:
      need_dim(3, "the Bach tensor");
      return bach_from(field(Quantity::Cotton, 1), field(Quantity::Ricci), field(Quantity::Weyl));
    case Quantity::U:
      if (!geo_.has_u()) throw MissingIngredient("no u");
      return JetTensor(m, 0, local_.scalar(geo_.u()));
    case Quantity::F:
      if (!geo_.has_f()) throw MissingIngredient("no f");
      return JetTensor(m, 0, local_.scalar(geo_.f()));
    case Quantity::X:
      if (!geo_.has_X()) throw MissingIngredient("no X");
      return local_.vector_frame(geo_.X());
    case Quantity::D:
      need_dim(3, "the D tensor");
      return d_form1(field(Quantity::F, 1), field(Quantity::Ricci), field(Quantity::Scalar)());
    case Quantity::DX:
      need_dim(3, "the D^X tensor");
      return dx_tensor_from(field(Quantity::X), field(Quantity::X, 2), field(Quantity::Ricci),
                            field(Quantity::Scalar)());
    case Quantity::DUF:
      need_dim(3, "the D^(u,f) tensor");
      return duf_best_from(field(Quantity::F, 1), field(Quantity::Ricci), field(Quantity::Scalar)(),
                           field(Quantity::U, 1), field(Quantity::U, 2));
    case Quantity::DUX:
      need_dim(3, "the D^(u,X) tensor");
      return dux_from(field(Quantity::X), field(Quantity::X, 1), field(Quantity::X, 2), field(Quantity::Ricci),
                      field(Quantity::Scalar)(), field(Quantity::U)(), field(Quantity::U, 1));
  }
  throw ShapeError("unknown quantity");
}

const JetTensor& CurvatureBundle::field(Quantity q, int derivs) {
  const auto key = std::make_pair(static_cast<int>(q), derivs);
  auto it = fields_.find(key);
  if (it != fields_.end()) return it->second;
  JetTensor t = derivs == 0 ? compute(q) : local_.frame_derivative(field(q, derivs - 1));
  return fields_.emplace(key, std::move(t)).first->second;
}

const Tensor& CurvatureBundle::value(Quantity q, int derivs) {
  const auto key = std::make_pair(static_cast<int>(q), derivs);
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  return values_.emplace(key, value_of(field(q, derivs))).first->second;
}

// ---------------------------------------------------------------------------

namespace {

TensorValue frame_value(CurvatureBundle& b, Quantity q, int base_rank) {
  TensorValue v;
  v.point = b.local().point();
  v.frame = FrameKind::Orthonormal;
  v.base_rank = base_rank;
  v.components = b.value(q);
  return v;
}

}  // namespace

TensorValue riemann(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::Riemann, 4);
}

TensorValue ricci(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::Ricci, 2);
}

double scalar_curvature(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return b.scalar(Quantity::Scalar);
}

TensorValue schouten(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::Schouten, 2);
}

TensorValue weyl(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::Weyl, 4);
}

TensorValue cotton(const GeometryInstance& g, std::span<const double> p, CottonRoute route) {
  CurvatureBundle b(g, p);
  return frame_value(b, route == CottonRoute::Schouten ? Quantity::Cotton : Quantity::CottonWeyl, 3);
}

TensorValue bach(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::Bach, 2);
}

TensorValue d_tensor(const GeometryInstance& g, std::span<const double> p, int form) {
  CurvatureBundle b(g, p);
  TensorValue v = frame_value(b, Quantity::D, 3);
  const Tensor& df = b.value(Quantity::F, 1);
  switch (form) {
    case 1: break;
    case 2:
      v.components = d_form2(df, b.value(Quantity::Ricci), b.scalar(Quantity::Scalar), b.value(Quantity::Scalar, 1));
      break;
    case 3: v.components = d_form3(df, b.value(Quantity::Schouten), b.value(Quantity::Einstein)); break;
    case 4: v.components = d_form4(df, b.value(Quantity::F, 2)); break;
    default: throw ConfigError("D tensor form must be 1, 2, 3 or 4");
  }
  return v;
}

TensorValue dx_tensor(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::DX, 3);
}

TensorValue duf_tensor(const GeometryInstance& g, std::span<const double> p, DufForm form) {
  CurvatureBundle b(g, p);
  TensorValue v = frame_value(b, Quantity::DUF, 3);
  if (form == DufForm::Alt) v.components = duf_alt_from(b.value(Quantity::F, 1), b.value(Quantity::F, 2), b.value(Quantity::U, 1));
  return v;
}

TensorValue dux_tensor(const GeometryInstance& g, std::span<const double> p) {
  CurvatureBundle b(g, p);
  return frame_value(b, Quantity::DUX, 3);
}

}  // namespace ctl

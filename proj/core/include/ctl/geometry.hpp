#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctl/expr.hpp"
#include "ctl/tensor.hpp"

namespace ctl {

/// Textual description of a chart: metric entries, optional conformal factor
/// u, potential f, vector field X (contravariant) and soliton constant.
struct GeometrySpec {
  std::string name;
  int dim = 0;
  std::vector<std::string> coords;
  std::vector<std::pair<double, double>> domain;
  /// Full symmetric matrix of expressions.
  std::vector<std::vector<std::string>> metric;
  std::optional<std::string> u;
  std::optional<std::string> f;
  std::optional<std::vector<std::string>> X;
  std::optional<double> lambda;
};

/// Accepts a lower-triangular or a full square "metric" array.
GeometrySpec spec_from_json(const std::string& text);
std::string spec_to_json(const GeometrySpec& spec);
/// Default coordinate names x1..xm.
std::vector<std::string> default_coords(int dim);

struct JetConfig {
  int order = 6;
  /// Order from CTL_JET_ORDER if set, else the default.
  static JetConfig from_env();
};

/// A parsed and validated geometry, ready to be expanded at points.
class GeometryInstance {
 public:
  explicit GeometryInstance(GeometrySpec spec, JetConfig cfg = {});

  const GeometrySpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int order() const { return cfg_.order; }
  const std::string& name() const { return spec_.name; }
  /// Stable hash of the spec content.
  const std::string& id() const { return id_; }

  const Expr& metric(int i, int j) const { return metric_[i * spec_.dim + j]; }
  const Expr& u() const { return u_; }
  const Expr& f() const { return f_; }
  const std::vector<Expr>& X() const { return X_; }
  bool has_u() const { return static_cast<bool>(u_); }
  bool has_f() const { return static_cast<bool>(f_); }
  bool has_X() const { return !X_.empty(); }
  std::optional<double> lambda() const { return spec_.lambda; }

  bool contains(std::span<const double> p) const;

  /// The same chart with metric e^{2u} g; u, f, X and lambda are kept.
  GeometryInstance rescaled(const std::string& u_text) const;
  GeometryInstance rescaled() const;
  GeometryInstance with_order(int order) const;

 private:
  GeometrySpec spec_;
  JetConfig cfg_;
  std::string id_;
  std::vector<Expr> metric_;
  Expr u_;
  Expr f_;
  std::vector<Expr> X_;
};

/// Jets of the metric and of an orthonormal frame about one point. The frame
/// is the Cholesky vielbein: theta^a = L_{ia} dx^i with g = L L^T.
///
/// Frame components: indices are all lower, derivative indices trail, so
/// T_{ab,c} is the c-th frame derivative of T_{ab}.
class LocalGeometry {
 public:
  LocalGeometry(const GeometryInstance& g, std::span<const double> point);

  int dim() const { return m_; }
  int order() const { return order_; }
  const std::vector<double>& point() const { return point_; }

  const JetTensor& metric() const { return g_; }
  const JetTensor& inverse_metric() const { return ginv_; }
  /// Gamma^l_{jk} stored at (l, j, k).
  const JetTensor& christoffel() const { return gamma_; }
  /// theta^a_i stored at (a, i).
  const JetTensor& coframe() const { return e_; }
  /// E_a^i stored at (a, i).
  const JetTensor& frame() const { return E_; }
  /// omega^d_{ca} = theta^d(nabla_{E_c} E_a) stored at (c, a, d).
  const JetTensor& connection() const { return omega_; }

  Jet scalar(const Expr& h) const;
  /// Coordinate components X^i of a vector field.
  JetTensor vector_coord(const std::vector<Expr>& X) const;
  /// Frame components X^a = theta^a(X).
  JetTensor vector_frame(const std::vector<Expr>& X) const;

  /// Coordinate covariant derivative of an all-lower coordinate tensor.
  JetTensor coord_derivative(const JetTensor& T) const;
  /// Covariant derivative in the orthonormal frame.
  JetTensor frame_derivative(const JetTensor& T) const;
  JetTensor to_frame(const JetTensor& T) const;
  JetTensor to_coord(const JetTensor& T) const;

 private:
  int m_;
  int order_;
  std::vector<double> point_;
  JetTensor g_, ginv_, gamma_, e_, E_, omega_;
};

enum class FrameKind { Coordinate, Orthonormal };

/// Components of a tensor at a point.
struct TensorValue {
  std::vector<double> point;
  FrameKind frame = FrameKind::Coordinate;
  int base_rank = 0;
  int derivs = 0;
  Tensor components;
};

TensorValue christoffel(const GeometryInstance& g, std::span<const double> p);
/// `times` coordinate covariant derivatives of an all-lower coordinate tensor field.
JetTensor covariant_derivative(const LocalGeometry& lg, const JetTensor& T, int times);
TensorValue hessian(const GeometryInstance& g, const Expr& h, std::span<const double> p);
double laplacian(const GeometryInstance& g, const Expr& h, std::span<const double> p);
/// (L_X g)_{ij} in coordinates.
TensorValue lie_derivative_metric(const GeometryInstance& g, const std::vector<Expr>& X,
                                  std::span<const double> p);
TensorValue to_orthonormal(const GeometryInstance& g, const TensorValue& T);

}  // namespace ctl

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctl/conformal.hpp"
#include "ctl/curvature.hpp"
#include "ctl/residual.hpp"
#include "ctl/soliton.hpp"

namespace ctl {

enum class Family { COMM, SOL, CE, CGRS, GRS, CGERS, HIGH };

const char* family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

/// One quantity an identity reads, with how many frame derivatives. Tilde
/// ingredients are read on the rescaled metric e^{2u} g.
struct Ingredient {
  Quantity q;
  int derivs = 0;
  bool tilde = false;
};

/// Derivatives of the metric (for curvature) or of the field (for u, f, X)
/// contained in one ingredient.
int derivative_order(const Ingredient& in);

struct Requirements {
  bool u = false;
  bool f = false;
  bool X = false;
  bool lambda = false;
  int min_dim = 3;
};

/// Point values seen by evaluators. Everything is in the orthonormal frame of
/// the base metric except `tv`, which reads the rescaled metric's frame.
class IdentityContext {
 public:
  IdentityContext(const GeometryInstance& g, const GeometryInstance* tilde, std::span<const double> p,
                  bool zero_X = false);

  int dim() const { return m_; }
  double lambda() const;
  /// Replaces the geometry's lambda for the following evaluations.
  void set_lambda(std::optional<double> l) { lambda_ = l; }
  double u0();

  const Tensor& v(Quantity q, int derivs = 0);
  double s(Quantity q, int derivs = 0) { return v(q, derivs)(); }
  const Tensor& tv(Quantity q, int derivs = 0);

  CurvatureBundle& base() { return base_; }

 private:
  const GeometryInstance& g_;
  const GeometryInstance* tilde_geo_;
  int m_;
  std::vector<double> p_;
  bool zero_X_;
  std::optional<double> lambda_;
  CurvatureBundle base_;
  std::unique_ptr<CurvatureBundle> tilde_;
  std::map<std::pair<int, int>, Tensor> zeros_;
};

using Sides = std::pair<Tensor, Tensor>;

struct IdentityRecord {
  std::string id;  ///< FAMILY.name
  Family family;
  std::string label;   ///< opaque equation key
  std::string anchor;  ///< short description of the statement
  Requirements req;
  std::vector<Ingredient> ingredients;
  /// Structure the geometry must be certified to carry (none for COMM).
  std::optional<Structure> hypothesis;
  std::function<Sides(IdentityContext&)> eval;

  int derivs() const;
  TolClass tol_class() const { return tol_class_for(derivs()); }
  int min_jet_order() const { return derivs(); }
  bool uses_tilde() const;
};

/// The whole registry in its stable order.
const std::vector<IdentityRecord>& identity_registry();
const IdentityRecord* find_identity(const std::string& id);

struct IdentityFilter {
  std::optional<Family> family;
  /// Keep only records that need this ingredient: one of "u", "f", "X", "lambda".
  std::optional<std::string> requires_ingredient;
  /// Drop records that need this ingredient.
  std::optional<std::string> excludes_ingredient;
};

std::vector<const IdentityRecord*> list_identities(const IdentityFilter& filter = {});

/// Resolves "COMM", "SOL.eq1g" or a comma separated mix of both.
std::vector<const IdentityRecord*> select_identities(const std::string& selector);

/// JSON list of {id, family, paper_eq, anchor, requires, tol_class}.
std::string registry_json(const std::vector<const IdentityRecord*>& records);

/// Certification residual of a claimed structure over points: the sup norm
/// of the defining equation (and its trace) relative to 1 + |Ric|.
double certification_residual(const GeometryInstance& g, Structure s,
                              const std::vector<std::vector<double>>& points,
                              std::optional<double> lambda = std::nullopt);

/// Threshold below which a claim counts as certified.
inline constexpr double kCertifyTolerance = 1e-9;

/// Evaluates records over points. Unmet requirements or uncertified
/// hypotheses give Skipped with a reason; evaluation errors give Error.
std::vector<CheckResult> verify_identities(const GeometryInstance& g,
                                           const std::vector<const IdentityRecord*>& records,
                                           const std::vector<std::vector<double>>& points,
                                           const VerifyOptions& opts = {});

/// Residual of one record at one point (no gating), for tests and tools.
double identity_residual(const GeometryInstance& g, const IdentityRecord& rec, std::span<const double> p);

}  // namespace ctl

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctl/curvature.hpp"
#include "ctl/residual.hpp"
#include "ctl/soliton.hpp"

namespace ctl {

/// Transformation laws under g~ = e^{2u} g. Each law states an identity
/// e^{k u} Q~ = P(base quantities) between orthonormal components.
enum class Law {
  Riemann04,
  Ricci,
  Scalar,
  NablaRicci,
  Nabla2Ricci,
  NablaScalar,
  HessScalar,
  LapScalar,
  HessianF,
  LaplacianF,
  ThirdF,
  ThirdFTraced,
  Schouten,
  NablaSchouten,
  Nabla2Schouten,
  Weyl13,
  Cotton,
  Bach,
  DTensor,
  DTensorReverse,
  NablaD,
  LieMetric,
  NablaX,
  SymNablaX,
  DivX,
  Nabla2X,
  Nabla2XTraced,
};

/// Which structure must be certified before a law is scheduled.
enum class LawGate { None, TildeGradientSoliton, BaseGradientSoliton };

struct LawInfo {
  Law law;
  const char* id;
  const char* label;  ///< opaque equation key
  int exponent;       ///< k in e^{k u}
  int derivs;         ///< highest derivative order involved
  bool needs_f;
  bool needs_X;
  LawGate gate;
};

const std::vector<LawInfo>& law_registry();
const LawInfo& law_info(Law law);
std::optional<Law> law_from_id(const std::string& id);

/// Base geometry carrying u, and the rescaled geometry e^{2u} g (which keeps
/// the same coordinates, domain, f and X).
struct ConformalPair {
  GeometryInstance base;
  GeometryInstance tilde;
};

ConformalPair rescale(const GeometryInstance& g, const std::string& u);
/// Uses the geometry's own u.
ConformalPair rescale(const GeometryInstance& g);

/// Both routes at one point, sharing curvature caches across laws.
class ConformalPoint {
 public:
  ConformalPoint(const ConformalPair& pair, std::span<const double> p);

  /// The law's right side from base quantities.
  Tensor predict(Law law);
  /// e^{k u} times the quantity recomputed on the rescaled geometry.
  Tensor direct(Law law);

  CurvatureBundle& base() { return base_; }
  CurvatureBundle& tilde() { return tilde_; }

 private:
  const ConformalPair& pair_;
  CurvatureBundle base_, tilde_;
  double u0_;
};

TensorValue predict(const ConformalPair& pair, Law law, std::span<const double> p);
TensorValue direct(const ConformalPair& pair, Law law, std::span<const double> p);

enum class CheckStatus { Pass, Fail, Skipped, Error };
const char* status_name(CheckStatus s);

/// Result of one law or identity over a set of points.
struct CheckResult {
  std::string id;
  std::string label;
  CheckStatus status = CheckStatus::Skipped;
  std::string reason;
  double max_residual = 0;
  double tolerance = 0;
  TolClass tol_class = TolClass::A;
  int points = 0;
  std::vector<double> worst_point;
};

struct VerifyOptions {
  /// Structures certified on the base geometry (gates some checks).
  std::vector<Structure> certified;
  /// Soliton constant of a certified structure when it differs from the
  /// geometry's own lambda.
  std::vector<std::pair<Structure, double>> lambdas;
  std::optional<TolClass> tol_override;
  /// Worker threads over points; 0 picks the hardware concurrency.
  int threads = 0;
};

CheckResult verify_transform(const ConformalPair& pair, Law law, const std::vector<std::vector<double>>& points,
                             const VerifyOptions& opts = {});

}  // namespace ctl

#pragma once

#include <optional>
#include <string>

#include "ctl/curvature.hpp"

namespace ctl {

/// Structures a geometry can be claimed (and certified) to carry. The
/// conformal ones refer to g~ = e^{2u} g and are written with base quantities.
enum class Structure {
  Einstein,
  GradientSoliton,
  GenericSoliton,
  ConformallyEinstein,
  ConformalGradientSoliton,
  ConformalGenericSoliton,
};

const char* structure_name(Structure s);
std::optional<Structure> structure_from_name(const std::string& name);

/// Left side minus right side of the defining equation, plus the traced
/// scalar constraint (which also fixes lambda for the conformal structures).
struct SolitonResidual {
  Tensor equation;
  double traced = 0;
  double max_abs() const;
};

/// Uses the geometry's u, f, X and lambda; throws MissingIngredient.
SolitonResidual soliton_residual(CurvatureBundle& b, Structure s);
SolitonResidual soliton_residual(CurvatureBundle& b, Structure s, double lambda);

}  // namespace ctl

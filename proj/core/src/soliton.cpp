#include "ctl/soliton.hpp"

#include <array>
#include <cmath>

#include "ctl/error.hpp"

namespace ctl {

namespace {

constexpr std::array<std::pair<Structure, const char*>, 6> kNames = {{
    {Structure::Einstein, "einstein"},
    {Structure::GradientSoliton, "gradient_soliton"},
    {Structure::GenericSoliton, "generic_soliton"},
    {Structure::ConformallyEinstein, "conformally_einstein"},
    {Structure::ConformalGradientSoliton, "conformal_gradient_soliton"},
    {Structure::ConformalGenericSoliton, "conformal_generic_soliton"},
}};

}  // namespace

const char* structure_name(Structure s) {
  for (const auto& [k, n] : kNames)
    if (k == s) return n;
  return "?";
}

std::optional<Structure> structure_from_name(const std::string& name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  return std::nullopt;
}

double SolitonResidual::max_abs() const { return std::max(ctl::max_abs(equation), std::abs(traced)); }

SolitonResidual soliton_residual(CurvatureBundle& b, Structure s) {
  const auto lambda = b.geometry().lambda();
  if (!lambda) throw MissingIngredient("no lambda");
  return soliton_residual(b, s, *lambda);
}

SolitonResidual soliton_residual(CurvatureBundle& b, Structure s, double lambda) {
  const int m = b.dim();
  const double n2 = m - 2.0;
  const Tensor& ric = b.value(Quantity::Ricci);
  const double S = b.scalar(Quantity::Scalar);
  SolitonResidual r;

  if (s == Structure::Einstein || s == Structure::GradientSoliton || s == Structure::GenericSoliton) {
    Tensor extra(m, 2, 0.0);
    if (s == Structure::GradientSoliton) extra = b.value(Quantity::F, 2);
    if (s == Structure::GenericSoliton) {
      const Tensor& X1 = b.value(Quantity::X, 1);
      extra = Tensor::generate<2>(m, [&](int i, int j) { return 0.5 * (X1(i, j) + X1(j, i)); });
    }
    r.equation = Tensor::generate<2>(m, [&](int i, int j) { return ric(i, j) + extra(i, j) - lambda * delta(i, j); });
    double tr = 0;
    for (int i = 0; i < m; ++i) tr += r.equation(i, i);
    r.traced = tr;
    return r;
  }

  const double u0 = b.scalar(Quantity::U);
  const Tensor& du = b.value(Quantity::U, 1);
  const Tensor& hu = b.value(Quantity::U, 2);
  double lapu = 0, gu2 = 0;
  for (int t = 0; t < m; ++t) {
    lapu += hu(t, t);
    gu2 += du(t) * du(t);
  }
  const double e2u = std::exp(2 * u0);
  // Common left side R_ij - (m-2) u_ij + (m-2) u_i u_j.
  Tensor lhs = Tensor::generate<2>(m, [&](int i, int j) { return ric(i, j) - n2 * hu(i, j) + n2 * du(i) * du(j); });
  double rhs_scalar = S - n2 * (lapu - gu2);
  double traced = S - 2 * (m - 1) * lapu - (m - 1) * n2 * gu2 - m * lambda * e2u;

  if (s == Structure::ConformallyEinstein) {
    rhs_scalar = S - n2 * lapu + n2 * gu2;
  } else if (s == Structure::ConformalGradientSoliton) {
    const Tensor& df = b.value(Quantity::F, 1);
    const Tensor& hf = b.value(Quantity::F, 2);
    double lapf = 0, fu = 0;
    for (int t = 0; t < m; ++t) {
      lapf += hf(t, t);
      fu += df(t) * du(t);
    }
    lhs += Tensor::generate<2>(m, [&](int i, int j) { return hf(i, j) - (df(i) * du(j) + df(j) * du(i)); });
    rhs_scalar += lapf - 2 * fu;
    traced += lapf + n2 * fu;
  } else {
    const Tensor& X0 = b.value(Quantity::X);
    const Tensor& X1 = b.value(Quantity::X, 1);
    double div = 0, xu = 0;
    for (int t = 0; t < m; ++t) {
      div += X1(t, t);
      xu += X0(t) * du(t);
    }
    lhs += Tensor::generate<2>(m, [&](int i, int j) { return 0.5 * e2u * (X1(i, j) + X1(j, i)); });
    rhs_scalar += e2u * div;
    traced += e2u * (div + m * xu);
  }
  r.equation = Tensor::generate<2>(m, [&](int i, int j) { return lhs(i, j) - rhs_scalar / m * delta(i, j); });
  r.traced = traced;
  return r;
}

}  // namespace ctl

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ctl/geometry.hpp"
#include "oracles.hpp"

namespace fixture {

inline ctl::GeometrySpec conformally_flat(int m, const std::string& factor) {
  ctl::GeometrySpec s;
  s.name = "test";
  s.dim = m;
  s.coords = ctl::default_coords(m);
  s.domain.assign(m, {-1.0, 1.0});
  s.metric.assign(m, std::vector<std::string>(m, "0"));
  for (int i = 0; i < m; ++i) s.metric[i][i] = factor;
  return s;
}

/// A non-diagonal metric with generic curvature in dimension 2..6.
inline ctl::GeometrySpec wavy(int m) {
  ctl::GeometrySpec s = conformally_flat(m, "1");
  s.metric[0][0] = "1 + 0.2*sin(x2)";
  s.metric[1][1] = "1.2 + 0.1*x1*x1";
  s.metric[0][1] = s.metric[1][0] = "0.1*cos(x1 + x2)";
  if (m >= 3) {
    s.metric[2][2] = "exp(0.1*x1*x3)";
    s.metric[0][2] = s.metric[2][0] = "0.05*x2*x3";
  }
  if (m >= 4) {
    s.metric[3][3] = "1 + 0.15*x3*x4 + 0.1*x2^2";
    s.metric[1][3] = s.metric[3][1] = "0.08*sin(x4 - x1)";
  }
  if (m >= 5) {
    s.metric[4][4] = "1 + 0.1*cos(x5*x2)";
    s.metric[2][4] = s.metric[4][2] = "0.05*x1*x5";
  }
  return s;
}

/// Diagonal metric with potential f and X = grad f written out.
inline ctl::GeometrySpec diagonal_with_gradient() {
  ctl::GeometrySpec s = conformally_flat(3, "1");
  s.metric[0][0] = "1 + 0.2*sin(x2)";
  s.metric[1][1] = "1.2 + 0.1*x1*x1";
  s.metric[2][2] = "exp(0.1*x1*x3)";
  s.f = "x1*x2 + x3^2 + 0.3*sin(x1*x3)";
  s.X = std::vector<std::string>{"(x2 + 0.3*x3*cos(x1*x3))/(1 + 0.2*sin(x2))",
                                 "x1/(1.2 + 0.1*x1*x1)",
                                 "(2*x3 + 0.3*x1*cos(x1*x3))/exp(0.1*x1*x3)"};
  return s;
}

inline double max_abs_diff(const ctl::Tensor& a, const ctl::Tensor& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

/// Christoffel symbols from finite differences of the metric expressions.
inline ctl::Tensor christoffel_fd(const ctl::GeometryInstance& g, const std::vector<double>& p) {
  const int m = g.dim();
  ctl::Tensor gv(m, 2, 0.0), dg(m, 3, 0.0);  // dg(s, i, j) = d_s g_ij
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      oracle::Fn f = [&, i, j](const std::vector<double>& x) { return ctl::eval_expr(g.metric(i, j), x); };
      gv(i, j) = f(p);
      for (int s = 0; s < m; ++s) {
        std::vector<int> a(m, 0);
        a[s] = 1;
        dg(s, i, j) = oracle::fd_derivative(f, p, a, 1e-3);
      }
    }
  // Invert by Gauss-Jordan.
  std::vector<double> A(gv.data()), I(m * m, 0.0);
  for (int i = 0; i < m; ++i) I[i * m + i] = 1.0;
  for (int c = 0; c < m; ++c) {
    const double piv = A[c * m + c];
    for (int k = 0; k < m; ++k) {
      A[c * m + k] /= piv;
      I[c * m + k] /= piv;
    }
    for (int r = 0; r < m; ++r)
      if (r != c) {
        const double f = A[r * m + c];
        for (int k = 0; k < m; ++k) {
          A[r * m + k] -= f * A[c * m + k];
          I[r * m + k] -= f * I[c * m + k];
        }
      }
  }
  return ctl::Tensor::generate<3>(m, [&](int l, int j, int k) {
    double s = 0;
    for (int q = 0; q < m; ++q) s += I[l * m + q] * 0.5 * (dg(j, q, k) + dg(k, q, j) - dg(q, j, k));
    return s;
  });
}

}  // namespace fixture

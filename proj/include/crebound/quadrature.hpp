#ifndef CREBOUND_QUADRATURE_HPP
#define CREBOUND_QUADRATURE_HPP

#include <vector>

#include "crebound/geometry.hpp"

namespace crebound {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

/// Quadrature on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
/// Conical-product rule, exact for bivariate polynomials of total degree
/// <= `degree`.
struct TriRule {
  std::vector<Vec2> pts;
  std::vector<double> w;
};
const TriRule& triangle_rule(int degree);

/// Integrates f over an arbitrary (physical) triangle with the given rule
/// degree. f receives physical points.
template <typename F>
double integrate_triangle(const Triangle& t, int degree, F&& f) {
  const TriRule& rule = triangle_rule(degree);
  const Vec2 d1 = t[1] - t[0], d2 = t[2] - t[0];
  const double jac = cross(d1, d2);  // 2*area, signed
  double s = 0.0;
  for (size_t q = 0; q < rule.pts.size(); ++q) {
    const Vec2 x = t[0] + d1 * rule.pts[q].x + d2 * rule.pts[q].y;
    s += rule.w[q] * f(x);
  }
  return s * jac;
}

}  // namespace crebound

#endif

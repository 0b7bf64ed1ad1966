#include <doctest.h>

#include <cmath>

#include "crebound/geometry.hpp"
#include "crebound/quadrature.hpp"

using namespace crebound;

namespace {
// exact integral of x^i y^j over the reference triangle: i! j! / (i+j+2)!
double ref_monomial(int i, int j) {
  auto fact = [](int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return fact(i) * fact(j) / fact(i + j + 2);
}
}  // namespace

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int degree : {1, 2, 3, 4, 5, 6, 7, 8, 10}) {
    const TriRule& r = triangle_rule(degree);
    for (int i = 0; i + 0 <= degree; ++i)
      for (int j = 0; i + j <= degree; ++j) {
        double s = 0;
        for (size_t q = 0; q < r.pts.size(); ++q)
          s += r.w[q] * std::pow(r.pts[q].x, i) * std::pow(r.pts[q].y, j);
        CHECK(s == doctest::Approx(ref_monomial(i, j)).epsilon(1e-12));
      }
  }
}

TEST_CASE("physical triangle integration") {
  const Triangle t{Vec2{1, 1}, Vec2{3, 1.5}, Vec2{1.5, 4}};
  const double area = triangle_area(t);
  CHECK(integrate_triangle(t, 2, [](const Vec2&) { return 1.0; }) ==
        doctest::Approx(area).epsilon(1e-14));
  // centroid property: integral of (x - cx) vanishes
  const Vec2 c = (t[0] + t[1] + t[2]) / 3.0;
  CHECK(integrate_triangle(t, 2, [&](const Vec2& x) { return x.x - c.x; }) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gauss legendre") {
  const GaussRule& g = gauss_legendre(8);
  double s = 0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("polygon clipping") {
  const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  SUBCASE("halfplane") {
    const Polygon half = clip_polygon_halfplane(square, {0.5, 0.0}, {1.0, 0.0});
    CHECK(polygon_area(half) == doctest::Approx(0.5));
  }
  SUBCASE("convex clip") {
    const Polygon tri{{-1, -1}, {2, -1}, {0.5, 2}};
    const Polygon inter = clip_polygon_convex(square, tri);
    CHECK(polygon_area(inter) > 0.0);
    CHECK(polygon_area(inter) <= 1.0 + 1e-14);
  }
  SUBCASE("triangulation preserves area") {
    const Polygon hexish{{0, 0}, {2, 0}, {3, 1}, {2, 2}, {0, 2}};
    double a = 0;
    for (const auto& t : triangulate_convex(hexish)) a += triangle_area(t);
    CHECK(a == doctest::Approx(polygon_area(hexish)).epsilon(1e-14));
  }
}

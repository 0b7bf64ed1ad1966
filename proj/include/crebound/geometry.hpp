#ifndef CREBOUND_GEOMETRY_HPP
#define CREBOUND_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <vector>

namespace crebound {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }

using Triangle = std::array<Vec2, 3>;
using Polygon = std::vector<Vec2>;

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

inline double triangle_area(const Triangle& t) { return signed_area(t[0], t[1], t[2]); }

double polygon_area(const Polygon& p);
Vec2 polygon_centroid(const Polygon& p);

// Keeps the part of `poly` with dot(x - p0, n) <= 0.
Polygon clip_polygon_halfplane(const Polygon& poly, const Vec2& p0, const Vec2& n);

// Clips `poly` against a convex clip polygon given in counterclockwise order.
Polygon clip_polygon_convex(const Polygon& poly, const Polygon& clip);

// Fan triangulation of a convex polygon about its centroid. Degenerate
// slivers (area below `min_area`) are dropped.
std::vector<Triangle> triangulate_convex(const Polygon& p, double min_area = 0.0);

// Distance from point q to the closed triangle t (0 if inside).
double point_triangle_distance(const Vec2& q, const Triangle& t);

}  // namespace crebound

#endif

#include "crebound/geometry.hpp"

#include <algorithm>

namespace crebound {

double polygon_area(const Polygon& p) {
  double a = 0.0;
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) a += cross(p[i], p[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 polygon_centroid(const Polygon& p) {
  const int n = static_cast<int>(p.size());
  double a = 0.0;
  Vec2 c{0, 0};
  for (int i = 0; i < n; ++i) {
    const double w = cross(p[i], p[(i + 1) % n]);
    a += w;
    c += (p[i] + p[(i + 1) % n]) * w;
  }
  if (std::abs(a) < 1e-300) {
    // fall back to vertex mean for degenerate polygons
    Vec2 m{0, 0};
    for (const auto& q : p) m += q;
    return m / static_cast<double>(n);
  }
  return c / (3.0 * a);
}

Polygon clip_polygon_halfplane(const Polygon& poly, const Vec2& p0, const Vec2& n) {
  Polygon out;
  const int m = static_cast<int>(poly.size());
  if (m == 0) return out;
  out.reserve(m + 2);
  for (int i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = dot(a - p0, n);
    const double db = dot(b - p0, n);
    if (da <= 0.0) {
      out.push_back(a);
      if (db > 0.0) {
        const double t = da / (da - db);
        out.push_back(a + (b - a) * t);
      }
    } else if (db <= 0.0) {
      const double t = da / (da - db);
      out.push_back(a + (b - a) * t);
    }
  }
  return out;
}

Polygon clip_polygon_convex(const Polygon& poly, const Polygon& clip) {
  Polygon cur = poly;
  const int n = static_cast<int>(clip.size());
  for (int i = 0; i < n && !cur.empty(); ++i) {
    const Vec2& a = clip[i];
    const Vec2& b = clip[(i + 1) % n];
    // keep the left side of a->b (ccw clip polygon): dot(x-a, inward_normal) >= 0
    const Vec2 outward = -rot90(b - a);  // points to the right of a->b
    cur = clip_polygon_halfplane(cur, a, outward);
  }
  return cur;
}

std::vector<Triangle> triangulate_convex(const Polygon& p, double min_area) {
  std::vector<Triangle> tris;
  if (p.size() < 3) return tris;
  const Vec2 c = polygon_centroid(p);
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    Triangle t{c, p[i], p[(i + 1) % n]};
    if (std::abs(triangle_area(t)) > min_area) tris.push_back(t);
  }
  return tris;
}

namespace {
double point_segment_distance(const Vec2& q, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(q - (a + ab * t));
}
}  // namespace

double point_triangle_distance(const Vec2& q, const Triangle& t) {
  const double s0 = cross(t[1] - t[0], q - t[0]);
  const double s1 = cross(t[2] - t[1], q - t[1]);
  const double s2 = cross(t[0] - t[2], q - t[2]);
  if (s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0) return 0.0;
  return std::min({point_segment_distance(q, t[0], t[1]),
                   point_segment_distance(q, t[1], t[2]),
                   point_segment_distance(q, t[2], t[0])});
}

}  // namespace crebound

#include "crebound/mesh_gen.hpp"

#include <cmath>
#include <numbers>

namespace crebound {

namespace {
constexpr double kPi = std::numbers::pi;
}

TriMesh rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };

  std::vector<std::array<int, 3>> elements;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      elements.push_back({a, b, c});
      elements.push_back({a, c, d});
    }

  std::vector<BoundaryEdge> boundary;
  for (int i = 0; i < nx; ++i) {
    boundary.push_back({id(i, 0), id(i + 1, 0), "bottom"});
    boundary.push_back({id(i, ny), id(i + 1, ny), "top"});
  }
  for (int j = 0; j < ny; ++j) {
    boundary.push_back({id(0, j), id(0, j + 1), "left"});
    boundary.push_back({id(nx, j), id(nx, j + 1), "right"});
  }
  return TriMesh(std::move(nodes), std::move(elements), std::move(boundary));
}

TriMesh annulus_mesh(double r_inner, double r_outer, int n_theta, int n_r) {
  std::vector<Vec2> nodes;
  auto id = [&](int ring, int j) { return ring * n_theta + (j % n_theta); };
  for (int ring = 0; ring <= n_r; ++ring) {
    const double r = r_inner + (r_outer - r_inner) * ring / n_r;
    for (int j = 0; j < n_theta; ++j) {
      const double t = 2.0 * kPi * j / n_theta;
      nodes.emplace_back(r * std::cos(t), r * std::sin(t));
    }
  }
  std::vector<std::array<int, 3>> elements;
  for (int ring = 0; ring < n_r; ++ring)
    for (int j = 0; j < n_theta; ++j) {
      const int a = id(ring, j), b = id(ring, j + 1);
      const int c = id(ring + 1, j + 1), d = id(ring + 1, j);
      elements.push_back({a, d, c});
      elements.push_back({a, c, b});
    }
  std::vector<BoundaryEdge> boundary;
  for (int j = 0; j < n_theta; ++j) {
    boundary.push_back({id(0, j), id(0, j + 1), "inner"});
    boundary.push_back({id(n_r, j), id(n_r, j + 1), "outer"});
  }
  return TriMesh(std::move(nodes), std::move(elements), std::move(boundary));
}

TriMesh disc_mesh(double radius, int n_theta, int n_r) {
  std::vector<Vec2> nodes;
  nodes.emplace_back(0.0, 0.0);
  auto id = [&](int ring, int j) { return 1 + (ring - 1) * n_theta + (j % n_theta); };
  for (int ring = 1; ring <= n_r; ++ring) {
    const double r = radius * ring / n_r;
    for (int j = 0; j < n_theta; ++j) {
      const double t = 2.0 * kPi * j / n_theta;
      nodes.emplace_back(r * std::cos(t), r * std::sin(t));
    }
  }
  std::vector<std::array<int, 3>> elements;
  for (int j = 0; j < n_theta; ++j) elements.push_back({0, id(1, j), id(1, j + 1)});
  for (int ring = 1; ring < n_r; ++ring)
    for (int j = 0; j < n_theta; ++j) {
      const int a = id(ring, j), b = id(ring, j + 1);
      const int c = id(ring + 1, j + 1), d = id(ring + 1, j);
      elements.push_back({a, d, c});
      elements.push_back({a, c, b});
    }
  std::vector<BoundaryEdge> boundary;
  for (int j = 0; j < n_theta; ++j)
    boundary.push_back({id(n_r, j), id(n_r, j + 1), "outer"});
  return TriMesh(std::move(nodes), std::move(elements), std::move(boundary));
}

namespace {

// Shared builder for slit polar meshes. Angles run from -pi to +pi; the two
// seam rays carry distinct nodes. with_tip adds the single center node and a
// fan of elements around it.
TriMesh slit_polar_mesh(double r_inner, double r_outer, int n_theta, int n_r, bool with_tip) {
  std::vector<Vec2> nodes;
  const int ring0 = with_tip ? 1 : 0;
  if (with_tip) nodes.emplace_back(0.0, 0.0);
  const int per_ring = n_theta + 1;  // j = 0..n_theta, seam duplicated
  auto id = [&](int ring, int j) {
    return (with_tip ? 1 : 0) + (ring - ring0) * per_ring + j;
  };
  const int last_ring = n_r;
  for (int ring = ring0; ring <= last_ring; ++ring) {
    const double r = with_tip ? r_outer * ring / n_r
                              : r_inner + (r_outer - r_inner) * ring / n_r;
    for (int j = 0; j <= n_theta; ++j) {
      const double t = -kPi + 2.0 * kPi * j / n_theta;
      nodes.emplace_back(r * std::cos(t), r * std::sin(t));
    }
  }
  std::vector<std::array<int, 3>> elements;
  if (with_tip)
    for (int j = 0; j < n_theta; ++j) elements.push_back({0, id(1, j), id(1, j + 1)});
  for (int ring = ring0; ring < last_ring; ++ring)
    for (int j = 0; j < n_theta; ++j) {
      const int a = id(ring, j), b = id(ring, j + 1);
      const int c = id(ring + 1, j + 1), d = id(ring + 1, j);
      elements.push_back({a, d, c});
      elements.push_back({a, c, b});
    }
  std::vector<BoundaryEdge> boundary;
  for (int j = 0; j < n_theta; ++j)
    boundary.push_back({id(last_ring, j), id(last_ring, j + 1), "outer"});
  if (!with_tip)
    for (int j = 0; j < n_theta; ++j)
      boundary.push_back({id(ring0, j), id(ring0, j + 1), "inner"});
  // slit lips: j = 0 is approached from y < 0, j = n_theta from y > 0
  if (with_tip) {
    boundary.push_back({0, id(1, 0), "lip_down"});
    boundary.push_back({0, id(1, n_theta), "lip_up"});
  }
  for (int ring = ring0; ring < last_ring; ++ring) {
    boundary.push_back({id(ring, 0), id(ring + 1, 0), "lip_down"});
    boundary.push_back({id(ring, n_theta), id(ring + 1, n_theta), "lip_up"});
  }
  return TriMesh(std::move(nodes), std::move(elements), std::move(boundary));
}

}  // namespace

TriMesh cracked_disc_mesh(double radius, int n_theta, int n_r) {
  return slit_polar_mesh(0.0, radius, n_theta, n_r, true);
}

TriMesh cracked_annulus_mesh(double r_inner, double r_outer, int n_theta, int n_r) {
  return slit_polar_mesh(r_inner, r_outer, n_theta, n_r, false);
}

TriMesh lshape_mesh(int n) {
  const int nx = 2 * n, ny = 2 * n;
  const double h = 1.0 / n;
  // node ids on the full grid, -1 where absent
  std::vector<int> ids(static_cast<size_t>(nx + 1) * (ny + 1), -1);
  auto gi = [&](int i, int j) -> int& { return ids[static_cast<size_t>(j) * (nx + 1) + i]; };
  std::vector<Vec2> nodes;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (i > n && j > n) continue;  // removed quadrant
      gi(i, j) = static_cast<int>(nodes.size());
      nodes.emplace_back(i * h, j * h);
    }
  std::vector<std::array<int, 3>> elements;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i >= n && j >= n) continue;
      const int a = gi(i, j), b = gi(i + 1, j), c = gi(i + 1, j + 1), d = gi(i, j + 1);
      elements.push_back({a, b, c});
      elements.push_back({a, c, d});
    }
  std::vector<BoundaryEdge> boundary;
  for (int i = 0; i < nx; ++i) boundary.push_back({gi(i, 0), gi(i + 1, 0), "bottom"});
  for (int j = 0; j < ny; ++j) boundary.push_back({gi(0, j), gi(0, j + 1), "left"});
  for (int j = 0; j < n; ++j) boundary.push_back({gi(nx, j), gi(nx, j + 1), "right"});
  for (int i = 0; i < n; ++i) boundary.push_back({gi(i, ny), gi(i + 1, ny), "top"});
  for (int j = n; j < ny; ++j) boundary.push_back({gi(n, j), gi(n, j + 1), "notch_v"});
  for (int i = n; i < nx; ++i) boundary.push_back({gi(i, n), gi(i + 1, n), "notch_h"});
  return TriMesh(std::move(nodes), std::move(elements), std::move(boundary));
}

}  // namespace crebound

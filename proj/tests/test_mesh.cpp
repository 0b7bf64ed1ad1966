#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "crebound/mesh.hpp"
#include "crebound/mesh_gen.hpp"

using namespace crebound;

namespace {

std::string write_temp(const std::string& content) {
  static int counter = 0;
  std::string path = "test_mesh_tmp_" + std::to_string(counter++) + ".msh";
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("single triangle file") {
  const auto path = write_temp(
      "trimesh 2d\n"
      "nodes 3\n"
      "0 0\n1 0\n0 1\n"
      "elements 1\n"
      "0 1 2\n"
      "boundary 3\n"
      "0 1 bottom\n1 2 hyp\n2 0 left\n");
  const TriMesh m = load_mesh(path);
  CHECK(m.num_elements() == 1);
  CHECK(m.element_area(0) == doctest::Approx(0.5));
  std::remove(path.c_str());
}

TEST_CASE("unit square two triangles") {
  const auto path = write_temp(
      "trimesh 2d\n"
      "# a comment\n"
      "nodes 4\n"
      "0 0\n1 0\n1 1\n0 1\n"
      "elements 2\n"
      "0 1 2\n0 2 3\n"
      "boundary 4\n"
      "0 1 bottom\n1 2 right\n2 3 top\n3 0 left\n");
  const TriMesh m = load_mesh(path);
  CHECK(m.num_elements() == 2);
  CHECK(m.boundary_edges().size() == 4);
  CHECK(m.total_area() == doctest::Approx(1.0));
  std::remove(path.c_str());
}

TEST_CASE("clockwise element rejected") {
  const auto path = write_temp(
      "trimesh 2d\n"
      "nodes 3\n"
      "0 0\n1 0\n0 1\n"
      "elements 1\n"
      "0 2 1\n"
      "boundary 3\n"
      "0 1 a\n1 2 b\n2 0 c\n");
  CHECK_THROWS_AS(load_mesh(path), TopologyError);
  std::remove(path.c_str());
}

TEST_CASE("parse error carries line number") {
  const auto path = write_temp(
      "trimesh 2d\n"
      "nodes 2\n"
      "0 0\n"
      "oops\n");
  try {
    load_mesh(path);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("uniform refinement counts and area") {
  const TriMesh m = unit_square_mesh(1);
  REQUIRE(m.num_elements() == 2);
  const TriMesh r1 = refine_uniform(m, 1);
  CHECK(r1.num_elements() == 8);
  const TriMesh r4 = refine_uniform(m, 4);
  CHECK(r4.num_elements() == 512);  // 256 descendants per parent
  CHECK(r4.total_area() == doctest::Approx(m.total_area()).epsilon(1e-14));

  // tags inherited and cover the same boundary
  double blen = 0, blen4 = 0;
  for (const auto& be : m.boundary_edges()) blen += norm(m.node(be.b) - m.node(be.a));
  for (const auto& be : r4.boundary_edges()) blen4 += norm(r4.node(be.b) - r4.node(be.a));
  CHECK(blen4 == doctest::Approx(blen).epsilon(1e-14));

  // lineage: every child knows its root element
  for (int e = 0; e < r4.num_elements(); ++e) {
    const int anc = r4.ancestor(e);
    CHECK(anc >= 0);
    CHECK(anc < m.num_elements());
  }
}

TEST_CASE("locate_point basics") {
  const TriMesh m = unit_square_mesh(2);

  SUBCASE("centroid of element 0") {
    const auto loc = m.locate_point(m.centroid(0));
    REQUIRE(loc.found);
    CHECK(loc.element == 0);
    CHECK(loc.bary[0] == doctest::Approx(1.0 / 3.0));
    CHECK(loc.bary[1] == doctest::Approx(1.0 / 3.0));
    CHECK(loc.bary[2] == doctest::Approx(1.0 / 3.0));
  }

  SUBCASE("shared edge midpoint goes to the lower element index") {
    // elements 0 and 1 share the diagonal of the first cell
    const Vec2 mid = (m.node(m.element(0)[0]) + m.node(m.element(0)[2])) * 0.5;
    const auto loc = m.locate_point(mid);
    REQUIRE(loc.found);
    const auto loc2 = m.locate_point(mid);
    CHECK(loc.element == loc2.element);  // deterministic
    // the located element must be the smallest index whose closure holds mid
    for (int e = 0; e < loc.element; ++e) {
      const auto t = m.element_triangle(e);
      CHECK(point_triangle_distance(mid, t) > 1e-12);
    }
  }

  SUBCASE("far point not found") {
    CHECK_FALSE(m.locate_point({10.0, 10.0}).found);
  }
}

TEST_CASE("locate agrees between parent and child mesh") {
  const TriMesh m = unit_square_mesh(2);
  const TriMesh r = refine_uniform(m, 1);
  const Vec2 p{0.37, 0.61};
  const auto lc = m.locate_point(p);
  const auto lf = r.locate_point(p);
  REQUIRE(lc.found);
  REQUIRE(lf.found);
  // both closures contain p
  CHECK(point_triangle_distance(p, m.element_triangle(lc.element)) <= 1e-12);
  CHECK(point_triangle_distance(p, r.element_triangle(lf.element)) <= 1e-12);
}

TEST_CASE("boundary coverage enforced") {
  // missing hull edge
  std::vector<Vec2> nodes{{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::array<int, 3>> elems{{0, 1, 2}};
  std::vector<BoundaryEdge> bedges{{0, 1, "a"}, {1, 2, "b"}};
  CHECK_THROWS_AS(TriMesh(nodes, elems, bedges), TopologyError);
}

TEST_CASE("mesh save/load round trip") {
  const TriMesh m = lshape_mesh(2);
  save_mesh(m, "test_mesh_rt.msh");
  const TriMesh m2 = load_mesh("test_mesh_rt.msh");
  CHECK(m2.num_elements() == m.num_elements());
  CHECK(m2.total_area() == doctest::Approx(m.total_area()).epsilon(1e-15));
  std::remove("test_mesh_rt.msh");
}

TEST_CASE("generators produce valid meshes") {
  CHECK(annulus_mesh(0.5, 1.0, 24, 4).total_area() > 0);
  CHECK(disc_mesh(1.0, 24, 4).total_area() > 0);
  CHECK(cracked_disc_mesh(1.0, 24, 4).total_area() > 0);
  CHECK(cracked_annulus_mesh(0.5, 1.0, 24, 4).total_area() > 0);
  CHECK(lshape_mesh(4).total_area() == doctest::Approx(3.0));
}

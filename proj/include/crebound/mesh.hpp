#ifndef CREBOUND_MESH_HPP
#define CREBOUND_MESH_HPP

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crebound/geometry.hpp"

namespace crebound {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  std::string tag;
};

/// Immutable 3-node triangle mesh with tagged boundary edges.
///
/// Elements are stored counterclockwise; construction rejects degenerate or
/// inverted triangles and boundary edges that do not lie on the one-sided
/// hull of the element set. A mesh produced by refine_uniform remembers, for
/// each element, the element of the root mesh it descends from.
class TriMesh {
 public:
  TriMesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> elements,
          std::vector<BoundaryEdge> boundary,
          std::vector<std::string> region_tags = {});

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  const Vec2& node(int i) const { return nodes_[i]; }
  const std::array<int, 3>& element(int e) const { return elements_[e]; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const std::string& region_tag(int e) const { return region_tags_[e]; }

  double element_area(int e) const { return areas_[e]; }
  double total_area() const { return total_area_; }
  double diameter() const { return diameter_; }
  Vec2 centroid(int e) const;
  Triangle element_triangle(int e) const;
  double element_size(int e) const;  // longest edge

  /// Index of the root-mesh element this element descends from
  /// (identity when the mesh was not produced by refinement).
  int ancestor(int e) const { return ancestor_.empty() ? e : ancestor_[e]; }
  int refinement_levels() const { return levels_; }

  struct Location {
    bool found = false;
    int element = -1;
    std::array<double, 3> bary{0, 0, 0};
  };
  /// Containing element and barycentric coordinates; ties on shared edges go
  /// to the lowest element index. Points farther than 1e-12 * diameter from
  /// every element are reported as not found.
  Location locate_point(const Vec2& p) const;

  friend TriMesh refine_uniform(const TriMesh& mesh, int levels);

 private:
  void validate() const;
  void build_search_grid() const;

  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<std::string> region_tags_;
  std::vector<double> areas_;
  std::vector<int> ancestor_;
  int levels_ = 0;
  double total_area_ = 0.0;
  double diameter_ = 0.0;

  // point-location acceleration
  mutable bool grid_built_ = false;
  mutable int grid_nx_ = 0, grid_ny_ = 0;
  mutable Vec2 grid_lo_, grid_hi_;
  mutable std::vector<std::vector<int>> grid_cells_;
};

TriMesh load_mesh(const std::string& path);
void save_mesh(const TriMesh& mesh, const std::string& path);

/// Splits every triangle into 4 congruent children `levels` times. Boundary
/// tags and region tags are inherited; total area is preserved exactly.
TriMesh refine_uniform(const TriMesh& mesh, int levels);

/// Edge connectivity derived from a mesh: every undirected element edge with
/// its one or two adjacent elements, in a deterministic order.
struct MeshEdges {
  struct Edge {
    int a = -1, b = -1;        // node indices, a < b
    int elem_plus = -1;        // element for which (a,b) is ccw-oriented... see note
    int elem_minus = -1;       // second adjacent element, -1 on the boundary
    int boundary_index = -1;   // index into mesh.boundary_edges(), -1 if interior
    double length = 0.0;
    Vec2 normal;               // unit normal, outward for elem_plus
  };
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> element_edges;  // per element: edge ids opposite local vertex k
  std::map<std::pair<int, int>, int> index;       // (min,max) node pair -> edge id
};

MeshEdges build_edges(const TriMesh& mesh);

}  // namespace crebound

#endif

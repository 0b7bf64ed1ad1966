#include "crebound/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace crebound {

TriMesh::TriMesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> elements,
                 std::vector<BoundaryEdge> boundary, std::vector<std::string> region_tags)
    : nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)),
      region_tags_(std::move(region_tags)) {
  if (region_tags_.empty()) region_tags_.resize(elements_.size());
  if (region_tags_.size() != elements_.size())
    throw TopologyError("region tag list does not match element count");
  validate();
}

void TriMesh::validate() const {
  auto& self = const_cast<TriMesh&>(*this);
  if (nodes_.empty() || elements_.empty()) throw TopologyError("mesh has no nodes or no elements");

  Vec2 lo = nodes_[0], hi = nodes_[0];
  for (const auto& p : nodes_) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  self.diameter_ = norm(hi - lo);
  const double area_tol = 1e-14 * diameter_ * diameter_;

  self.areas_.resize(elements_.size());
  self.total_area_ = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int v = elements_[e][k];
      if (v < 0 || v >= num_nodes())
        throw TopologyError("element " + std::to_string(e) + " references invalid node " +
                            std::to_string(v));
    }
    const double a =
        signed_area(nodes_[elements_[e][0]], nodes_[elements_[e][1]], nodes_[elements_[e][2]]);
    if (a <= area_tol)
      throw TopologyError("element " + std::to_string(e) +
                          " is degenerate or clockwise (signed area " + std::to_string(a) + ")");
    self.areas_[e] = a;
    self.total_area_ += a;
  }

  // Every one-sided element edge must appear exactly once in the boundary
  // list, and every listed boundary edge must be a one-sided element edge.
  std::map<std::pair<int, int>, int> side_count;
  for (const auto& el : elements_)
    for (int k = 0; k < 3; ++k) {
      const int a = el[k], b = el[(k + 1) % 3];
      side_count[{std::min(a, b), std::max(a, b)}]++;
    }
  std::set<std::pair<int, int>> listed;
  for (const auto& be : boundary_) {
    const auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    auto it = side_count.find(key);
    if (it == side_count.end())
      throw TopologyError("boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                          ") is not an element edge");
    if (it->second != 1)
      throw TopologyError("boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                          ") is shared by " + std::to_string(it->second) + " elements");
    if (!listed.insert(key).second)
      throw TopologyError("boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                          ") listed twice");
    if (be.tag.empty())
      throw TopologyError("boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                          ") has an empty tag");
  }
  for (const auto& [key, count] : side_count)
    if (count == 1 && !listed.count(key))
      throw TopologyError("hull edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ") missing from the boundary list");
}

Vec2 TriMesh::centroid(int e) const {
  const auto& el = elements_[e];
  return (nodes_[el[0]] + nodes_[el[1]] + nodes_[el[2]]) / 3.0;
}

Triangle TriMesh::element_triangle(int e) const {
  const auto& el = elements_[e];
  return {nodes_[el[0]], nodes_[el[1]], nodes_[el[2]]};
}

double TriMesh::element_size(int e) const {
  const auto t = element_triangle(e);
  return std::max({norm(t[1] - t[0]), norm(t[2] - t[1]), norm(t[0] - t[2])});
}

void TriMesh::build_search_grid() const {
  grid_lo_ = grid_hi_ = nodes_[0];
  for (const auto& p : nodes_) {
    grid_lo_.x = std::min(grid_lo_.x, p.x);
    grid_lo_.y = std::min(grid_lo_.y, p.y);
    grid_hi_.x = std::max(grid_hi_.x, p.x);
    grid_hi_.y = std::max(grid_hi_.y, p.y);
  }
  const int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(num_elements()))));
  grid_nx_ = grid_ny_ = n;
  grid_cells_.assign(static_cast<size_t>(n) * n, {});
  const double dx = (grid_hi_.x - grid_lo_.x) / n;
  const double dy = (grid_hi_.y - grid_lo_.y) / n;
  auto cell_of = [&](double v, double lo, double d) {
    if (d <= 0) return 0;
    return std::clamp(static_cast<int>((v - lo) / d), 0, n - 1);
  };
  for (int e = 0; e < num_elements(); ++e) {
    const auto t = element_triangle(e);
    double x0 = std::min({t[0].x, t[1].x, t[2].x}), x1 = std::max({t[0].x, t[1].x, t[2].x});
    double y0 = std::min({t[0].y, t[1].y, t[2].y}), y1 = std::max({t[0].y, t[1].y, t[2].y});
    const int i0 = cell_of(x0, grid_lo_.x, dx), i1 = cell_of(x1, grid_lo_.x, dx);
    const int j0 = cell_of(y0, grid_lo_.y, dy), j1 = cell_of(y1, grid_lo_.y, dy);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) grid_cells_[static_cast<size_t>(j) * n + i].push_back(e);
  }
  grid_built_ = true;
}

TriMesh::Location TriMesh::locate_point(const Vec2& p) const {
  if (!grid_built_) build_search_grid();
  const double tol = 1e-12 * diameter_;

  std::vector<int> candidates;
  const double dx = (grid_hi_.x - grid_lo_.x) / grid_nx_;
  const double dy = (grid_hi_.y - grid_lo_.y) / grid_ny_;
  auto cell_of = [&](double v, double lo, double d, int n) {
    if (d <= 0) return 0;
    return std::clamp(static_cast<int>((v - lo) / d), 0, n - 1);
  };
  if (p.x >= grid_lo_.x - tol && p.x <= grid_hi_.x + tol && p.y >= grid_lo_.y - tol &&
      p.y <= grid_hi_.y + tol) {
    const int ci = cell_of(p.x, grid_lo_.x, dx, grid_nx_);
    const int cj = cell_of(p.y, grid_lo_.y, dy, grid_ny_);
    for (int j = std::max(0, cj - 1); j <= std::min(grid_ny_ - 1, cj + 1); ++j)
      for (int i = std::max(0, ci - 1); i <= std::min(grid_nx_ - 1, ci + 1); ++i)
        for (int e : grid_cells_[static_cast<size_t>(j) * grid_nx_ + i]) candidates.push_back(e);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto try_element = [&](int e, double slack, Location& loc) {
    const auto t = element_triangle(e);
    const double a = areas_[e];
    const double b0 = signed_area(p, t[1], t[2]) / a;
    const double b1 = signed_area(t[0], p, t[2]) / a;
    const double b2 = signed_area(t[0], t[1], p) / a;
    if (b0 >= -slack && b1 >= -slack && b2 >= -slack) {
      loc.found = true;
      loc.element = e;
      loc.bary = {b0, b1, b2};
      return true;
    }
    return false;
  };

  Location loc;
  // lowest element index wins ties: candidates are sorted ascending
  for (int e : candidates) {
    const double slack = tol * element_size(e) / (2.0 * areas_[e] / element_size(e));
    if (try_element(e, std::max(slack, 1e-14), loc)) return loc;
  }
  // fallback linear scan (robust for points near the grid fringe)
  for (int e = 0; e < num_elements(); ++e) {
    const double slack = tol * element_size(e) / (2.0 * areas_[e] / element_size(e));
    if (try_element(e, std::max(slack, 1e-14), loc)) return loc;
  }
  return loc;
}

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;
  bool next(std::istringstream& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto h = line.find('#');
      if (h != std::string::npos) line = line.substr(0, h);
      std::istringstream ss(line);
      std::string tok;
      if (ss >> tok) {
        out = std::istringstream(line);
        return true;
      }
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("mesh parse error at line " + std::to_string(line_no) + ": " + msg);
  }
};

}  // namespace

TriMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  LineReader r{in};
  std::istringstream ss;

  if (!r.next(ss)) r.fail("empty file");
  std::string word, dim;
  ss >> word >> dim;
  if (word != "trimesh" || dim != "2d") r.fail("expected header 'trimesh 2d'");

  if (!r.next(ss)) r.fail("expected 'nodes N'");
  int n = 0;
  ss >> word >> n;
  if (word != "nodes" || n <= 0) r.fail("expected 'nodes N' with N > 0");
  std::vector<Vec2> nodes(n);
  for (int i = 0; i < n; ++i) {
    if (!r.next(ss)) r.fail("expected node coordinates");
    if (!(ss >> nodes[i].x >> nodes[i].y)) r.fail("malformed node line");
  }

  if (!r.next(ss)) r.fail("expected 'elements M'");
  int m = 0;
  ss >> word >> m;
  if (word != "elements" || m <= 0) r.fail("expected 'elements M' with M > 0");
  std::vector<std::array<int, 3>> elements(m);
  std::vector<std::string> regions(m);
  for (int e = 0; e < m; ++e) {
    if (!r.next(ss)) r.fail("expected element node indices");
    if (!(ss >> elements[e][0] >> elements[e][1] >> elements[e][2])) r.fail("malformed element line");
    ss >> regions[e];  // optional region tag
  }

  if (!r.next(ss)) r.fail("expected 'boundary B'");
  int b = 0;
  ss >> word >> b;
  if (word != "boundary" || b < 0) r.fail("expected 'boundary B'");
  std::vector<BoundaryEdge> boundary(b);
  for (int i = 0; i < b; ++i) {
    if (!r.next(ss)) r.fail("expected boundary edge");
    if (!(ss >> boundary[i].a >> boundary[i].b >> boundary[i].tag)) r.fail("malformed boundary line");
  }

  return TriMesh(std::move(nodes), std::move(elements), std::move(boundary), std::move(regions));
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write mesh file: " + path);
  out.precision(17);
  out << "trimesh 2d\n";
  out << "nodes " << mesh.num_nodes() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    out << mesh.node(i).x << " " << mesh.node(i).y << "\n";
  out << "elements " << mesh.num_elements() << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    out << el[0] << " " << el[1] << " " << el[2];
    if (!mesh.region_tag(e).empty()) out << " " << mesh.region_tag(e);
    out << "\n";
  }
  out << "boundary " << mesh.boundary_edges().size() << "\n";
  for (const auto& be : mesh.boundary_edges()) out << be.a << " " << be.b << " " << be.tag << "\n";
}

TriMesh refine_uniform(const TriMesh& mesh, int levels) {
  if (levels < 1) throw std::invalid_argument("refine_uniform: levels must be >= 1");
  const TriMesh* cur = &mesh;
  TriMesh result = mesh;  // placeholder; replaced below
  for (int lvl = 0; lvl < levels; ++lvl) {
    std::vector<Vec2> nodes(cur->nodes_);
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int id = static_cast<int>(nodes.size());
      nodes.push_back((cur->nodes_[a] + cur->nodes_[b]) * 0.5);
      midpoint.emplace(key, id);
      return id;
    };

    std::vector<std::array<int, 3>> elements;
    std::vector<std::string> regions;
    std::vector<int> ancestors;
    elements.reserve(cur->elements_.size() * 4);
    for (int e = 0; e < cur->num_elements(); ++e) {
      const auto& el = cur->elements_[e];
      const int mab = mid(el[0], el[1]);
      const int mbc = mid(el[1], el[2]);
      const int mca = mid(el[2], el[0]);
      const std::array<std::array<int, 3>, 4> children = {{{el[0], mab, mca},
                                                           {mab, el[1], mbc},
                                                           {mca, mbc, el[2]},
                                                           {mab, mbc, mca}}};
      const int root = cur->ancestor(e);
      for (const auto& c : children) {
        elements.push_back(c);
        regions.push_back(cur->region_tags_[e]);
        ancestors.push_back(root);
      }
    }

    std::vector<BoundaryEdge> boundary;
    boundary.reserve(cur->boundary_.size() * 2);
    for (const auto& be : cur->boundary_) {
      const int m = mid(be.a, be.b);
      boundary.push_back({be.a, m, be.tag});
      boundary.push_back({m, be.b, be.tag});
    }

    TriMesh next(std::move(nodes), std::move(elements), std::move(boundary), std::move(regions));
    next.ancestor_ = std::move(ancestors);
    next.levels_ = cur->levels_ + 1;
    result = std::move(next);
    cur = &result;
  }
  return result;
}

MeshEdges build_edges(const TriMesh& mesh) {
  MeshEdges out;
  out.element_edges.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    for (int k = 0; k < 3; ++k) {
      // edge opposite local vertex k connects vertices k+1, k+2
      const int a = el[(k + 1) % 3], b = el[(k + 2) % 3];
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = out.index.find(key);
      if (it == out.index.end()) {
        MeshEdges::Edge ed;
        ed.a = key.first;
        ed.b = key.second;
        ed.elem_plus = e;
        const Vec2 t = mesh.node(ed.b) - mesh.node(ed.a);
        ed.length = norm(t);
        // outward for elem_plus: normal opposite the third vertex
        Vec2 n = rot90(t) / ed.length;
        const Vec2 other = mesh.node(el[k]);
        if (dot(other - mesh.node(ed.a), n) > 0) n = -n;
        ed.normal = n;
        const int id = static_cast<int>(out.edges.size());
        out.edges.push_back(ed);
        out.index.emplace(key, id);
        out.element_edges[e][k] = id;
      } else {
        auto& ed = out.edges[it->second];
        if (ed.elem_minus != -1)
          throw TopologyError("edge (" + std::to_string(ed.a) + "," + std::to_string(ed.b) +
                              ") shared by more than two elements");
        ed.elem_minus = e;
        out.element_edges[e][k] = it->second;
      }
    }
  }
  for (size_t i = 0; i < mesh.boundary_edges().size(); ++i) {
    const auto& be = mesh.boundary_edges()[i];
    const auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    out.edges[out.index.at(key)].boundary_index = static_cast<int>(i);
  }
  return out;
}

}  // namespace crebound

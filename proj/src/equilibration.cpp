#include "crebound/equilibration.hpp"

#include <algorithm>
#include <cmath>

#include "crebound/quadrature.hpp"

namespace crebound {

namespace {

// ---------------------------------------------------------------------------
// Reference-element machinery for the local solves.
//
// The element is mapped to the reference triangle (0,0),(1,0),(0,1) with
// x = x0 + B xi; the stress is represented through the Piola transform
// sigma(x) = (1/J) B Sigma(xi) B^T, which maps equilibrated reference fields
// to equilibrated physical fields. The constraint matrix (interior
// equilibrium, interior traction continuity across the centroid split, outer
// traction matching) is therefore element-independent and factorized once.
// ---------------------------------------------------------------------------

constexpr int kNumMono3 = 10;  // monomials of total degree <= 3
constexpr int kNumMono2 = 6;
constexpr int kCols = 90;   // 3 subtriangles x 3 components x 10 coefficients
constexpr int kRows = 84;   // 36 divergence + 24 continuity + 24 outer traction

const std::array<std::pair<int, int>, kNumMono3> kExps = {{{0, 0},
                                                           {1, 0},
                                                           {0, 1},
                                                           {2, 0},
                                                           {1, 1},
                                                           {0, 2},
                                                           {3, 0},
                                                           {2, 1},
                                                           {1, 2},
                                                           {0, 3}}};

int mono_index(int i, int j) {
  for (int a = 0; a < kNumMono3; ++a)
    if (kExps[a].first == i && kExps[a].second == j) return a;
  return -1;
}

double mono_eval(int a, const Vec2& xi) {
  return std::pow(xi.x, kExps[a].first) * std::pow(xi.y, kExps[a].second);
}

// coefficients of m_a(P0 + t D) as a cubic in t
std::array<double, 4> mono_on_segment(int a, const Vec2& p0, const Vec2& d) {
  const int i = kExps[a].first, j = kExps[a].second;
  auto binom_pow = [](double c0, double c1, int n) {
    // coefficients of (c0 + c1 t)^n, n <= 3
    std::array<double, 4> out{0, 0, 0, 0};
    const double bin[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int k = 0; k <= n; ++k) out[k] = bin[n][k] * std::pow(c0, n - k) * std::pow(c1, k);
    return out;
  };
  const auto px = binom_pow(p0.x, d.x, i);
  const auto py = binom_pow(p0.y, d.y, j);
  std::array<double, 4> out{0, 0, 0, 0};
  for (int k = 0; k <= i; ++k)
    for (int l = 0; l <= j && k + l < 4; ++l) out[k + l] += px[k] * py[l];
  return out;
}

struct LocalSolverRef {
  Eigen::MatrixXd A;  // kRows x kCols
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd kernel;  // kCols x n0
  std::array<Eigen::Matrix<double, kNumMono3, kNumMono3>, 3> mass;
  std::array<Eigen::Matrix<double, kNumMono3, 1>, 3> moments;  // integral of monomials
  std::array<Triangle, 3> sub;                                 // reference subtriangles
  std::array<Vec2, 3> outer_normal;                            // unit outward normals
  std::array<double, 3> outer_ref_length;
};

int col_of(int sub, int comp, int mono) { return 30 * sub + 10 * comp + mono; }

LocalSolverRef build_local_solver() {
  LocalSolverRef R;
  const std::array<Vec2, 3> V = {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
  const Vec2 G{1.0 / 3.0, 1.0 / 3.0};
  for (int s = 0; s < 3; ++s) R.sub[s] = Triangle{V[s], V[(s + 1) % 3], G};
  R.outer_normal = {Vec2{0, -1}, Vec2{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, Vec2{-1, 0}};
  R.outer_ref_length = {1.0, std::sqrt(2.0), 1.0};

  R.A = Eigen::MatrixXd::Zero(kRows, kCols);
  int row = 0;

  // interior equilibrium: div Sigma = const, enforced coefficientwise in P2
  for (int s = 0; s < 3; ++s) {
    for (int comp = 0; comp < 2; ++comp) {  // div component (x then y)
      for (int q = 0; q < kNumMono2; ++q) {
        // d/dxi of component c1 plus d/deta of component c2
        const int c1 = (comp == 0) ? 0 : 2;  // xx or xy
        const int c2 = (comp == 0) ? 2 : 1;  // xy or yy
        for (int a = 0; a < kNumMono3; ++a) {
          const int i = kExps[a].first, j = kExps[a].second;
          if (i >= 1 && mono_index(i - 1, j) == q) R.A(row, col_of(s, c1, a)) += i;
          if (j >= 1 && mono_index(i, j - 1) == q) R.A(row, col_of(s, c2, a)) += j;
        }
        ++row;
      }
    }
  }

  // traction continuity across the interior edges V_i -> G
  for (int i = 0; i < 3; ++i) {
    const int s_a = i;                // sub (V_i, V_{i+1}, G)
    const int s_b = (i + 2) % 3;      // sub (V_{i-1}, V_i, G)
    const Vec2 d = G - V[i];
    Vec2 n = rot90(d);
    n = n / norm(n);
    for (int comp = 0; comp < 2; ++comp) {
      const int cA = (comp == 0) ? 0 : 2;  // xx or xy
      const int cB = (comp == 0) ? 2 : 1;  // xy or yy
      for (int k = 0; k < 4; ++k) {
        for (int a = 0; a < kNumMono3; ++a) {
          const auto tc = mono_on_segment(a, V[i], d);
          R.A(row, col_of(s_a, cA, a)) += n.x * tc[k];
          R.A(row, col_of(s_a, cB, a)) += n.y * tc[k];
          R.A(row, col_of(s_b, cA, a)) -= n.x * tc[k];
          R.A(row, col_of(s_b, cB, a)) -= n.y * tc[k];
        }
        ++row;
      }
    }
  }

  // outer traction matching on edges V_i -> V_{i+1} of sub i
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = V[(i + 1) % 3] - V[i];
    const Vec2 n = R.outer_normal[i];
    for (int comp = 0; comp < 2; ++comp) {
      const int cA = (comp == 0) ? 0 : 2;
      const int cB = (comp == 0) ? 2 : 1;
      for (int k = 0; k < 4; ++k) {
        for (int a = 0; a < kNumMono3; ++a) {
          const auto tc = mono_on_segment(a, V[i], d);
          R.A(row, col_of(i, cA, a)) += n.x * tc[k];
          R.A(row, col_of(i, cB, a)) += n.y * tc[k];
        }
        ++row;
      }
    }
  }

  R.lu.compute(R.A);
  R.kernel = R.lu.kernel();

  for (int s = 0; s < 3; ++s) {
    R.mass[s].setZero();
    R.moments[s].setZero();
    for (int a = 0; a < kNumMono3; ++a) {
      R.moments[s](a) = integrate_triangle(R.sub[s], 4, [&](const Vec2& xi) {
        return mono_eval(a, xi);
      });
      for (int b = a; b < kNumMono3; ++b) {
        const double v = integrate_triangle(R.sub[s], 7, [&](const Vec2& xi) {
          return mono_eval(a, xi) * mono_eval(b, xi);
        });
        R.mass[s](a, b) = R.mass[s](b, a) = v;
      }
    }
  }
  return R;
}

const LocalSolverRef& local_solver() {
  static const LocalSolverRef R = build_local_solver();
  return R;
}

Eigen::Matrix3d voigt_congruence(const Eigen::Matrix2d& B) {
  // tensor S -> B S B^T as a map on Voigt triples (xx, yy, xy)
  Eigen::Matrix3d P;
  const double b11 = B(0, 0), b12 = B(0, 1), b21 = B(1, 0), b22 = B(1, 1);
  P << b11 * b11, b12 * b12, 2 * b11 * b12,  //
      b21 * b21, b22 * b22, 2 * b21 * b22,   //
      b11 * b21, b12 * b22, b11 * b22 + b12 * b21;
  return P;
}

struct ElementFrame {
  Vec2 x0;
  Eigen::Matrix2d B, Binv;
  double J;
  Eigen::Matrix3d PB, PBinv;
};

ElementFrame element_frame(const TriMesh& mesh, int elem) {
  const auto t = mesh.element_triangle(elem);
  ElementFrame fr;
  fr.x0 = t[0];
  fr.B << (t[1] - t[0]).x, (t[2] - t[0]).x, (t[1] - t[0]).y, (t[2] - t[0]).y;
  fr.J = fr.B.determinant();
  fr.Binv = fr.B.inverse();
  fr.PB = voigt_congruence(fr.B);
  fr.PBinv = fr.PB.inverse();
  return fr;
}

}  // namespace

// ---------------------------------------------------------------------------
// ElementStress
// ---------------------------------------------------------------------------

Vec2 ElementStress::to_reference(const Vec2& x) const {
  const Eigen::Vector2d xi = Binv * Eigen::Vector2d(x.x - x0.x, x.y - x0.y);
  return {xi(0), xi(1)};
}

int ElementStress::subtriangle_of_ref(const Vec2& xi) const {
  const auto& R = local_solver();
  int best = 0;
  double best_min = -1e300;
  for (int s = 0; s < 3; ++s) {
    const Triangle& t = R.sub[s];
    const double a = triangle_area(t);
    const double b0 = signed_area(xi, t[1], t[2]) / a;
    const double b1 = signed_area(t[0], xi, t[2]) / a;
    const double b2 = 1.0 - b0 - b1;
    const double m = std::min({b0, b1, b2});
    if (m > best_min) {
      best_min = m;
      best = s;
    }
  }
  return best;
}

Eigen::Vector3d ElementStress::stress_ref(int sub, const Vec2& xi) const {
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < kNumMono3; ++a) s(c) += coeff[sub](10 * c + a) * mono_eval(a, xi);
  return s;
}

Eigen::Vector3d ElementStress::stress_voigt(const Vec2& x) const {
  const Vec2 xi = to_reference(x);
  return (1.0 / J) * PB * stress_ref(subtriangle_of_ref(xi), xi);
}

Eigen::Vector2d ElementStress::divergence(const Vec2& x) const {
  const Vec2 xi = to_reference(x);
  const int s = subtriangle_of_ref(xi);
  // reference divergence of Sigma, then push forward: div_x sigma = (1/J) B div_xi Sigma
  Eigen::Vector2d dref = Eigen::Vector2d::Zero();
  for (int a = 0; a < kNumMono3; ++a) {
    const int i = kExps[a].first, j = kExps[a].second;
    const double dxa = i >= 1 ? i * std::pow(xi.x, i - 1) * std::pow(xi.y, j) : 0.0;
    const double dya = j >= 1 ? j * std::pow(xi.x, i) * std::pow(xi.y, j - 1) : 0.0;
    dref(0) += coeff[s](10 * 0 + a) * dxa + coeff[s](10 * 2 + a) * dya;
    dref(1) += coeff[s](10 * 2 + a) * dxa + coeff[s](10 * 1 + a) * dya;
  }
  return (1.0 / J) * B * dref;
}

void ElementStress::add_constant(const Eigen::Vector3d& sigma_voigt) {
  const Eigen::Vector3d ref = J * (PBinv * sigma_voigt);
  for (int s = 0; s < 3; ++s)
    for (int c = 0; c < 3; ++c) coeff[s](10 * c + 0) += ref(c);
}

// ---------------------------------------------------------------------------
// Local Neumann solve
// ---------------------------------------------------------------------------

double element_equilibrium_residual(const TriMesh& mesh, int elem,
                                    const std::array<std::pair<Vec2, Vec2>, 3>& tr,
                                    const Vec2& f) {
  const auto t = mesh.element_triangle(elem);
  const double area = mesh.element_area(elem);
  Vec2 force = f * area;
  double moment = area * cross(mesh.centroid(elem), f);
  double scale = norm(f) * area;
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = t[k], b = t[(k + 1) % 3];
    const double len = norm(b - a);
    const Vec2 fa = tr[k].first, fb = tr[k].second;
    force += (fa + fb) * (0.5 * len);
    // integral of x cross F(t) with x, F linear on the edge
    moment += len * (cross(a, fa) / 3.0 + cross(a, fb) / 6.0 + cross(b, fa) / 6.0 +
                     cross(b, fb) / 3.0);
    scale += (norm(fa) + norm(fb)) * 0.5 * len;
  }
  const double h = mesh.element_size(elem);
  return std::max(norm(force), std::abs(moment) / h) / std::max(scale, 1e-300);
}

ElementStress local_neumann_solve(const TriMesh& mesh, const ElasticModel& model, int elem,
                                  const std::array<std::pair<Vec2, Vec2>, 3>& tr, const Vec2& f) {
  const double eq_res = element_equilibrium_residual(mesh, elem, tr, f);
  if (eq_res > 1e-8)
    throw std::invalid_argument("local_neumann_solve: element " + std::to_string(elem) +
                                " data violates equilibrium (residual " + std::to_string(eq_res) +
                                ")");

  const auto& R = local_solver();
  const ElementFrame fr = element_frame(mesh, elem);
  const auto t = mesh.element_triangle(elem);

  // reference body force and divergence RHS
  const Eigen::Vector2d fref = fr.J * (fr.Binv * Eigen::Vector2d(f.x, f.y));

  Eigen::VectorXd b = Eigen::VectorXd::Zero(kRows);
  int row = 0;
  for (int s = 0; s < 3; ++s)
    for (int comp = 0; comp < 2; ++comp)
      for (int q = 0; q < kNumMono2; ++q) {
        if (q == 0) b(row) = -fref(comp);
        ++row;
      }
  row += 24;  // interior continuity rows have zero RHS

  for (int i = 0; i < 3; ++i) {
    const double phys_len = norm(t[(i + 1) % 3] - t[i]);
    const double scale = phys_len / R.outer_ref_length[i];
    const Eigen::Vector2d t0 =
        scale * (fr.Binv * Eigen::Vector2d(tr[i].first.x, tr[i].first.y));
    const Eigen::Vector2d t1 =
        scale * (fr.Binv * Eigen::Vector2d(tr[i].second.x, tr[i].second.y));
    for (int comp = 0; comp < 2; ++comp) {
      b(row + 0) = t0(comp);
      b(row + 1) = t1(comp) - t0(comp);
      row += 4;
    }
  }

  Eigen::VectorXd zp = R.lu.solve(b);
  const double res = (R.A * zp - b).norm();
  if (res > 1e-8 * std::max(1.0, b.norm()))
    throw NumericalError("local_neumann_solve: infeasible constraint system on element " +
                         std::to_string(elem) + " (residual " + std::to_string(res) + ")");

  // complementary energy minimization over the kernel
  const Eigen::Matrix3d C = hooke_inverse_voigt(model);
  const Eigen::Matrix3d MB = (1.0 / fr.J) * fr.PB.transpose() * C * fr.PB;
  const int n0 = static_cast<int>(R.kernel.cols());
  if (n0 > 0) {
    Eigen::MatrixXd GZ(kCols, n0);
    Eigen::VectorXd Gzp(kCols);
    for (int s = 0; s < 3; ++s) {
      // block product with kron(MB, mass_s)
      for (int ci = 0; ci < 3; ++ci) {
        auto out_rows = Eigen::seqN(30 * s + 10 * ci, 10);
        GZ(out_rows, Eigen::all).setZero();
        Gzp(out_rows).setZero();
        for (int cj = 0; cj < 3; ++cj) {
          auto in_rows = Eigen::seqN(30 * s + 10 * cj, 10);
          GZ(out_rows, Eigen::all) += MB(ci, cj) * (R.mass[s] * R.kernel(in_rows, Eigen::all));
          Gzp(out_rows) += MB(ci, cj) * (R.mass[s] * zp(in_rows));
        }
      }
    }
    const Eigen::MatrixXd H = R.kernel.transpose() * GZ;
    const Eigen::VectorXd g = R.kernel.transpose() * Gzp;
    const Eigen::VectorXd y = H.ldlt().solve(-g);
    zp += R.kernel * y;
  }

  ElementStress out;
  out.x0 = fr.x0;
  out.B = fr.B;
  out.Binv = fr.Binv;
  out.J = fr.J;
  out.PB = fr.PB;
  out.PBinv = fr.PBinv;
  for (int s = 0; s < 3; ++s) out.coeff[s] = zp.segment<30>(30 * s);
  return out;
}

// ---------------------------------------------------------------------------
// Edge traction equilibration (EET)
// ---------------------------------------------------------------------------

std::array<std::pair<Vec2, Vec2>, 3> EdgeTractions::element_tractions(const TriMesh& mesh,
                                                                      int e) const {
  std::array<std::pair<Vec2, Vec2>, 3> out;
  const auto& el = mesh.element(e);
  for (int k = 0; k < 3; ++k) {
    const int va = el[k], vb = el[(k + 1) % 3];
    const int eid = topology.element_edges[e][(k + 2) % 3];
    const auto& ed = topology.edges[eid];
    Vec2 fa = (ed.a == va) ? at_a[eid] : at_b[eid];
    Vec2 fb = (ed.a == vb) ? at_a[eid] : at_b[eid];
    const double sign = (ed.elem_plus == e) ? 1.0 : -1.0;
    out[k] = {fa * sign, fb * sign};
  }
  return out;
}

EdgeTractions equilibrate_tractions(const Problem& p, const FemSolution& fem) {
  p.validate();
  if (!p.loads.nodal_forces.empty())
    throw std::invalid_argument(
        "equilibrate_tractions: nodal forces cannot be equilibrated directly; "
        "replace them by a work-equivalent extractor first");
  const TriMesh& mesh = *p.mesh;
  EdgeTractions out;
  out.topology = build_edges(mesh);
  const auto& edges = out.topology.edges;
  const int ne = static_cast<int>(edges.size());
  out.at_a.assign(ne, Vec2{0, 0});
  out.at_b.assign(ne, Vec2{0, 0});

  // classify edges and set defaults
  std::vector<bool> known(ne, false);
  std::vector<Vec2> default_traction(ne);  // constant, oriented with edge normal
  for (int i = 0; i < ne; ++i) {
    const auto& ed = edges[i];
    Eigen::Vector3d s;
    if (ed.elem_minus >= 0)
      s = 0.5 * ((fem.stress[ed.elem_plus] - p.prestress(ed.elem_plus)) +
                 (fem.stress[ed.elem_minus] - p.prestress(ed.elem_minus)));
    else
      s = fem.stress[ed.elem_plus] - p.prestress(ed.elem_plus);
    const Vec2 n = ed.normal;
    default_traction[i] = {s(0) * n.x + s(2) * n.y, s(2) * n.x + s(1) * n.y};
    if (ed.boundary_index >= 0) {
      const std::string& tag = mesh.boundary_edges()[ed.boundary_index].tag;
      if (!p.is_dirichlet_tag(tag)) {
        // Neumann: prescribed traction (zero if traction-free)
        known[i] = true;
        auto it = p.loads.traction.find(tag);
        default_traction[i] = (it != p.loads.traction.end()) ? it->second : Vec2{0, 0};
      }
    }
  }

  // node -> star elements
  std::vector<std::vector<int>> star(mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int k = 0; k < 3; ++k) star[mesh.element(e)[k]].push_back(e);

  // moments of the traction against the endpoint hat functions
  std::vector<Vec2> moment_a(ne), moment_b(ne);
  for (int i = 0; i < ne; ++i)
    moment_a[i] = moment_b[i] = default_traction[i] * (0.5 * edges[i].length);

  const Eigen::Matrix3d K = hooke_voigt(p.model);
  (void)K;

  for (int node = 0; node < mesh.num_nodes(); ++node) {
    const auto& elems = star[node];
    if (elems.empty()) continue;

    // adjacent edges of this node, ascending edge id
    std::vector<int> patch_edges;
    for (int e : elems)
      for (int k = 0; k < 3; ++k) {
        const int eid = out.topology.element_edges[e][k];
        if (edges[eid].a == node || edges[eid].b == node) patch_edges.push_back(eid);
      }
    std::sort(patch_edges.begin(), patch_edges.end());
    patch_edges.erase(std::unique(patch_edges.begin(), patch_edges.end()), patch_edges.end());

    std::vector<int> unknown_col(patch_edges.size(), -1);
    std::vector<int> unknown_edges;
    for (size_t j = 0; j < patch_edges.size(); ++j)
      if (!known[patch_edges[j]]) {
        unknown_col[j] = static_cast<int>(unknown_edges.size());
        unknown_edges.push_back(patch_edges[j]);
      }

    const int nrows = static_cast<int>(elems.size());
    const int ncols = static_cast<int>(unknown_edges.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nrows, ncols);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nrows, 2);

    for (int r = 0; r < nrows; ++r) {
      const int e = elems[r];
      const auto& el = mesh.element(e);
      int local = 0;
      while (el[local] != node) ++local;
      const double area = mesh.element_area(e);
      const Eigen::Matrix<double, 3, 6> Bm = strain_matrix(mesh, e);
      const Eigen::Vector3d work_stress = fem.stress[e] - p.prestress(e);
      const Vec2 f = p.body_force(e);
      // prolongation target: int sigma:eps(phi) - int f.phi
      for (int d = 0; d < 2; ++d)
        rhs(r, d) =
            area * Bm.col(2 * local + d).dot(work_stress) - area / 3.0 * (d == 0 ? f.x : f.y);
      // the two edges of e adjacent to the node
      for (int k = 0; k < 3; ++k) {
        const int eid = out.topology.element_edges[e][k];
        const auto& ed = edges[eid];
        if (ed.a != node && ed.b != node) continue;
        const double sign = (ed.elem_plus == e) ? 1.0 : -1.0;
        const auto it = std::lower_bound(patch_edges.begin(), patch_edges.end(), eid);
        const size_t j = static_cast<size_t>(it - patch_edges.begin());
        if (unknown_col[j] >= 0) {
          M(r, unknown_col[j]) += sign;
        } else {
          const Vec2 m = (ed.a == node) ? moment_a[eid] : moment_b[eid];
          rhs(r, 0) -= sign * m.x;
          rhs(r, 1) -= sign * m.y;
        }
      }
    }

    // minimal-norm deviation from the averaged default moments
    Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(ncols, 2);
    for (int c = 0; c < ncols; ++c) {
      const int eid = unknown_edges[c];
      const Vec2 m = (edges[eid].a == node) ? moment_a[eid] : moment_b[eid];
      b0(c, 0) = m.x;
      b0(c, 1) = m.y;
    }
    const Eigen::MatrixXd r0 = rhs - M * b0;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(ncols, 2);
    if (ncols > 0) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
      delta = cod.solve(r0);
    }
    const double scale = rhs.cwiseAbs().sum() + (M * b0).cwiseAbs().sum() + 1e-300;
    const double resid = (M * delta - r0).cwiseAbs().maxCoeff();
    if (resid > 1e-8 * scale)
      throw NumericalError("equilibrate_tractions: patch system at node " +
                           std::to_string(node) + " is inconsistent (residual " +
                           std::to_string(resid) +
                           "); the input is not a Galerkin solution of this problem");

    for (int c = 0; c < ncols; ++c) {
      const int eid = unknown_edges[c];
      const Vec2 m{b0(c, 0) + delta(c, 0), b0(c, 1) + delta(c, 1)};
      if (edges[eid].a == node)
        moment_a[eid] = m;
      else
        moment_b[eid] = m;
    }
  }

  // recover the linear traction from its two hat moments
  for (int i = 0; i < ne; ++i) {
    if (known[i]) {
      out.at_a[i] = out.at_b[i] = default_traction[i];
      continue;
    }
    const double L = edges[i].length;
    out.at_a[i] = (moment_a[i] * 2.0 - moment_b[i]) * (2.0 / L);
    out.at_b[i] = (moment_b[i] * 2.0 - moment_a[i]) * (2.0 / L);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Admissible pair assembly and verification
// ---------------------------------------------------------------------------

Eigen::Vector3d AdmissibleStress::cre_voigt(int e, const Vec2& x) const {
  return stress[e].stress_voigt(x) - displacement->stress[e];
}

double AdmissibleStress::cre_density(int e, const Vec2& x) const {
  const Eigen::Vector3d r = cre_voigt(e, x);
  return r.dot(hooke_inverse * r);
}

double AdmissibleStress::e_cre(const std::vector<int>& elems) const {
  const auto& R = local_solver();
  double total = 0.0;
  auto add = [&](int e) {
    const ElementStress& es = stress[e];
    for (int s = 0; s < 3; ++s) {
      total += es.J * integrate_triangle(R.sub[s], 6, [&](const Vec2& xi) {
        const Eigen::Vector3d sig = (1.0 / es.J) * es.PB * es.stress_ref(s, xi);
        const Eigen::Vector3d r = sig - displacement->stress[e];
        return r.dot(hooke_inverse * r);
      });
    }
  };
  if (elems.empty())
    for (int e = 0; e < mesh->num_elements(); ++e) add(e);
  else
    for (int e : elems) add(e);
  return std::sqrt(std::max(0.0, total));
}

AdmissibleStress build_admissible(const Problem& p, const FemSolution& fem) {
  AdmissibleStress adm;
  adm.mesh = p.mesh;
  adm.model = p.model;
  adm.hooke = hooke_voigt(p.model);
  adm.hooke_inverse = hooke_inverse_voigt(p.model);
  adm.displacement = std::make_shared<FemSolution>(fem);
  adm.tractions = equilibrate_tractions(p, fem);
  adm.prestress = p.loads.prestress;

  const TriMesh& mesh = *p.mesh;
  adm.stress.reserve(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto tr = adm.tractions.element_tractions(mesh, e);
    ElementStress es = local_neumann_solve(mesh, p.model, e, tr, p.body_force(e));
    if (p.has_prestress()) es.add_constant(p.prestress(e));
    adm.stress.push_back(std::move(es));
  }
  return adm;
}

AdmissibilityReport verify_admissibility(const Problem& p, const AdmissibleStress& adm,
                                         double tol) {
  (void)tol;
  const TriMesh& mesh = *adm.mesh;
  const auto& R = local_solver();
  AdmissibilityReport rep;

  // global stress scale of the equilibrated part
  double stress_scale = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int s = 0; s < 3; ++s) {
      const Vec2 xi = (R.sub[s][0] + R.sub[s][1] + R.sub[s][2]) / 3.0;
      Eigen::Vector3d sig = (1.0 / adm.stress[e].J) * adm.stress[e].PB *
                            adm.stress[e].stress_ref(s, xi);
      sig -= p.prestress(e);
      stress_scale = std::max(stress_scale, sig.cwiseAbs().maxCoeff());
    }
  }
  stress_scale = std::max(stress_scale, 1e-300);

  std::vector<double> elem_violation(mesh.num_elements(), 0.0);

  // per-element strong equilibrium of the equilibrated part at quadrature
  // points of a degree-6 rule on every subtriangle
  const TriRule& rule = triangle_rule(6);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 f = p.body_force(e);
    const double h = mesh.element_size(e);
    const double scale = std::max(norm(f) + stress_scale / h, 1e-300);
    const ElementStress& es = adm.stress[e];
    double worst = 0.0;
    for (int s = 0; s < 3; ++s) {
      const Triangle& T = R.sub[s];
      const Vec2 d1 = T[1] - T[0], d2 = T[2] - T[0];
      for (size_t q = 0; q < rule.pts.size(); ++q) {
        const Vec2 xi = T[0] + d1 * rule.pts[q].x + d2 * rule.pts[q].y;
        const Eigen::Vector2d xv =
            Eigen::Vector2d(es.x0.x, es.x0.y) + es.B * Eigen::Vector2d(xi.x, xi.y);
        const Eigen::Vector2d div = es.divergence({xv(0), xv(1)});
        // the prestress part is constant per element, so its divergence is 0
        const double r = (div + Eigen::Vector2d(f.x, f.y)).norm();
        worst = std::max(worst, r / scale);
      }
    }
    elem_violation[e] += worst;
    rep.max_equilibrium_residual = std::max(rep.max_equilibrium_residual, worst);
  }

  // traction continuity / Neumann match of the equilibrated part
  const GaussRule& gl = gauss_legendre(6);
  for (const auto& ed : adm.tractions.topology.edges) {
    const Vec2 a = mesh.node(ed.a), b = mesh.node(ed.b);
    const Vec2 n = ed.normal;
    Vec2 prescribed{0, 0};
    bool neumann = false;
    if (ed.boundary_index >= 0) {
      const std::string& tag = mesh.boundary_edges()[ed.boundary_index].tag;
      if (!p.is_dirichlet_tag(tag)) {
        neumann = true;
        auto it = p.loads.traction.find(tag);
        if (it != p.loads.traction.end()) prescribed = it->second;
      }
    }
    double worst = 0.0;
    for (size_t q = 0; q < gl.x.size(); ++q) {
      const double t = 0.5 * (gl.x[q] + 1.0);
      const Vec2 x = a + (b - a) * t;
      auto traction = [&](int e) {
        Eigen::Vector3d s = adm.stress[e].stress_voigt(x);
        s -= p.prestress(e);
        return Vec2{s(0) * n.x + s(2) * n.y, s(2) * n.x + s(1) * n.y};
      };
      if (ed.elem_minus >= 0) {
        const Vec2 jump = traction(ed.elem_plus) - traction(ed.elem_minus);
        worst = std::max(worst, norm(jump) / stress_scale);
      } else if (neumann) {
        const Vec2 mis = traction(ed.elem_plus) - prescribed;
        worst = std::max(worst, norm(mis) / stress_scale);
      }
    }
    if (ed.elem_minus >= 0) {
      rep.max_traction_jump = std::max(rep.max_traction_jump, worst);
      elem_violation[ed.elem_plus] += worst;
      elem_violation[ed.elem_minus] += worst;
    } else if (neumann) {
      rep.max_neumann_mismatch = std::max(rep.max_neumann_mismatch, worst);
      elem_violation[ed.elem_plus] += worst;
    }
  }

  rep.worst_element = static_cast<int>(
      std::max_element(elem_violation.begin(), elem_violation.end()) - elem_violation.begin());
  return rep;
}

double admissible_weak_residual(const Problem& p, const AdmissibleStress& adm) {
  const TriMesh& mesh = *adm.mesh;
  const auto& R = local_solver();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  double scale = 0.0;

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementStress& es = adm.stress[e];
    // exact integral of the equilibrated stress over the element
    Eigen::Vector3d integral = Eigen::Vector3d::Zero();
    for (int s = 0; s < 3; ++s) {
      Eigen::Vector3d ref = Eigen::Vector3d::Zero();
      for (int c = 0; c < 3; ++c)
        for (int a = 0; a < kNumMono3; ++a) ref(c) += es.coeff[s](10 * c + a) * R.moments[s](a);
      integral += (1.0 / es.J) * es.PB * ref * es.J;  // physical integral over subtriangle
    }
    integral -= mesh.element_area(e) * p.prestress(e);
    const Eigen::Matrix<double, 3, 6> Bm = strain_matrix(mesh, e);
    const auto& el = mesh.element(e);
    const Vec2 f = p.body_force(e);
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 2; ++d)
        r(2 * el[k] + d) +=
            Bm.col(2 * k + d).dot(integral) - mesh.element_area(e) / 3.0 * (d == 0 ? f.x : f.y);
    scale += integral.cwiseAbs().maxCoeff();
  }
  for (const auto& be : mesh.boundary_edges()) {
    auto it = p.loads.traction.find(be.tag);
    if (it == p.loads.traction.end()) continue;
    const double len = norm(mesh.node(be.b) - mesh.node(be.a));
    for (int node : {be.a, be.b}) {
      r(2 * node) -= 0.5 * len * it->second.x;
      r(2 * node + 1) -= 0.5 * len * it->second.y;
    }
  }
  double worst = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (!adm.displacement->dirichlet_dof[i]) worst = std::max(worst, std::abs(r(i)));
  return worst / std::max(scale / mesh.diameter(), 1e-300);
}

}  // namespace crebound

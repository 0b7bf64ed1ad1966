#include "crebound/elasticity.hpp"

#include <Eigen/Sparse>
#include <set>

namespace crebound {

void ElasticModel::validate() const {
  if (!(E > 0.0)) throw std::invalid_argument("ElasticModel: E must be positive");
  if (!(nu > -1.0 && nu < 0.5))
    throw std::invalid_argument("ElasticModel: nu must lie in (-1, 0.5)");
}

double ElasticModel::kolosov() const {
  return assumption == PlaneAssumption::plane_stress ? (3.0 - nu) / (1.0 + nu) : 3.0 - 4.0 * nu;
}

Eigen::Matrix3d hooke_voigt(const ElasticModel& model) {
  model.validate();
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  const double E = model.E, nu = model.nu;
  if (model.assumption == PlaneAssumption::plane_stress) {
    const double f = E / (1.0 - nu * nu);
    K(0, 0) = K(1, 1) = f;
    K(0, 1) = K(1, 0) = f * nu;
    K(2, 2) = f * (1.0 - nu) / 2.0;
  } else {
    const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    K(0, 0) = K(1, 1) = f * (1.0 - nu);
    K(0, 1) = K(1, 0) = f * nu;
    K(2, 2) = f * (1.0 - 2.0 * nu) / 2.0;
  }
  return K;
}

Eigen::Matrix3d hooke_inverse_voigt(const ElasticModel& model) {
  model.validate();
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  const double E = model.E, nu = model.nu;
  if (model.assumption == PlaneAssumption::plane_stress) {
    C(0, 0) = C(1, 1) = 1.0 / E;
    C(0, 1) = C(1, 0) = -nu / E;
    C(2, 2) = 2.0 * (1.0 + nu) / E;
  } else {
    const double f = (1.0 + nu) / E;
    C(0, 0) = C(1, 1) = f * (1.0 - nu);
    C(0, 1) = C(1, 0) = -f * nu;
    C(2, 2) = 2.0 * f;
  }
  return C;
}

Vec2 Problem::body_force(int elem) const {
  if (!loads.body_force_elementwise.empty()) return loads.body_force_elementwise[elem];
  if (loads.body_force_field) return (*loads.body_force_field)(mesh->centroid(elem));
  auto it = loads.body_force.find(mesh->region_tag(elem));
  if (it == loads.body_force.end()) it = loads.body_force.find("");
  return it == loads.body_force.end() ? Vec2{0, 0} : it->second;
}

Eigen::Vector3d Problem::prestress(int elem) const {
  if (loads.prestress.empty()) return Eigen::Vector3d::Zero();
  return loads.prestress[elem];
}

void Problem::validate() const {
  model.validate();
  if (!mesh) throw std::invalid_argument("Problem: missing mesh");
  if (loads.dirichlet.empty())
    throw std::invalid_argument("Problem: at least one Dirichlet tag is required");
  for (const auto& [tag, v] : loads.traction)
    if (loads.dirichlet.count(tag))
      throw std::invalid_argument("Problem: tag '" + tag + "' is both Dirichlet and Neumann");
  if (!loads.prestress.empty() &&
      static_cast<int>(loads.prestress.size()) != mesh->num_elements())
    throw std::invalid_argument("Problem: prestress list does not match element count");
  if (!loads.body_force_elementwise.empty() &&
      static_cast<int>(loads.body_force_elementwise.size()) != mesh->num_elements())
    throw std::invalid_argument("Problem: elementwise body force does not match element count");
  for (const auto& [node, f] : loads.nodal_forces)
    if (node < 0 || node >= mesh->num_nodes())
      throw std::invalid_argument("Problem: nodal force applied to invalid node");
}

Eigen::Matrix<double, 3, 6> strain_matrix(const TriMesh& mesh, int elem) {
  const auto t = mesh.element_triangle(elem);
  const double a2 = 2.0 * mesh.element_area(elem);
  // gradient of hat function k: rot90 of opposite edge / (2A)
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = t[(k + 2) % 3] - t[(k + 1) % 3];
    const double gx = -e.y / a2, gy = e.x / a2;
    B(0, 2 * k) = gx;
    B(1, 2 * k + 1) = gy;
    B(2, 2 * k) = gy;
    B(2, 2 * k + 1) = gx;
  }
  return B;
}

namespace {

// Gathers Dirichlet dof values; a node on several Dirichlet tags takes the
// value of the lexicographically first tag (values agree for consistent data).
void collect_dirichlet(const Problem& p, std::vector<bool>& is_dirichlet,
                       Eigen::VectorXd& values) {
  const TriMesh& mesh = *p.mesh;
  const int ndof = 2 * mesh.num_nodes();
  is_dirichlet.assign(ndof, false);
  values = Eigen::VectorXd::Zero(ndof);
  for (const auto& [tag, field] : p.loads.dirichlet) {
    for (const auto& be : mesh.boundary_edges()) {
      if (be.tag != tag) continue;
      for (int node : {be.a, be.b}) {
        if (is_dirichlet[2 * node]) continue;
        const Vec2 v = field(mesh.node(node));
        is_dirichlet[2 * node] = is_dirichlet[2 * node + 1] = true;
        values(2 * node) = v.x;
        values(2 * node + 1) = v.y;
      }
    }
  }
}

}  // namespace

FemSolution solve(const Problem& p) {
  p.validate();
  const TriMesh& mesh = *p.mesh;
  const int nn = mesh.num_nodes();
  const int ndof = 2 * nn;
  const Eigen::Matrix3d K = hooke_voigt(p.model);

  std::vector<bool> is_dirichlet;
  Eigen::VectorXd bc_values;
  collect_dirichlet(p, is_dirichlet, bc_values);
  int n_fixed = 0;
  for (bool b : is_dirichlet) n_fixed += b ? 1 : 0;
  if (n_fixed == 0)
    throw NumericalError("solve: no Dirichlet dof found (singular system)");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_elements()) * 36);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ndof);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    const double area = mesh.element_area(e);
    const Eigen::Matrix<double, 3, 6> B = strain_matrix(mesh, e);
    const Eigen::Matrix<double, 6, 6> Ke = area * B.transpose() * K * B;
    int dofs[6];
    for (int k = 0; k < 3; ++k) {
      dofs[2 * k] = 2 * el[k];
      dofs[2 * k + 1] = 2 * el[k] + 1;
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) triplets.emplace_back(dofs[i], dofs[j], Ke(i, j));

    const Vec2 f = p.body_force(e);
    for (int k = 0; k < 3; ++k) {
      rhs(2 * el[k]) += area / 3.0 * f.x;
      rhs(2 * el[k] + 1) += area / 3.0 * f.y;
    }
    if (p.has_prestress()) {
      const Eigen::Vector3d s = p.prestress(e);
      const Eigen::Matrix<double, 6, 1> fe = area * B.transpose() * s;
      for (int i = 0; i < 6; ++i) rhs(dofs[i]) += fe(i);
    }
  }

  for (const auto& be : mesh.boundary_edges()) {
    auto it = p.loads.traction.find(be.tag);
    if (it == p.loads.traction.end()) continue;
    const double len = norm(mesh.node(be.b) - mesh.node(be.a));
    for (int node : {be.a, be.b}) {
      rhs(2 * node) += 0.5 * len * it->second.x;
      rhs(2 * node + 1) += 0.5 * len * it->second.y;
    }
  }
  for (const auto& [node, f] : p.loads.nodal_forces) {
    rhs(2 * node) += f.x;
    rhs(2 * node + 1) += f.y;
  }

  Eigen::SparseMatrix<double> A(ndof, ndof);
  A.setFromTriplets(triplets.begin(), triplets.end());

  // system reduction: renumber free dofs
  std::vector<int> free_index(ndof, -1);
  int nfree = 0;
  for (int i = 0; i < ndof; ++i)
    if (!is_dirichlet[i]) free_index[i] = nfree++;

  Eigen::VectorXd rhs_red = Eigen::VectorXd::Zero(nfree);
  for (int i = 0; i < ndof; ++i)
    if (free_index[i] >= 0) rhs_red(free_index[i]) = rhs(i);
  std::vector<Eigen::Triplet<double>> red;
  red.reserve(triplets.size());
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      const int i = static_cast<int>(it.row()), j = col;
      if (free_index[i] >= 0 && free_index[j] >= 0)
        red.emplace_back(free_index[i], free_index[j], it.value());
      else if (free_index[i] >= 0)
        rhs_red(free_index[i]) -= it.value() * bc_values(j);
    }
  Eigen::SparseMatrix<double> Ared(nfree, nfree);
  Ared.setFromTriplets(red.begin(), red.end());

  Eigen::VectorXd x_red;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Ared);
  if (ldlt.info() == Eigen::Success) x_red = ldlt.solve(rhs_red);
  if (ldlt.info() != Eigen::Success || x_red.size() == 0) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(Ared);
    cg.setTolerance(1e-14);
    x_red = cg.solve(rhs_red);
    if (cg.info() != Eigen::Success) throw NumericalError("solve: linear solver breakdown");
  }
  const double rnorm = (Ared * x_red - rhs_red).norm();
  const double rel = rnorm / std::max(rhs_red.norm(), 1e-300);
  if (nfree > 0 && rhs_red.norm() > 0 && rel > 1e-10)
    throw NumericalError("solve: reduced-system residual " + std::to_string(rel) +
                         " exceeds 1e-10 (singular or ill-conditioned system)");

  FemSolution sol;
  sol.mesh = p.mesh;
  sol.model = p.model;
  sol.dirichlet_dof = is_dirichlet;
  sol.solve_residual = rel;
  sol.u = bc_values;
  for (int i = 0; i < ndof; ++i)
    if (free_index[i] >= 0) sol.u(i) = x_red(free_index[i]);

  sol.strain.resize(mesh.num_elements());
  sol.stress.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    Eigen::Matrix<double, 6, 1> ue;
    for (int k = 0; k < 3; ++k) {
      ue(2 * k) = sol.u(2 * el[k]);
      ue(2 * k + 1) = sol.u(2 * el[k] + 1);
    }
    sol.strain[e] = strain_matrix(mesh, e) * ue;
    sol.stress[e] = K * sol.strain[e];
  }
  return sol;
}

Vec2 FemSolution::displacement_at(int elem, const Vec2& x) const {
  const auto t = mesh->element_triangle(elem);
  const double a = mesh->element_area(elem);
  const double b0 = signed_area(x, t[1], t[2]) / a;
  const double b1 = signed_area(t[0], x, t[2]) / a;
  const double b2 = 1.0 - b0 - b1;
  const auto& el = mesh->element(elem);
  Vec2 out{0, 0};
  const double bary[3] = {b0, b1, b2};
  for (int k = 0; k < 3; ++k) {
    out.x += bary[k] * u(2 * el[k]);
    out.y += bary[k] * u(2 * el[k] + 1);
  }
  return out;
}

double energy_norm(const FemSolution& sol, const std::vector<int>& elems) {
  const Eigen::Matrix3d K = hooke_voigt(sol.model);
  double s = 0.0;
  auto add = [&](int e) {
    s += sol.mesh->element_area(e) * sol.strain[e].dot(K * sol.strain[e]);
  };
  if (elems.empty())
    for (int e = 0; e < sol.mesh->num_elements(); ++e) add(e);
  else
    for (int e : elems) add(e);
  return std::sqrt(std::max(0.0, s));
}

Eigen::VectorXd interpolate_nested(const FemSolution& coarse, const TriMesh& fine_mesh) {
  Eigen::VectorXd out(2 * fine_mesh.num_nodes());
  std::vector<bool> done(fine_mesh.num_nodes(), false);
  for (int e = 0; e < fine_mesh.num_elements(); ++e) {
    const int anc = fine_mesh.ancestor(e);
    const auto& el = fine_mesh.element(e);
    for (int k = 0; k < 3; ++k) {
      if (done[el[k]]) continue;
      const Vec2 v = coarse.displacement_at(anc, fine_mesh.node(el[k]));
      out(2 * el[k]) = v.x;
      out(2 * el[k] + 1) = v.y;
      done[el[k]] = true;
    }
  }
  return out;
}

double energy_norm_of_difference(const FemSolution& fine, const FemSolution& coarse) {
  const Eigen::Matrix3d K = hooke_voigt(fine.model);
  const Eigen::VectorXd uc = interpolate_nested(coarse, *fine.mesh);
  double s = 0.0;
  for (int e = 0; e < fine.mesh->num_elements(); ++e) {
    const auto& el = fine.mesh->element(e);
    Eigen::Matrix<double, 6, 1> de;
    for (int k = 0; k < 3; ++k) {
      de(2 * k) = fine.u(2 * el[k]) - uc(2 * el[k]);
      de(2 * k + 1) = fine.u(2 * el[k] + 1) - uc(2 * el[k] + 1);
    }
    const Eigen::Vector3d eps = strain_matrix(*fine.mesh, e) * de;
    s += fine.mesh->element_area(e) * eps.dot(K * eps);
  }
  return std::sqrt(std::max(0.0, s));
}

double galerkin_residual(const Problem& p, const FemSolution& sol) {
  const TriMesh& mesh = *sol.mesh;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  double scale = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    const double area = mesh.element_area(e);
    const Eigen::Matrix<double, 3, 6> B = strain_matrix(mesh, e);
    const Eigen::Vector3d work_stress = sol.stress[e] - p.prestress(e);
    const Eigen::Matrix<double, 6, 1> re = area * B.transpose() * work_stress;
    const Vec2 f = p.body_force(e);
    for (int k = 0; k < 3; ++k) {
      r(2 * el[k]) += re(2 * k) - area / 3.0 * f.x;
      r(2 * el[k] + 1) += re(2 * k + 1) - area / 3.0 * f.y;
    }
    scale += std::abs(area * sol.stress[e].norm());
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
  for (const auto& [node, f] : p.loads.nodal_forces) {
    r(2 * node) -= f.x;
    r(2 * node + 1) -= f.y;
  }
  double worst = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (!sol.dirichlet_dof[i]) worst = std::max(worst, std::abs(r(i)));
  return worst / std::max(scale / mesh.diameter(), 1e-300);
}

}  // namespace crebound

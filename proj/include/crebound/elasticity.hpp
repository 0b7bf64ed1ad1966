#ifndef CREBOUND_ELASTICITY_HPP
#define CREBOUND_ELASTICITY_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crebound/mesh.hpp"

namespace crebound {

enum class PlaneAssumption { plane_stress, plane_strain };

struct ElasticModel {
  double E = 1.0;
  double nu = 0.3;
  PlaneAssumption assumption = PlaneAssumption::plane_stress;

  void validate() const;
  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  /// Kolosov constant of plane elasticity.
  double kolosov() const;
};

/// Hooke operator in Voigt form. Strains use the engineering convention
/// (eps_xx, eps_yy, gamma_xy) with gamma_xy = 2 eps_xy; stresses are
/// (sig_xx, sig_yy, sig_xy).
Eigen::Matrix3d hooke_voigt(const ElasticModel& model);
Eigen::Matrix3d hooke_inverse_voigt(const ElasticModel& model);

using DisplacementField = std::function<Vec2(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

struct LoadSet {
  /// Constant body force per region tag ("" applies to untagged elements).
  std::map<std::string, Vec2> body_force;
  /// Smooth body force, sampled at element centroids when present
  /// (overrides the per-region constants).
  std::optional<VectorField> body_force_field;
  /// Constant body force per element (overrides everything else when
  /// non-empty); used by extractor loadings with compact support.
  std::vector<Vec2> body_force_elementwise;
  /// Constant traction per Neumann boundary tag. Tags absent from both this
  /// map and `dirichlet` are traction-free.
  std::map<std::string, Vec2> traction;
  /// Prescribed displacement per Dirichlet boundary tag.
  std::map<std::string, DisplacementField> dirichlet;
  /// Extractor prestress, constant per element (Voigt), empty for none.
  /// Enters the weak form as + integral of Tr[prestress * eps(v)].
  std::vector<Eigen::Vector3d> prestress;
  /// Point forces applied directly to mesh nodes.
  std::vector<std::pair<int, Vec2>> nodal_forces;

  static DisplacementField constant(Vec2 v) {
    return [v](const Vec2&) { return v; };
  }
};

/// A reference or adjoint problem: mesh + material + loading.
struct Problem {
  std::shared_ptr<const TriMesh> mesh;
  ElasticModel model;
  LoadSet loads;

  Vec2 body_force(int elem) const;
  Eigen::Vector3d prestress(int elem) const;
  bool has_prestress() const { return !loads.prestress.empty(); }
  bool is_dirichlet_tag(const std::string& tag) const { return loads.dirichlet.count(tag) > 0; }
  void validate() const;
};

struct FemSolution {
  std::shared_ptr<const TriMesh> mesh;
  ElasticModel model;
  Eigen::VectorXd u;                          // 2 dof per node
  std::vector<Eigen::Vector3d> strain;        // per element, engineering Voigt
  std::vector<Eigen::Vector3d> stress;        // per element, K eps(u)
  std::vector<bool> dirichlet_dof;            // which dofs were eliminated
  double solve_residual = 0.0;

  Vec2 displacement(int node) const { return {u(2 * node), u(2 * node + 1)}; }
  Vec2 displacement_at(int elem, const Vec2& x) const;
};

/// P1 Galerkin solve with Dirichlet handling by system reduction.
FemSolution solve(const Problem& problem);

/// Per-element engineering-strain matrix: eps = B * [u0x u0y u1x u1y u2x u2y].
Eigen::Matrix<double, 3, 6> strain_matrix(const TriMesh& mesh, int elem);

/// Energy norm of the P1 solution over a set of elements (all when empty).
double energy_norm(const FemSolution& sol, const std::vector<int>& elems = {});

/// Energy norm of (fine - coarse) where `fine` lives on a uniform refinement
/// of `coarse.mesh`; the coarse field is interpolated exactly.
double energy_norm_of_difference(const FemSolution& fine, const FemSolution& coarse);

/// Interpolates a P1 solution from a coarse mesh onto a nested refinement.
Eigen::VectorXd interpolate_nested(const FemSolution& coarse, const TriMesh& fine_mesh);

/// Max relative weak residual of `sol` against every P1 test function that is
/// free (non-Dirichlet); certifies Galerkin orthogonality.
double galerkin_residual(const Problem& problem, const FemSolution& sol);

}  // namespace crebound

#endif

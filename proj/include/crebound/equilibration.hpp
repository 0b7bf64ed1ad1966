#ifndef CREBOUND_EQUILIBRATION_HPP
#define CREBOUND_EQUILIBRATION_HPP

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "crebound/elasticity.hpp"
#include "crebound/mesh.hpp"

namespace crebound {

/// Equilibrated edge tractions recovered from a Galerkin solution. Tractions
/// are linear per edge, stored at the edge endpoints (a then b) and oriented
/// as sigma * n with n = MeshEdges::Edge::normal (outward for elem_plus).
struct EdgeTractions {
  MeshEdges topology;
  std::vector<Vec2> at_a;
  std::vector<Vec2> at_b;

  /// Outward tractions of element `e` on its local edge k (from local vertex
  /// k to k+1): values at those two vertices.
  std::array<std::pair<Vec2, Vec2>, 3> element_tractions(const TriMesh& mesh, int e) const;
};

/// Element equilibration: per-vertex patch systems with the hat-function
/// prolongation condition; minimal-norm deviation from the averaged FE
/// tractions via pseudo-inverse. Requires the Galerkin solution of `problem`
/// (the patch compatibility check fails otherwise).
EdgeTractions equilibrate_tractions(const Problem& problem, const FemSolution& fem);

/// Statically admissible stress on one element: piecewise cubic (per Voigt
/// component) on the centroid split into three subtriangles, expressed in
/// reference coordinates through a Piola map. The piecewise form is what
/// makes exact traction matching possible at element corners.
struct ElementStress {
  Vec2 x0;
  Eigen::Matrix2d B, Binv;
  double J = 0.0;
  Eigen::Matrix3d PB, PBinv;  // physical Voigt = (1/J) * PB * reference Voigt
  std::array<Eigen::Matrix<double, 30, 1>, 3> coeff;  // per subtriangle: [cxx|cyy|cxy]

  Eigen::Vector3d stress_voigt(const Vec2& x) const;           // physical stress at x
  Eigen::Vector3d stress_ref(int sub, const Vec2& xi) const;   // reference frame
  Eigen::Vector2d divergence(const Vec2& x) const;             // physical div at x
  int subtriangle_of_ref(const Vec2& xi) const;
  Vec2 to_reference(const Vec2& x) const;
  /// Adds a constant physical stress to every subtriangle piece.
  void add_constant(const Eigen::Vector3d& sigma_voigt);
};

/// Solves the element-local Neumann problem exactly in the equilibrated
/// piecewise-cubic stress space (complementary energy minimization).
/// `outward_tractions[k]` holds the endpoint values of the linear traction on
/// the edge from local vertex k to k+1, oriented outward. Throws when the
/// data is not in global equilibrium with f.
ElementStress local_neumann_solve(const TriMesh& mesh, const ElasticModel& model, int elem,
                                  const std::array<std::pair<Vec2, Vec2>, 3>& outward_tractions,
                                  const Vec2& f);

/// Residual of force and moment balance of the given element data; used as
/// the local solve precondition.
double element_equilibrium_residual(const TriMesh& mesh, int elem,
                                    const std::array<std::pair<Vec2, Vec2>, 3>& outward_tractions,
                                    const Vec2& f);

/// Admissible pair: the FE displacement together with the recovered
/// statically admissible stress. For adjoint problems with an extractor
/// prestress, `stress` holds the total field (prestress + equilibrated part).
struct AdmissibleStress {
  std::shared_ptr<const TriMesh> mesh;
  ElasticModel model;
  std::vector<ElementStress> stress;
  EdgeTractions tractions;
  std::shared_ptr<const FemSolution> displacement;  // u_hat = u_h
  std::vector<Eigen::Vector3d> prestress;           // extractor part, empty for none

  Eigen::Vector3d stress_voigt(int e, const Vec2& x) const { return stress[e].stress_voigt(x); }
  /// sigma_hat(x) - K eps(u_hat) on element e.
  Eigen::Vector3d cre_voigt(int e, const Vec2& x) const;
  /// Energy density Tr[R K^-1 R] of the CRE field at x.
  double cre_density(int e, const Vec2& x) const;
  /// Global CRE over a set of elements (all when empty); exact quadrature.
  double e_cre(const std::vector<int>& elems = {}) const;

  Eigen::Matrix3d hooke;          // cached K
  Eigen::Matrix3d hooke_inverse;  // cached K^-1
};

AdmissibleStress build_admissible(const Problem& problem, const FemSolution& fem);

struct AdmissibilityReport {
  double max_equilibrium_residual = 0.0;  // relative, interior strong equilibrium
  double max_traction_jump = 0.0;         // relative, across interior edges
  double max_neumann_mismatch = 0.0;      // relative, against prescribed tractions
  int worst_element = -1;
  bool pass(double tol) const {
    return max_equilibrium_residual < tol && max_traction_jump < tol &&
           max_neumann_mismatch < tol;
  }
};

/// Materializes the admissibility invariants as a report: strong elementwise
/// equilibrium at degree-6 quadrature points, traction continuity, and
/// Neumann boundary match; all relative to the load/stress scale.
AdmissibilityReport verify_admissibility(const Problem& problem, const AdmissibleStress& adm,
                                         double tol = 1e-9);

/// Max relative weak residual of the admissible stress against every free P1
/// test function (the testable form of "verifies all equations but the
/// constitutive relation").
double admissible_weak_residual(const Problem& problem, const AdmissibleStress& adm);

}  // namespace crebound

#endif

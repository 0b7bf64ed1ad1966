#ifndef CREBOUND_HOMOTHETIC_HPP
#define CREBOUND_HOMOTHETIC_HPP

#include <functional>
#include <vector>

#include "crebound/mesh.hpp"

namespace crebound {

enum class ShapeKind { circle, cracked_circle };

/// Family of homothetic subdomains omega_lambda scaled about a center O.
/// Shapes: a disc, or a disc minus a wedge of opening `lip_angle` around
/// `crack_direction` (the slit lips; lip_angle = 0 is a radial slit, which
/// the mesh itself carries via duplicated seam nodes).
struct HomotheticFamily {
  Vec2 center;
  ShapeKind shape = ShapeKind::circle;
  Vec2 crack_direction{-1.0, 0.0};
  double lip_angle = 0.0;
  double lambda_max = 0.0;

  bool inside(double lambda, const Vec2& x) const;
  bool in_wedge(const Vec2& x) const;
};

/// Builds a family and determines (or validates) lambda_max against the
/// mesh: the boundary of omega_{lambda_max} must be covered by the mesh.
/// Boundary edges lying along the slit ray are ignored for cracked shapes.
HomotheticFamily make_family(const TriMesh& mesh, Vec2 center, ShapeKind shape,
                             Vec2 crack_direction = {-1.0, 0.0}, double lip_angle = 0.0,
                             double lambda_max = 0.0);

/// Integration granule: a triangle known to carry a single polynomial piece
/// of the integrand, tagged with its mesh element.
struct Atom {
  int elem = -1;
  Triangle tri;
};

std::vector<Atom> whole_element_atoms(const TriMesh& mesh);
/// Centroid split of every element into its three stress subtriangles.
std::vector<Atom> subtriangle_atoms(const TriMesh& mesh);

/// Scalar integrand evaluated inside a given mesh element.
using ElemField = std::function<double(int elem, const Vec2&)>;

/// Triangles covering tri intersected with omega_lambda; the circular arc is
/// polygonized with n_arc points over the local angular span.
std::vector<Triangle> clip_triangle_to_shape(const HomotheticFamily& family, double lambda,
                                             const Triangle& tri, int n_arc);

double total_integral(const std::vector<Atom>& atoms, const ElemField& f, int quad_degree);

/// Integral of f over omega_lambda.
double integrate_subdomain(const HomotheticFamily& family, double lambda,
                           const std::vector<Atom>& atoms, const ElemField& f, int n_arc = 64,
                           int quad_degree = 6);

/// Integral of f over Omega minus omega_lambda (exact complement of
/// integrate_subdomain by construction).
double integrate_complement(const HomotheticFamily& family, double lambda,
                            const std::vector<Atom>& atoms, const ElemField& f, int n_arc = 64,
                            int quad_degree = 6);

/// Weighted boundary integral over the circular part of d(omega_lambda_bar):
/// int f * (x_lambda . n) dS when weighted (x measured from the center; the
/// weight is lambda_bar on a circle), or plain ds when not. Arcs are split at
/// every atom edge so each Gauss segment samples one polynomial piece; slit
/// lips are excluded. `locator` resolves points to elements (defaults to
/// mesh.locate_point of the mesh that produced the atoms).
double integrate_boundary(const TriMesh& mesh, const HomotheticFamily& family, double lambda_bar,
                          const std::vector<Atom>& atoms, const ElemField& f, bool weighted = true,
                          int n_gauss = 10);

/// e_cre_lambda over a strictly increasing grid: sqrt of the subdomain
/// integral of `density` per grid point. Monotonicity is asserted (within
/// the clip tolerance); a violation flags a quadrature bug.
std::vector<double> cre_profile(const HomotheticFamily& family, const std::vector<double>& grid,
                                const std::vector<Atom>& atoms, const ElemField& density,
                                int n_arc = 64, int quad_degree = 6);

}  // namespace crebound

#endif

#ifndef CREBOUND_MESH_GEN_HPP
#define CREBOUND_MESH_GEN_HPP

#include "crebound/mesh.hpp"

namespace crebound {

// Structured demonstration geometries. Boundary tags are noted per generator.

/// [x0,x1] x [y0,y1], nx-by-ny cells, two triangles per cell.
/// Tags: "left", "right", "bottom", "top".
TriMesh rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny);
inline TriMesh unit_square_mesh(int n) { return rect_mesh(0, 0, 1, 1, n, n); }

/// Annulus centered at the origin. Tags: "inner", "outer".
TriMesh annulus_mesh(double r_inner, double r_outer, int n_theta, int n_r);

/// Disc of radius R centered at the origin. Tag: "outer".
TriMesh disc_mesh(double radius, int n_theta, int n_r);

/// Disc of radius R with a radial slit along the negative x axis. The slit
/// lips carry duplicated nodes; the tip node at the origin is single.
/// Tags: "outer", "lip_up" (approached from y > 0), "lip_down".
TriMesh cracked_disc_mesh(double radius, int n_theta, int n_r);

/// Annulus with a radial slit along the negative x axis (no tip node).
/// Tags: "inner", "outer", "lip_up", "lip_down".
TriMesh cracked_annulus_mesh(double r_inner, double r_outer, int n_theta, int n_r);

/// [0,2]^2 minus the open quadrant (1,2)x(1,2); re-entrant corner at (1,1).
/// Tags: "left", "bottom", "right", "top", "notch_v" (x=1), "notch_h" (y=1).
TriMesh lshape_mesh(int n_per_unit);

}  // namespace crebound

#endif

// Planar Delaunay triangulation with robust orientation and in-circle
// predicates (floating-point filter, arbitrary-precision fallback), plus
// point location for mapping a user to its serving triangle.

#pragma once

#include <array>
#include <vector>

namespace vhcomp {

struct Triangulation {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles; // counterclockwise vertex indices
  // Neighbor triangle across edge (v[i], v[i+1]), -1 on the hull boundary.
  std::vector<std::array<int, 3>> adjacency;
};

// Sign of the signed area of (a, b, c): +1 counterclockwise, -1 clockwise,
// 0 collinear.  Exact.
int orient2d(const std::array<double, 2>& a, const std::array<double, 2>& b,
             const std::array<double, 2>& c);

// +1 when d lies strictly inside the circumcircle of the counterclockwise
// triangle (a, b, c), -1 strictly outside, 0 on the circle.  Exact.
int incircle(const std::array<double, 2>& a, const std::array<double, 2>& b,
             const std::array<double, 2>& c, const std::array<double, 2>& d);

// Bowyer-Watson insertion behind a scaffold triangle, followed by an edge
// flip pass that certifies the empty-circumcircle property of the output.
// Throws on fewer than 3 points, duplicate points, or all-collinear input.
Triangulation delaunay(const std::vector<std::array<double, 2>>& points);

// Index of the triangle containing p, walking the adjacency; boundary hits
// resolve to the lowest triangle index; -1 when p is outside the hull.
int locate_triangle(const Triangulation& tri, const std::array<double, 2>& p);

// Vertices of the containing triangle; outside the hull returns the nearest
// triangle (lowest index on ties) and sets *outside_hull when provided.
std::array<int, 3> comp_cluster_for_user(const std::array<double, 2>& p,
                                         const Triangulation& tri,
                                         bool* outside_hull = nullptr);

} // namespace vhcomp

#pragma once

#include <array>
#include <span>
#include <vector>

#include "kkb/geometry.hpp"

namespace kkb {

// Delaunay triangulation of a planar point set. Triangles index into the input
// span and are counter-clockwise. Exact duplicates are collapsed onto the
// first occurrence (`representative`). Empty when all points are collinear or
// fewer than three distinct points exist.
struct Triangulation {
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> representative;
};

Triangulation delaunay_triangulate(std::span<const Point2> points);

/// Boundary flags from the alpha-shape of `points`: Delaunay triangles with
/// circumradius > alpha are removed, the largest remaining edge-connected
/// component is kept, and vertices on its outer perimeter are boundary.
/// Points left outside that component count as boundary when they touch the
/// exterior region. With `include_holes`, perimeters of interior holes are
/// boundary too. Degenerate inputs (collinear, < 3 distinct points) label
/// every node boundary.
std::vector<bool> alpha_shape_boundary(std::span<const Point2> points, double alpha,
                                       bool include_holes = false);

}  // namespace kkb

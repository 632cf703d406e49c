#pragma once
#include <vector>

#include "layoutkit/geom/polygon.hpp"

namespace layoutkit::geom {

// Snap tolerance applied to all coordinates before boolean overlays.
constexpr double kSnapTol = 1e-4;  // tau_snap

// Boolean operations realized as a constrained-triangulation overlay: all
// input edges are arranged and triangulated, triangles are classified by
// centroid containment, and the kept set's boundary is walked back into
// polygons. Disjoint results come back as separate polygons.
std::vector<Polygon2> polygon_union_2d(const std::vector<Polygon2>& polys);
std::vector<Polygon2> polygon_difference_2d(const std::vector<Polygon2>& minuend,
                                            const std::vector<Polygon2>& subtrahend);
std::vector<Polygon2> polygon_intersection_2d(const std::vector<Polygon2>& a,
                                              const std::vector<Polygon2>& b);

Polygon2 snap_polygon(const Polygon2& poly, double tol = kSnapTol);

}  // namespace layoutkit::geom

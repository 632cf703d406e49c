#pragma once
#include <cstdint>
#include <vector>

#include "layoutkit/geom/plane.hpp"
#include "layoutkit/geom/vec.hpp"

namespace layoutkit::geom {

using Ring2 = std::vector<Vec2>;

// 2D polygon: CCW outer ring plus zero or more CW hole rings.
struct Polygon2 {
  Ring2 outer;
  std::vector<Ring2> holes;
};

double ring_area(const Ring2& ring);               // signed, CCW positive
double polygon_area(const Polygon2& poly);         // outer minus holes
bool ring_is_simple(const Ring2& ring, double eps = 1e-12);

// Even-odd containment; boundary points count as inside.
bool point_in_ring(const Vec2& p, const Ring2& ring, double boundary_eps = 1e-9);
bool point_in_polygon_2d(const Vec2& p, const Polygon2& poly, double boundary_eps = 1e-9);

// Orient outer CCW and holes CW in place.
void normalize_orientation(Polygon2& poly);

// Drop consecutive duplicate and collinear ring points (within eps).
Ring2 collapse_collinear(const Ring2& ring, double eps = 1e-9);

// Ramer-Douglas-Peucker on a closed ring. Points flagged in keep (when
// non-empty) are never removed. At least 3 points are retained.
Ring2 rdp_simplify(const Ring2& ring, double tolerance,
                   const std::vector<char>& keep = {});
std::vector<Vec2> rdp_polyline(const std::vector<Vec2>& pts, double tolerance);

// Planar 3D polygon: ring indices into an external vertex pool. The ring is
// expected simple and coplanar with `plane` (validated by callers that care).
struct Polygon3 {
  Plane plane;
  std::vector<std::uint32_t> ring;
  int sem_class = 0;  // io::SemanticClass value; kept as int to avoid a cycle
};

// Ring coordinates materialized from a vertex pool.
std::vector<Vec3> ring_points(const Polygon3& poly, const std::vector<Vec3>& pool);

}  // namespace layoutkit::geom

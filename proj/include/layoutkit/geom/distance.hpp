#pragma once
#include <optional>
#include <span>
#include <vector>

#include "layoutkit/geom/plane.hpp"
#include "layoutkit/geom/polygon.hpp"
#include "layoutkit/geom/vec.hpp"

namespace layoutkit::geom {

// A planar polygon surface: ring coordinates plus the carrying plane.
// The ring is assumed coplanar with `plane` within the validation tolerance.
struct PolygonView {
  std::span<const Vec3> ring;
  Plane plane;
};

constexpr double kCoplanarTol = 1e-6;  // epsilon_plane

// Which surface feature realizes a point-to-polygon distance.
enum class SurfaceFeature { Face, Edge, Vertex };

struct ClosestSurfacePoint {
  double distance = 0.0;
  Vec3 point;                 // closest point on the surface
  SurfaceFeature feature = SurfaceFeature::Face;
  std::size_t edge_index = 0; // for Edge: ring edge (i, i+1); for Vertex: ring index i
  double edge_param = 0.0;    // for Edge: foot = a + t (b - a)
};

// Minimal distance from p to the closed polygon surface. Throws on a
// degenerate (zero-area) polygon.
double point_to_polygon_distance(const Vec3& p, const PolygonView& poly);
ClosestSurfacePoint closest_surface_point(const Vec3& p, const PolygonView& poly);

// Distance to the closed segment [a, b]. Throws on zero-length segments.
double point_to_edge_distance(const Vec3& p, const Vec3& a, const Vec3& b);
// Same, also reporting the clamped parameter of the foot point.
double point_to_edge_distance(const Vec3& p, const Vec3& a, const Vec3& b, double& t_out);

// Transversal intersection of the open segment (a, b) with the polygon
// surface. Coplanar overlap and endpoint touching return nullopt.
std::optional<Vec3> segment_polygon_intersection(const Vec3& a, const Vec3& b,
                                                 const PolygonView& poly);

// Vertex-to-surface Hausdorff distance between two polygons.
double polygon_hausdorff(const PolygonView& a, const PolygonView& b);

// Validation helpers.
bool polygon_is_degenerate(const PolygonView& poly, double min_area = 1e-12);
double ring_area_3d(std::span<const Vec3> ring);

}  // namespace layoutkit::geom

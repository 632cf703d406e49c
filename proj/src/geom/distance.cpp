#include "layoutkit/geom/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace layoutkit::geom {

double ring_area_3d(std::span<const Vec3> ring) {
  if (ring.size() < 3) return 0.0;
  Vec3 acc{0, 0, 0};
  const Vec3& o = ring[0];
  for (std::size_t i = 1; i + 1 < ring.size(); ++i)
    acc += cross(ring[i] - o, ring[i + 1] - o);
  return 0.5 * norm(acc);
}

bool polygon_is_degenerate(const PolygonView& poly, double min_area) {
  return poly.ring.size() < 3 || ring_area_3d(poly.ring) < min_area;
}

double point_to_edge_distance(const Vec3& p, const Vec3& a, const Vec3& b, double& t_out) {
  Vec3 ab = b - a;
  double len2 = norm2(ab);
  if (len2 < 1e-24) throw std::invalid_argument("point_to_edge_distance: zero-length segment");
  t_out = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * t_out));
}

double point_to_edge_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  double t;
  return point_to_edge_distance(p, a, b, t);
}

ClosestSurfacePoint closest_surface_point(const Vec3& p, const PolygonView& poly) {
  if (polygon_is_degenerate(poly))
    throw std::invalid_argument("closest_surface_point: degenerate polygon");

  const auto basis = poly.plane.basis();
  const std::size_t n = poly.ring.size();

  // Perpendicular foot inside the ring: face distance.
  Vec3 foot = poly.plane.project(p);
  Vec2 foot2 = poly.plane.to_plane(foot, basis);
  Ring2 ring2(n);
  for (std::size_t i = 0; i < n; ++i) ring2[i] = poly.plane.to_plane(poly.ring[i], basis);
  if (point_in_ring(foot2, ring2, 0.0)) {
    ClosestSurfacePoint out;
    out.distance = std::abs(poly.plane.signed_distance(p));
    out.point = foot;
    out.feature = SurfaceFeature::Face;
    return out;
  }

  // Otherwise the closest feature is on the boundary.
  ClosestSurfacePoint out;
  out.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = poly.ring[i];
    const Vec3& b = poly.ring[(i + 1) % n];
    if (norm2(b - a) < 1e-24) continue;
    double t;
    double d = point_to_edge_distance(p, a, b, t);
    if (d < out.distance) {
      out.distance = d;
      if (t <= 0.0 || t >= 1.0) {
        out.feature = SurfaceFeature::Vertex;
        out.edge_index = t <= 0.0 ? i : (i + 1) % n;
        out.point = t <= 0.0 ? a : b;
        out.edge_param = t;
      } else {
        out.feature = SurfaceFeature::Edge;
        out.edge_index = i;
        out.edge_param = t;
        out.point = a + (b - a) * t;
      }
    }
  }
  return out;
}

double point_to_polygon_distance(const Vec3& p, const PolygonView& poly) {
  return closest_surface_point(p, poly).distance;
}

std::optional<Vec3> segment_polygon_intersection(const Vec3& a, const Vec3& b,
                                                 const PolygonView& poly) {
  if (poly.ring.size() < 3) return std::nullopt;
  Vec3 w = b - a;
  double denom = dot(poly.plane.normal, w);
  double seg_len = norm(w);
  if (std::abs(denom) <= 1e-12 * std::max(seg_len, 1.0)) return std::nullopt;  // parallel/coplanar
  double s = (poly.plane.offset - dot(poly.plane.normal, a)) / denom;
  if (!(s > 0.0 && s < 1.0)) return std::nullopt;  // endpoint touching excluded
  Vec3 hit = a + w * s;

  const auto basis = poly.plane.basis();
  Ring2 ring2(poly.ring.size());
  for (std::size_t i = 0; i < poly.ring.size(); ++i)
    ring2[i] = poly.plane.to_plane(poly.ring[i], basis);
  Vec2 hit2 = poly.plane.to_plane(hit, basis);
  if (!point_in_ring(hit2, ring2, 0.0)) return std::nullopt;
  return hit;
}

double polygon_hausdorff(const PolygonView& a, const PolygonView& b) {
  if (polygon_is_degenerate(a) || polygon_is_degenerate(b))
    throw std::invalid_argument("polygon_hausdorff: degenerate polygon");
  double worst = 0.0;
  for (const Vec3& v : a.ring) worst = std::max(worst, point_to_polygon_distance(v, b));
  for (const Vec3& v : b.ring) worst = std::max(worst, point_to_polygon_distance(v, a));
  return worst;
}

}  // namespace layoutkit::geom

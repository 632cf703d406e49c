#include "layoutkit/fit/holes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "layoutkit/geom/boolean2d.hpp"
#include "layoutkit/io/semantic.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::fit {

using geom::Plane;
using geom::Polygon2;
using geom::Ring2;
using geom::Vec2;
using geom::Vec3;

namespace {

bool is_class(const geom::Polygon3& p, io::SemanticClass c) {
  return p.sem_class == static_cast<int>(c);
}

}  // namespace

HoleReport close_floor_holes(PrototypeSet& set, const io::LabeledMesh& objects) {
  HoleReport report;
  std::vector<std::size_t> floors;
  for (std::size_t p = 0; p < set.polygons.size(); ++p)
    if (is_class(set.polygons[p], io::SemanticClass::Floor) && set.polygons[p].ring.size() >= 3)
      floors.push_back(p);
  if (floors.empty() || objects.triangles.empty()) return report;

  std::vector<std::vector<Vec3>> floor_rings(floors.size());
  std::vector<double> floor_cz(floors.size());
  for (std::size_t f = 0; f < floors.size(); ++f) {
    floor_rings[f] = geom::ring_points(set.polygons[floors[f]], set.vertices);
    floor_cz[f] = polygon_centroid(set, floors[f]).z;
  }

  // Assign each object triangle to the nearest floor with centroid below it.
  std::vector<std::vector<std::size_t>> tris_of_floor(floors.size());
  for (std::size_t t = 0; t < objects.triangles.size(); ++t) {
    Vec3 c = objects.triangle_centroid(t);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_f = SIZE_MAX;
    for (std::size_t f = 0; f < floors.size(); ++f) {
      if (floor_cz[f] >= c.z) continue;
      geom::PolygonView view{floor_rings[f], set.polygons[floors[f]].plane};
      double d = geom::point_to_polygon_distance(c, view);
      if (d < best) { best = d; best_f = f; }
    }
    if (best_f == SIZE_MAX) continue;  // nothing below: skip (outdoor object)
    tris_of_floor[best_f].push_back(t);
    ++report.projected_triangles;
  }

  struct NewFloor {
    std::size_t source;  // polygon index being replaced
    Plane plane;
    int sem_class;
    std::vector<Ring2> outlines;
    std::array<Vec3, 2> basis;
  };
  std::vector<NewFloor> grown;

  for (std::size_t f = 0; f < floors.size(); ++f) {
    if (tris_of_floor[f].empty()) continue;
    const std::size_t poly_id = floors[f];
    const Plane& plane = set.polygons[poly_id].plane;
    auto basis = plane.basis();

    Polygon2 footprint;
    for (const Vec3& v : floor_rings[f]) footprint.outer.push_back(plane.to_plane(v, basis));
    double original_area = std::abs(geom::ring_area(footprint.outer));

    std::vector<Polygon2> pieces{footprint};
    for (std::size_t t : tris_of_floor[f]) {
      Polygon2 tri;
      for (int k = 0; k < 3; ++k) {
        Vec3 proj = plane.project(objects.vertices[objects.triangles[t][k]]);
        tri.outer.push_back(plane.to_plane(proj, basis));
      }
      if (std::abs(geom::ring_area(tri.outer)) < geom::kSnapTol * geom::kSnapTol) continue;
      pieces.push_back(std::move(tri));
    }
    auto unioned = geom::polygon_union_2d(pieces);
    if (unioned.empty()) continue;

    // Keep the component overlapping the original footprint; disjoint
    // islands under objects elsewhere do not belong to this floor.
    std::size_t keep = 0;
    double best_overlap = -1.0;
    for (std::size_t u = 0; u < unioned.size(); ++u) {
      double overlap = 0.0;
      for (const Polygon2& piece : geom::polygon_intersection_2d({unioned[u]}, {footprint}))
        overlap += geom::polygon_area(piece);
      if (overlap > best_overlap) { best_overlap = overlap; keep = u; }
    }
    Ring2 outline = geom::collapse_collinear(unioned[keep].outer, 1e-9);
    if (outline.size() < 3) continue;
    double new_area = std::abs(geom::ring_area(outline));
    if (new_area < original_area - 1e-9) continue;  // unions cannot shrink

    NewFloor nf;
    nf.source = poly_id;
    nf.plane = plane;
    nf.sem_class = set.polygons[poly_id].sem_class;
    nf.outlines = {outline};
    nf.basis = basis;
    grown.push_back(std::move(nf));
  }

  for (const NewFloor& nf : grown) {
    geom::Polygon3& poly = set.polygons[nf.source];
    // Reuse pool ids where outline points coincide with the old ring.
    std::vector<std::uint32_t> old_ring = poly.ring;
    poly.ring.clear();
    for (const Vec2& q : nf.outlines[0]) {
      Vec3 w = nf.plane.to_world(q, nf.basis);
      std::uint32_t id = UINT32_MAX;
      double best = 1e-7;
      for (std::uint32_t vid : old_ring) {
        double d = geom::norm(set.vertices[vid] - w);
        if (d < best) { best = d; id = vid; }
      }
      if (id == UINT32_MAX) {
        id = static_cast<std::uint32_t>(set.vertices.size());
        set.vertices.push_back(w);
      }
      if (poly.ring.empty() || poly.ring.back() != id) poly.ring.push_back(id);
    }
    ++report.grown_floors;
  }
  if (!grown.empty()) compact(set);
  return report;
}

namespace {

struct ExtensionTarget {
  bool found = false;
  Plane plane;
};

// Nearest floor (dir < 0) or ceiling (dir > 0) plane in the vertical
// direction from `from`. Prefers polygons whose 2D footprint contains the
// query point.
ExtensionTarget find_target(const PrototypeSet& set, const Vec3& from, int dir,
                            io::SemanticClass cls) {
  ExtensionTarget best;
  double best_gap = std::numeric_limits<double>::infinity();
  bool best_contained = false;
  for (std::size_t p = 0; p < set.polygons.size(); ++p) {
    const geom::Polygon3& poly = set.polygons[p];
    if (poly.sem_class != static_cast<int>(cls) || poly.ring.size() < 3) continue;
    if (std::abs(poly.plane.normal.z) < 0.2) continue;  // not horizontal-ish
    // plane z at the query's xy
    double nz = poly.plane.normal.z;
    double z = (poly.plane.offset - poly.plane.normal.x * from.x - poly.plane.normal.y * from.y) / nz;
    double gap = dir < 0 ? from.z - z : z - from.z;
    if (gap <= 1e-6) continue;

    Ring2 ring_xy;
    for (std::uint32_t v : poly.ring)
      ring_xy.push_back({set.vertices[v].x, set.vertices[v].y});
    bool contained = geom::point_in_ring({from.x, from.y}, ring_xy, 1e-9);
    if ((contained && !best_contained) ||
        (contained == best_contained && gap < best_gap)) {
      best_gap = gap;
      best_contained = contained;
      best.found = true;
      best.plane = poly.plane;
    }
  }
  return best;
}

}  // namespace

HoleReport close_wall_holes(PrototypeSet& set,
                            std::span<const io::ObservationSegment> segments,
                            double tau_extend) {
  HoleReport report;
  struct Move {
    std::uint32_t vertex;
    Vec3 target;
  };
  std::vector<Move> moves;
  std::map<std::uint32_t, bool> moved;

  for (std::size_t p = 0; p < set.polygons.size(); ++p) {
    geom::Polygon3& poly = set.polygons[p];
    if (!is_class(poly, io::SemanticClass::Wall) || poly.ring.size() < 3) continue;
    auto basis = poly.plane.basis();
    const std::size_t n = poly.ring.size();

    Ring2 ring2(n);
    for (std::size_t i = 0; i < n; ++i)
      ring2[i] = poly.plane.to_plane(set.vertices[poly.ring[i]], basis);
    double orient = geom::ring_area(ring2) >= 0 ? 1.0 : -1.0;

    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 a = set.vertices[poly.ring[i]];
      const Vec3 b = set.vertices[poly.ring[(i + 1) % n]];
      Vec2 a2 = ring2[i], b2 = ring2[(i + 1) % n];
      Vec2 d2 = b2 - a2;
      double len = geom::norm(d2);
      if (len < 1e-9) continue;
      // outward normal (interior on the left for CCW rings)
      Vec2 out2 = Vec2{d2.y, -d2.x} * (orient / len);
      Vec3 out_world = basis[0] * out2.x + basis[1] * out2.y;

      int dir = 0;
      if (out_world.z < -0.7) dir = -1;       // bottom edge, extend to floor
      else if (out_world.z > 0.7) dir = +1;   // top edge, extend to ceiling
      else continue;

      Vec3 mid = (a + b) * 0.5;
      ExtensionTarget target = find_target(
          set, mid, dir, dir < 0 ? io::SemanticClass::Floor : io::SemanticClass::Ceiling);
      if (!target.found) continue;

      // In-plane steepest descent/ascent direction of the wall plane.
      Vec3 vertical{0, 0, dir < 0 ? -1.0 : 1.0};
      Vec3 u = vertical - poly.plane.normal * geom::dot(poly.plane.normal, vertical);
      double ulen = geom::norm(u);
      if (ulen < 1e-6) continue;
      u = u / ulen;
      double denom = geom::dot(target.plane.normal, u);
      if (std::abs(denom) < 1e-9) continue;
      double ta = (target.plane.offset - geom::dot(target.plane.normal, a)) / denom;
      double tb = (target.plane.offset - geom::dot(target.plane.normal, b)) / denom;
      if (ta < 1e-6 && tb < 1e-6) continue;  // already touching
      ta = std::max(ta, 0.0);
      tb = std::max(tb, 0.0);
      Vec3 a_ext = a + u * ta;
      Vec3 b_ext = b + u * tb;

      // Count observed-empty-space crossings of the band.
      std::vector<Vec3> quad{a, b, b_ext, a_ext};
      geom::PolygonView band{quad, poly.plane};
      double area_m2 = geom::ring_area_3d(quad);
      if (area_m2 < 1e-8) continue;
      int crossings = 0;
      for (const io::ObservationSegment& seg : segments) {
        if (geom::segment_polygon_intersection(seg.origin, seg.endpoint, band)) ++crossings;
      }
      double density = static_cast<double>(crossings) / (area_m2 * 1e4);  // per cm^2
      if (density < tau_extend) {
        if (!moved.count(poly.ring[i])) {
          moves.push_back({poly.ring[i], a_ext});
          moved[poly.ring[i]] = true;
        }
        if (!moved.count(poly.ring[(i + 1) % n])) {
          moves.push_back({poly.ring[(i + 1) % n], b_ext});
          moved[poly.ring[(i + 1) % n]] = true;
        }
        ++report.extended_edges;
      } else {
        ++report.kept_open_edges;
      }
    }
  }

  for (const Move& m : moves) set.vertices[m.vertex] = m.target;
  if (!moves.empty()) project_all_vertices(set);
  return report;
}

}  // namespace layoutkit::fit

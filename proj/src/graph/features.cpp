#include "layoutkit/graph/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "layoutkit/geom/cluster.hpp"
#include "layoutkit/geom/delaunay.hpp"
#include "layoutkit/geom/distance.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::graph {

using geom::Plane;
using geom::Vec2;
using geom::Vec3;

namespace {

// Level containing height z: the closest level at or slightly above z.
int level_of_height(const std::vector<Level>& levels, double z) {
  int best = -1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const Level& l : levels) {
    double gap = z - l.height;
    if (gap < -0.5) continue;  // clearly below this level
    if (std::abs(gap) < best_gap) {
      best_gap = std::abs(gap);
      best = l.id;
    }
  }
  return best;
}

int room_at(const std::vector<PlacedRoom>& rooms, int level_id, const Vec2& xy) {
  int fallback = -1;
  double fallback_d = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    if (rooms[r].level_id != level_id) continue;
    if (geom::point_in_polygon_2d(xy, rooms[r].footprint, 1e-9)) return static_cast<int>(r);
    for (const Vec2& p : rooms[r].footprint.outer) {
      double d = geom::norm(p - xy);
      if (d < fallback_d) { fallback_d = d; fallback = static_cast<int>(r); }
    }
  }
  return fallback;
}

}  // namespace

std::vector<StairEdge> detect_stairs(const io::LabeledMesh& stairs_mesh,
                                     const std::vector<PlacedRoom>& rooms,
                                     const std::vector<Level>& levels, const GraphConfig& cfg) {
  std::vector<StairEdge> out;
  if (stairs_mesh.triangles.empty() || levels.empty()) return out;

  // Connected components over triangle adjacency (shared vertices connect).
  const std::size_t nv = stairs_mesh.vertices.size();
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) { parent[v] = parent[parent[v]]; v = parent[v]; }
    return v;
  };
  for (const auto& tri : stairs_mesh.triangles) {
    int a = find(tri[0]), b = find(tri[1]), c = find(tri[2]);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
    a = find(tri[0]); c = find(tri[2]);
    if (a != c) parent[std::max(a, c)] = std::min(a, c);
  }
  std::map<int, std::vector<std::uint32_t>> comps;
  for (std::size_t v = 0; v < nv; ++v) comps[find(static_cast<int>(v))].push_back(
      static_cast<std::uint32_t>(v));

  for (const auto& [root, members] : comps) {
    if (static_cast<int>(members.size()) < cfg.min_stair_vertices) continue;

    Vec3 lowest = stairs_mesh.vertices[members[0]];
    Vec3 highest = lowest;
    std::vector<Vec3> pts;
    pts.reserve(members.size());
    for (std::uint32_t v : members) {
      const Vec3& p = stairs_mesh.vertices[v];
      pts.push_back(p);
      if (p.z < lowest.z) lowest = p;
      if (p.z > highest.z) highest = p;
    }
    int level_lo = level_of_height(levels, lowest.z);
    int level_hi = level_of_height(levels, highest.z);
    if (level_lo < 0 || level_hi < 0) continue;
    if (level_lo == level_hi) {
      LK_WARN("stair component touches a single level; edge suppressed");
      continue;
    }

    StairEdge edge;
    edge.level_a = std::min(level_lo, level_hi);
    edge.level_b = std::max(level_lo, level_hi);
    edge.room_a = room_at(rooms, level_lo, {lowest.x, lowest.y});
    edge.room_b = room_at(rooms, level_hi, {highest.x, highest.y});

    try {
      edge.ramp_plane = geom::fit_plane(pts, {Vec3{0, 0, 1}});
    } catch (const std::exception&) {
      edge.ramp_plane = Plane{Vec3{0, 0, 1}, (lowest.z + highest.z) / 2.0};
    }
    // Footprint hull lifted onto the ramp plane.
    std::vector<Vec2> xy;
    xy.reserve(pts.size());
    for (const Vec3& p : pts) xy.push_back({p.x, p.y});
    std::vector<Vec2> hull = geom::convex_hull(xy);
    if (hull.size() >= 3 && std::abs(edge.ramp_plane.normal.z) > 0.1) {
      for (const Vec2& q : hull) {
        double z = (edge.ramp_plane.offset - edge.ramp_plane.normal.x * q.x -
                    edge.ramp_plane.normal.y * q.y) /
                   edge.ramp_plane.normal.z;
        edge.geometry.push_back({q.x, q.y, z});
      }
    } else {
      for (const Vec3& p : {lowest, highest}) edge.geometry.push_back(p);
    }
    // Width: hull extent perpendicular to the in-plane ascent direction.
    Vec2 ascent{edge.ramp_plane.normal.x, edge.ramp_plane.normal.y};
    double alen = geom::norm(ascent);
    Vec2 across = alen > 1e-9 ? Vec2{-ascent.y / alen, ascent.x / alen} : Vec2{1, 0};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec2& q : xy) {
      double s = geom::dot(q, across);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    edge.width = hi > lo ? hi - lo : 0.0;
    out.push_back(std::move(edge));
  }
  return out;
}

std::vector<WindowRect> detect_windows(const std::vector<io::CameraFrame>& frames,
                                       const std::vector<RoomShell>& rooms,
                                       const GraphConfig& cfg) {
  std::vector<WindowRect> out;

  struct WallRef {
    int room;
    int wall;
    Plane plane;
    std::vector<Vec3> ring;
  };
  std::vector<WallRef> walls;
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    for (std::size_t w = 0; w < rooms[r].wall_polys.size(); ++w) {
      const auto& ring = rooms[r].wall_polys[w];
      if (ring.size() < 3) continue;
      Plane pl;
      try {
        pl = geom::fit_plane(ring);
      } catch (const std::exception&) {
        continue;
      }
      if (std::abs(pl.normal.z) > 0.5) continue;  // walls only
      walls.push_back({static_cast<int>(r), static_cast<int>(w), pl, ring});
    }
  }
  if (walls.empty() || frames.empty()) return out;

  // Rays through window-labeled pixels, first wall hit wins.
  struct Hit {
    int wall;
    Vec3 point;
  };
  std::vector<Hit> hits;
  for (const io::CameraFrame& f : frames) {
    if (!f.pixel_labels.has_value()) continue;
    Vec3 origin = f.center();
    for (int v = 0; v < f.height; v += cfg.window_pixel_stride) {
      for (int u = 0; u < f.width; u += cfg.window_pixel_stride) {
        if (f.pixel_labels->at(u, v) != static_cast<int>(io::SemanticClass::Window)) continue;
        Vec3 far = f.unproject(u, v, 100.0);
        double best_t = std::numeric_limits<double>::infinity();
        int best_wall = -1;
        Vec3 best_point;
        for (std::size_t w = 0; w < walls.size(); ++w) {
          geom::PolygonView view{walls[w].ring, walls[w].plane};
          auto hit = geom::segment_polygon_intersection(origin, far, view);
          if (!hit) continue;
          double t = geom::norm(*hit - origin);
          if (t < best_t) {
            best_t = t;
            best_wall = static_cast<int>(w);
            best_point = *hit;
          }
        }
        if (best_wall >= 0) hits.push_back({best_wall, best_point});
      }
    }
  }
  if (hits.empty()) return out;

  // Outlier rejection over the full hit cloud.
  std::vector<Vec3> cloud;
  cloud.reserve(hits.size());
  for (const Hit& h : hits) cloud.push_back(h.point);
  std::vector<char> keep = geom::lof_filter(cloud, cfg.lof_k, cfg.lof_threshold);

  // Per-wall clustering in wall-plane coordinates (world-up and in-plane
  // perpendicular axes).
  for (std::size_t w = 0; w < walls.size(); ++w) {
    const Plane& pl = walls[w].plane;
    Vec3 up = Vec3{0, 0, 1} - pl.normal * pl.normal.z;
    double ul = geom::norm(up);
    if (ul < 1e-9) continue;
    up = up / ul;
    Vec3 across = geom::cross(pl.normal, up);

    std::vector<Vec2> pts2;
    std::vector<Vec3> pts3;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (!keep[i] || hits[i].wall != static_cast<int>(w)) continue;
      const Vec3& p = hits[i].point;
      pts2.push_back({geom::dot(p, across), geom::dot(p, up)});
      pts3.push_back(p);
    }
    if (static_cast<int>(pts2.size()) < cfg.window_min_cluster) continue;

    std::vector<int> labels =
        geom::dbscan_2d(pts2, cfg.window_dbscan_eps, cfg.window_dbscan_minpts);
    int n_clusters = 0;
    for (int l : labels) n_clusters = std::max(n_clusters, l + 1);
    for (int cl = 0; cl < n_clusters; ++cl) {
      double lo_a = 1e300, hi_a = -1e300, lo_u = 1e300, hi_u = -1e300;
      int count = 0;
      double plane_off = 0.0;
      for (std::size_t i = 0; i < pts2.size(); ++i) {
        if (labels[i] != cl) continue;
        ++count;
        lo_a = std::min(lo_a, pts2[i].x); hi_a = std::max(hi_a, pts2[i].x);
        lo_u = std::min(lo_u, pts2[i].y); hi_u = std::max(hi_u, pts2[i].y);
        plane_off += geom::dot(pts3[i], pl.normal);
      }
      if (count < cfg.window_min_cluster) continue;
      double width = hi_a - lo_a, height = hi_u - lo_u;
      if (!(width > cfg.window_min_size && height > cfg.window_min_size)) continue;
      plane_off /= count;

      WindowRect rect;
      rect.wall_room = walls[w].room;
      rect.wall_index = walls[w].wall;
      auto corner = [&](double a, double u2) {
        return pl.normal * plane_off + across * a + up * u2;
      };
      rect.corners = {corner(lo_a, lo_u), corner(hi_a, lo_u), corner(hi_a, hi_u),
                      corner(lo_a, hi_u)};
      out.push_back(rect);
    }
  }
  return out;
}

}  // namespace layoutkit::graph

#include "layoutkit/graph/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "layoutkit/log.hpp"

namespace layoutkit::graph {

using geom::Plane;
using geom::Vec2;
using geom::Vec3;

namespace {

Vec3 quantize(const Vec3& v) {
  return {std::llround(v.x * 1e6) / 1e6, std::llround(v.y * 1e6) / 1e6,
          std::llround(v.z * 1e6) / 1e6};
}

std::vector<Vec3> quantize_ring(const std::vector<Vec3>& ring) {
  std::vector<Vec3> out;
  out.reserve(ring.size());
  for (const Vec3& v : ring) out.push_back(quantize(v));
  return out;
}

double ceiling_z_at(const RoomShell& shell, const Vec2& xy, double fallback) {
  for (const ShellFace& f : shell.faces) {
    if (f.kind != FaceKind::Ceiling) continue;
    geom::Ring2 ring;
    for (const Vec3& v : f.ring) ring.push_back({v.x, v.y});
    if (std::abs(geom::ring_area(ring)) < 1e-12) continue;
    if (geom::point_in_ring(xy, ring, 1e-9)) {
      // interpolate on the face plane
      try {
        Plane pl = geom::fit_plane(f.ring);
        if (std::abs(pl.normal.z) > 0.2)
          return (pl.offset - pl.normal.x * xy.x - pl.normal.y * xy.y) / pl.normal.z;
      } catch (const std::exception&) {
      }
    }
  }
  return fallback;
}

// Split a rectangular wall around a hole, both expressed in (across, up)
// wall-plane coordinates. Emits up to four pieces.
struct WallCut {
  bool applied = false;
  std::vector<std::vector<Vec3>> pieces;
};

WallCut cut_wall(const std::vector<Vec3>& wall, const Vec2& hole_a, const Vec2& hole_b,
                 double hole_z0, double hole_z1) {
  WallCut out;
  if (wall.size() != 4) return out;

  // Wall must be an axis-aligned rectangle in (across, up): equal z pairs.
  Vec3 d = wall[1] - wall[0];
  d.z = 0;
  double len = geom::norm(d);
  if (len < 1e-9) return out;
  Vec3 across = d / len;
  double z_lo = std::min({wall[0].z, wall[1].z, wall[2].z, wall[3].z});
  double z_hi = std::max({wall[0].z, wall[1].z, wall[2].z, wall[3].z});
  // reject non-rectangles (sloped tops)
  double z0a = wall[0].z, z0b = wall[1].z, z1a = wall[3].z, z1b = wall[2].z;
  if (std::abs(z0a - z0b) > 1e-6 || std::abs(z1a - z1b) > 1e-6) return out;

  Vec3 base = wall[0];
  auto coord = [&](const Vec3& p) { return geom::dot(p - base, across); };
  auto at = [&](double s, double z) {
    Vec3 p = base + across * s;
    p.z = z;
    return p;
  };
  double w0 = 0.0, w1 = coord(wall[1]);
  if (w1 < w0) std::swap(w0, w1);

  // hole span along the wall
  Vec3 ha{hole_a.x, hole_a.y, 0}, hb{hole_b.x, hole_b.y, 0};
  double h0 = geom::dot(ha - Vec3{base.x, base.y, 0}, across);
  double h1 = geom::dot(hb - Vec3{base.x, base.y, 0}, across);
  if (h0 > h1) std::swap(h0, h1);
  double clamped_h0 = std::max(h0, w0), clamped_h1 = std::min(h1, w1);
  if (clamped_h0 != h0 || clamped_h1 != h1)
    LK_WARN("door span clamped to host wall extent");
  if (clamped_h1 - clamped_h0 < 1e-6) return out;
  double z0 = std::max(hole_z0, z_lo), z1 = std::min(hole_z1, z_hi);
  if (z1 - z0 < 1e-6) return out;

  auto piece = [&](double s0, double s1, double za, double zb) {
    if (s1 - s0 < 1e-6 || zb - za < 1e-6) return;
    out.pieces.push_back({at(s0, za), at(s1, za), at(s1, zb), at(s0, zb)});
  };
  piece(w0, clamped_h0, z_lo, z_hi);          // left of the hole
  piece(clamped_h1, w1, z_lo, z_hi);          // right
  piece(clamped_h0, clamped_h1, z_lo, z0);    // below
  piece(clamped_h0, clamped_h1, z1, z_hi);    // above
  out.applied = true;
  return out;
}

}  // namespace

io::SceneGraph assemble_scene_graph(const std::vector<Level>& levels,
                                    const std::vector<RoomRecord>& rooms,
                                    const std::vector<PlacedOpening>& openings,
                                    const std::vector<StairEdge>& stairs,
                                    const std::vector<WindowRect>& windows,
                                    const GraphConfig& cfg) {
  io::SceneGraph graph;
  for (const Level& l : levels) graph.levels.push_back({l.id, l.height});

  for (std::size_t r = 0; r < rooms.size(); ++r) {
    io::SceneRoom room;
    room.id = static_cast<int>(r);
    room.level_id = rooms[r].level_id;
    room.floor = quantize_ring(rooms[r].shell.floor_ring);
    for (const auto& w : rooms[r].shell.wall_polys) room.walls.push_back(quantize_ring(w));
    for (const auto& c : rooms[r].shell.ceiling_polys) room.ceilings.push_back(quantize_ring(c));
    graph.rooms.push_back(std::move(room));
  }

  for (const WindowRect& w : windows) {
    if (w.wall_room < 0 || w.wall_room >= static_cast<int>(graph.rooms.size())) continue;
    graph.rooms[w.wall_room].windows.push_back(
        {quantize(w.corners[0]), quantize(w.corners[1]), quantize(w.corners[2]),
         quantize(w.corners[3])});
  }

  for (const PlacedOpening& op : openings) {
    if (op.room_a < 0 || op.room_b < 0 || op.room_a == op.room_b) continue;
    io::SceneEdge edge;
    edge.kind = op.width < cfg.door_width_max ? io::EdgeKind::Door : io::EdgeKind::Opening;
    edge.room_a = std::min(op.room_a, op.room_b);
    edge.room_b = std::max(op.room_a, op.room_b);
    edge.width_m = op.width;

    Vec2 mid = (op.a + op.b) / 2.0;
    double ceil_a = ceiling_z_at(rooms[op.room_a].shell, mid, op.floor_z + cfg.default_ceiling);
    double ceil_b = ceiling_z_at(rooms[op.room_b].shell, mid, op.floor_z + cfg.default_ceiling);
    double local_ceiling = std::min(ceil_a, ceil_b);
    double top = edge.kind == io::EdgeKind::Door
                     ? std::min(op.floor_z + cfg.door_height, local_ceiling)
                     : local_ceiling;
    edge.geometry = {quantize({op.a.x, op.a.y, op.floor_z}), quantize({op.b.x, op.b.y, op.floor_z}),
                     quantize({op.b.x, op.b.y, top}), quantize({op.a.x, op.a.y, top})};

    // Cut the hole from host walls in both rooms.
    for (int room_id : {op.room_a, op.room_b}) {
      auto& walls = graph.rooms[room_id].walls;
      std::vector<std::vector<Vec3>> rebuilt;
      bool cut_any = false;
      for (const auto& wall : walls) {
        bool matched = false;
        if (!cut_any && wall.size() == 4) {
          // host candidate: opening midpoint close to the wall segment
          Vec2 wa{wall[0].x, wall[0].y}, wb{wall[1].x, wall[1].y};
          Vec2 ab = wb - wa;
          double len2 = geom::norm2(ab);
          if (len2 > 1e-12) {
            double t = std::clamp(geom::dot(mid - wa, ab) / len2, 0.0, 1.0);
            double dist = geom::norm(mid - (wa + ab * t));
            if (dist < 0.25) {
              WallCut cut = cut_wall(wall, op.a, op.b, op.floor_z, top);
              if (cut.applied) {
                for (auto& piece : cut.pieces) rebuilt.push_back(quantize_ring(piece));
                matched = true;
                cut_any = true;
              }
            }
          }
        }
        if (!matched) rebuilt.push_back(wall);
      }
      walls = std::move(rebuilt);
    }
    graph.edges.push_back(std::move(edge));
  }

  for (const StairEdge& s : stairs) {
    if (s.room_a < 0 || s.room_b < 0) {
      LK_WARN("stairs edge dropped: unresolved rooms");
      continue;
    }
    io::SceneEdge edge;
    edge.kind = io::EdgeKind::Stairs;
    edge.room_a = s.room_a;
    edge.room_b = s.room_b;
    edge.width_m = s.width;
    edge.geometry = quantize_ring(s.geometry);
    graph.edges.push_back(std::move(edge));
  }

  graph.validate();
  return graph;
}

}  // namespace layoutkit::graph

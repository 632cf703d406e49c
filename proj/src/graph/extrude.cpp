#include "layoutkit/graph/extrude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "layoutkit/log.hpp"

namespace layoutkit::graph {

using geom::Plane;
using geom::Polygon2;
using geom::Ring2;
using geom::TriMesh;
using geom::Vec2;
using geom::Vec3;

namespace {

double plane_z(const Plane& pl, const Vec2& xy) {
  // n.x*x + n.y*y + n.z*z = d
  return (pl.offset - pl.normal.x * xy.x - pl.normal.y * xy.y) / pl.normal.z;
}

bool horizontal_enough(const Plane& pl) { return std::abs(pl.normal.z) > 0.2; }

}  // namespace

RoomShell extrude_room(const Polygon2& footprint, std::vector<CeilingCandidate> candidates,
                       const Plane& floor_plane, const GraphConfig& cfg) {
  RoomShell shell;
  if (footprint.outer.size() < 3 || !horizontal_enough(floor_plane))
    throw InputError("extrude_room: invalid footprint or floor plane");

  // Keep the configured number of largest candidates.
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                  [](const CeilingCandidate& c) {
                                    return !horizontal_enough(c.plane) ||
                                           c.footprint.outer.size() < 3;
                                  }),
                   candidates.end());
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CeilingCandidate& a, const CeilingCandidate& b) {
                     return a.area > b.area;
                   });
  if (static_cast<int>(candidates.size()) > cfg.max_ceilings)
    candidates.resize(cfg.max_ceilings);

  // CDT constraints: candidate footprint edges and projected pairwise
  // plane intersection lines, clipped to the footprint bbox.
  double lo_x = footprint.outer[0].x, hi_x = lo_x, lo_y = footprint.outer[0].y, hi_y = lo_y;
  for (const Vec2& p : footprint.outer) {
    lo_x = std::min(lo_x, p.x); hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y); hi_y = std::max(hi_y, p.y);
  }
  double pad = 0.05;
  lo_x -= pad; lo_y -= pad; hi_x += pad; hi_y += pad;

  std::vector<std::pair<Vec2, Vec2>> constraints;
  auto add_ring_constraints = [&](const Ring2& r) {
    for (std::size_t i = 0; i < r.size(); ++i)
      constraints.emplace_back(r[i], r[(i + 1) % r.size()]);
  };
  for (const CeilingCandidate& c : candidates) {
    add_ring_constraints(c.footprint.outer);
    for (const Ring2& h : c.footprint.holes) add_ring_constraints(h);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const Plane& pi = candidates[i].plane;
      const Plane& pj = candidates[j].plane;
      Vec3 dir = geom::cross(pi.normal, pj.normal);
      Vec2 dir2{dir.x, dir.y};
      double len2 = geom::norm(dir2);
      if (len2 < 1e-9) continue;  // parallel planes or vertical seam line
      // A point on the intersection line (solve the 2-plane system).
      double c = geom::dot(pi.normal, pj.normal);
      double det = 1.0 - c * c;
      if (det < 1e-12) continue;
      double k1 = (pi.offset - c * pj.offset) / det;
      double k2 = (pj.offset - c * pi.offset) / det;
      Vec3 p0 = pi.normal * k1 + pj.normal * k2;
      Vec2 p02{p0.x, p0.y};
      Vec2 u = dir2 / len2;
      // Clip the infinite 2D line to the padded bbox.
      double t_lo = -1e18, t_hi = 1e18;
      auto clip_axis = [&](double start, double dp, double q0, double q1) {
        if (std::abs(dp) < 1e-15) return start >= q0 && start <= q1;
        double t0 = (q0 - start) / dp, t1 = (q1 - start) / dp;
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
        return true;
      };
      if (!clip_axis(p02.x, u.x, lo_x, hi_x)) continue;
      if (!clip_axis(p02.y, u.y, lo_y, hi_y)) continue;
      if (t_lo >= t_hi) continue;
      constraints.emplace_back(p02 + u * t_lo, p02 + u * t_hi);
    }
  }

  TriMesh mesh = geom::cdt_triangulate(footprint, constraints);
  if (mesh.tris.empty()) throw InputError("extrude_room: triangulation failed");

  // Upward ray assignment per triangle.
  const int n_tris = static_cast<int>(mesh.tris.size());
  std::vector<int> assigned(n_tris, -1);
  std::vector<Vec2> centroids(n_tris);
  for (int t = 0; t < n_tris; ++t) {
    Vec2 c = (mesh.points[mesh.tris[t][0]] + mesh.points[mesh.tris[t][1]] +
              mesh.points[mesh.tris[t][2]]) /
             3.0;
    centroids[t] = c;
    double floor_z = plane_z(floor_plane, c);
    double best_z = std::numeric_limits<double>::infinity();
    int best = -1;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (!geom::point_in_polygon_2d(c, candidates[k].footprint, 0.0)) continue;
      double z = plane_z(candidates[k].plane, c);
      if (z <= floor_z + 1e-6) continue;
      if (z < best_z - 1e-12) {  // ties go to the lowest candidate index
        best_z = z;
        best = static_cast<int>(k);
      }
    }
    assigned[t] = best;
  }

  // Unassigned components inherit the lowest reachable assigned plane.
  std::vector<int> comp(n_tris, -1);
  for (int t = 0; t < n_tris; ++t) {
    if (assigned[t] >= 0 || comp[t] >= 0) continue;
    std::vector<int> stack{t};
    std::vector<int> members;
    comp[t] = t;
    std::set<int> adjacent_planes;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      for (int k = 0; k < 3; ++k) {
        int nb = mesh.adj[cur][k];
        if (nb < 0) continue;
        if (assigned[nb] >= 0) adjacent_planes.insert(assigned[nb]);
        else if (comp[nb] < 0) {
          comp[nb] = t;
          stack.push_back(nb);
        }
      }
    }
    if (adjacent_planes.empty()) {
      // no candidate anywhere reachable: flat default ceiling
      shell.used_default_ceiling = true;
      continue;
    }
    for (int m : members) {
      double best_z = std::numeric_limits<double>::infinity();
      int best = -1;
      for (int k : adjacent_planes) {
        double z = plane_z(candidates[k].plane, centroids[m]);
        if (z < best_z - 1e-12) { best_z = z; best = k; }
      }
      assigned[m] = best;
    }
  }

  Plane default_plane{Vec3{0, 0, 1},
                      plane_z(floor_plane, centroids.empty() ? Vec2{0, 0} : centroids[0]) +
                          cfg.default_ceiling};
  if (shell.used_default_ceiling)
    LK_WARN("extrude_room: no ceiling candidate reachable, default height used");

  auto ceiling_plane_of = [&](int t) -> const Plane& {
    return assigned[t] >= 0 ? candidates[assigned[t]].plane : default_plane;
  };
  auto lift_floor = [&](const Vec2& p) { return Vec3{p.x, p.y, plane_z(floor_plane, p)}; };
  auto lift = [&](const Vec2& p, const Plane& pl) { return Vec3{p.x, p.y, plane_z(pl, p)}; };

  // Faces: floor and ceiling triangles.
  for (int t = 0; t < n_tris; ++t) {
    const auto& tv = mesh.tris[t];
    ShellFace floor_face;
    floor_face.kind = FaceKind::Floor;
    for (int k = 0; k < 3; ++k) floor_face.ring.push_back(lift_floor(mesh.points[tv[k]]));
    shell.faces.push_back(std::move(floor_face));

    const Plane& cp = ceiling_plane_of(t);
    ShellFace ceil_face;
    ceil_face.kind = FaceKind::Ceiling;
    for (int k = 0; k < 3; ++k) ceil_face.ring.push_back(lift(mesh.points[tv[k]], cp));
    shell.faces.push_back(std::move(ceil_face));
  }

  // Boundary walls and interior seams.
  for (int t = 0; t < n_tris; ++t) {
    const Plane& cp = ceiling_plane_of(t);
    for (int k = 0; k < 3; ++k) {
      int nb = mesh.adj[t][k];
      Vec2 a = mesh.points[mesh.tris[t][k]];
      Vec2 b = mesh.points[mesh.tris[t][(k + 1) % 3]];
      if (nb < 0) {
        ShellFace wall;
        wall.kind = FaceKind::Wall;
        wall.ring = {lift_floor(a), lift_floor(b), lift(b, cp), lift(a, cp)};
        shell.faces.push_back(std::move(wall));
      } else if (nb > t) {
        const Plane& cq = ceiling_plane_of(nb);
        double za1 = plane_z(cp, a), zb1 = plane_z(cp, b);
        double za2 = plane_z(cq, a), zb2 = plane_z(cq, b);
        if (std::abs(za1 - za2) < 1e-9 && std::abs(zb1 - zb2) < 1e-9) continue;
        ShellFace seam;
        seam.kind = FaceKind::Seam;
        seam.ring = {Vec3{a.x, a.y, za1}, Vec3{b.x, b.y, zb1}, Vec3{b.x, b.y, zb2},
                     Vec3{a.x, a.y, za2}};
        // drop a degenerate end (heights agree at one endpoint)
        if (std::abs(za1 - za2) < 1e-9) seam.ring.erase(seam.ring.begin() + 3);
        else if (std::abs(zb1 - zb2) < 1e-9) seam.ring.erase(seam.ring.begin() + 2);
        shell.faces.push_back(std::move(seam));
      }
    }
  }

  // Entity polygons. Ceilings: boundary loops of same-plane triangle sets.
  {
    std::set<int> plane_ids;
    for (int t = 0; t < n_tris; ++t) plane_ids.insert(assigned[t]);
    for (int pid : plane_ids) {
      std::vector<char> kept(n_tris, 0);
      for (int t = 0; t < n_tris; ++t) kept[t] = assigned[t] == pid ? 1 : 0;
      const Plane& pl = pid >= 0 ? candidates[pid].plane : default_plane;
      for (const geom::BoundaryLoop& loop : geom::boundary_loops(mesh, kept)) {
        Ring2 ring;
        for (int v : loop.vertices) ring.push_back(mesh.points[v]);
        ring = geom::collapse_collinear(ring, 1e-9);
        if (ring.size() < 3 || geom::ring_area(ring) <= 0) continue;  // outer loops only
        std::vector<Vec3> poly;
        for (const Vec2& p : ring) poly.push_back(lift(p, pl));
        shell.ceiling_polys.push_back(std::move(poly));
      }
    }
  }

  // Floor ring: footprint outer at floor height.
  for (const Vec2& p : footprint.outer) shell.floor_ring.push_back(lift_floor(p));

  // Walls: boundary edges merged into runs of collinear direction and equal
  // ceiling plane.
  {
    std::vector<char> all_kept(n_tris, 1);
    for (const geom::BoundaryLoop& loop : geom::boundary_loops(mesh, all_kept)) {
      const std::size_t n = loop.vertices.size();
      // plane id per boundary edge: find the owning triangle
      std::map<std::pair<int, int>, int> edge_plane;
      for (int t = 0; t < n_tris; ++t) {
        for (int k = 0; k < 3; ++k) {
          if (mesh.adj[t][k] < 0)
            edge_plane[{mesh.tris[t][k], mesh.tris[t][(k + 1) % 3]}] = assigned[t];
        }
      }
      std::size_t start = 0;
      // begin runs at a direction/plane change to avoid splitting one run
      auto edge_dir = [&](std::size_t i) {
        Vec2 d = mesh.points[loop.vertices[(i + 1) % n]] - mesh.points[loop.vertices[i]];
        double l = geom::norm(d);
        return l > 0 ? d / l : d;
      };
      auto edge_pid = [&](std::size_t i) {
        auto it = edge_plane.find({loop.vertices[i], loop.vertices[(i + 1) % n]});
        return it == edge_plane.end() ? -2 : it->second;
      };
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t prev = (i + n - 1) % n;
        if (std::abs(geom::cross(edge_dir(prev), edge_dir(i))) > 1e-9 ||
            edge_pid(prev) != edge_pid(i)) {
          start = i;
          break;
        }
      }
      std::size_t i = start;
      std::size_t consumed = 0;
      while (consumed < n) {
        std::size_t j = i;
        Vec2 dir = edge_dir(i);
        int pid = edge_pid(i);
        std::size_t len = 1;
        while (len < n) {
          std::size_t next = (j + 1) % n;
          if (std::abs(geom::cross(dir, edge_dir(next))) > 1e-9 || edge_pid(next) != pid) break;
          j = next;
          ++len;
        }
        Vec2 a = mesh.points[loop.vertices[i]];
        Vec2 b = mesh.points[loop.vertices[(j + 1) % n]];
        const Plane& pl = pid >= 0 ? candidates[pid].plane : default_plane;
        shell.wall_polys.push_back({lift_floor(a), lift_floor(b), lift(b, pl), lift(a, pl)});
        consumed += len;
        i = (j + 1) % n;
      }
    }
  }
  return shell;
}

namespace {

struct QuantVec {
  long long x, y, z;
  bool operator<(const QuantVec& o) const {
    return x < o.x || (x == o.x && (y < o.y || (y == o.y && z < o.z)));
  }
  bool operator==(const QuantVec& o) const { return x == o.x && y == o.y && z == o.z; }
};

QuantVec quant(const Vec3& v) {
  return {static_cast<long long>(std::llround(v.x * 1e6)),
          static_cast<long long>(std::llround(v.y * 1e6)),
          static_cast<long long>(std::llround(v.z * 1e6))};
}

}  // namespace

bool shell_watertight(const RoomShell& shell) {
  // Gather shell vertices, split every face edge at vertices lying on it,
  // and require each undirected sub-edge to border exactly two faces.
  std::vector<Vec3> verts;
  std::set<QuantVec> seen;
  for (const ShellFace& f : shell.faces) {
    for (const Vec3& v : f.ring) {
      if (seen.insert(quant(v)).second) verts.push_back(v);
    }
  }

  std::map<std::pair<QuantVec, QuantVec>, int> incidence;
  for (const ShellFace& f : shell.faces) {
    const std::size_t n = f.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = f.ring[i];
      const Vec3& b = f.ring[(i + 1) % n];
      Vec3 ab = b - a;
      double len = geom::norm(ab);
      if (len < 1e-9) continue;
      // collect vertices on the open segment
      std::vector<std::pair<double, Vec3>> on{{0.0, a}, {1.0, b}};
      for (const Vec3& v : verts) {
        double t = geom::dot(v - a, ab) / (len * len);
        if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
        Vec3 foot = a + ab * t;
        if (geom::norm(foot - v) < 2e-6) on.emplace_back(t, v);
      }
      std::sort(on.begin(), on.end(),
                [](const auto& p, const auto& q) { return p.first < q.first; });
      for (std::size_t k = 0; k + 1 < on.size(); ++k) {
        QuantVec qa = quant(on[k].second), qb = quant(on[k + 1].second);
        if (qa == qb) continue;
        if (qb < qa) std::swap(qa, qb);
        incidence[{qa, qb}]++;
      }
    }
  }
  for (const auto& [edge, count] : incidence) {
    if (count != 2) return false;
  }
  return !incidence.empty();
}

int ceiling_hits(const RoomShell& shell, const Vec2& xy) {
  int hits = 0;
  for (const ShellFace& f : shell.faces) {
    if (f.kind != FaceKind::Ceiling) continue;
    Ring2 ring;
    for (const Vec3& v : f.ring) ring.push_back({v.x, v.y});
    if (std::abs(geom::ring_area(ring)) < 1e-12) continue;
    if (geom::point_in_ring(xy, ring, 0.0)) ++hits;
  }
  return hits;
}

}  // namespace layoutkit::graph

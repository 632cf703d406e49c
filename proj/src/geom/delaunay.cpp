#include "layoutkit/geom/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "layoutkit/log.hpp"

namespace layoutkit::geom {

namespace {

using std::size_t;

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  long double v = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                  (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
  return static_cast<double>(v);
}

double orient_eps(const Vec2& a, const Vec2& b, const Vec2& c) {
  double s1 = std::abs(b.x - a.x) + std::abs(b.y - a.y);
  double s2 = std::abs(c.x - a.x) + std::abs(c.y - a.y);
  return 1e-14 * s1 * s2;
}

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

// Incremental Bowyer-Watson triangulation with flip-based constraint
// insertion. The last three points are the enclosing super-triangle.
struct BWMesh {
  struct Tri {
    int v[3];
    int adj[3];  // adj[i] across edge (v[i], v[(i+1)%3])
    bool alive = true;
  };

  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> vert2tri;
  std::unordered_set<uint64_t> constrained;
  std::vector<int> cavity_stamp;
  int epoch = 0;
  int n_real = 0;
  int last_tri = 0;

  void init(const std::vector<Vec2>& points) {
    pts = points;
    n_real = static_cast<int>(points.size());
    double lo_x = 0, lo_y = 0, hi_x = 1, hi_y = 1;
    if (!pts.empty()) {
      lo_x = hi_x = pts[0].x;
      lo_y = hi_y = pts[0].y;
      for (const Vec2& p : pts) {
        lo_x = std::min(lo_x, p.x); hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y); hi_y = std::max(hi_y, p.y);
      }
    }
    double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    double r = std::max({hi_x - lo_x, hi_y - lo_y, 1.0}) * 64.0;
    int s0 = n_real, s1 = n_real + 1, s2 = n_real + 2;
    pts.push_back({cx - 2.0 * r, cy - r});
    pts.push_back({cx + 2.0 * r, cy - r});
    pts.push_back({cx, cy + 2.0 * r});
    tris.push_back({{s0, s1, s2}, {-1, -1, -1}, true});
    vert2tri.assign(pts.size(), -1);
    vert2tri[s0] = vert2tri[s1] = vert2tri[s2] = 0;
    last_tri = 0;

    for (int i = 0; i < n_real; ++i) insert_point(i);
  }

  bool in_circumcircle(const Tri& t, const Vec2& p) const {
    const Vec2& a = pts[t.v[0]];
    const Vec2& b = pts[t.v[1]];
    const Vec2& c = pts[t.v[2]];
    long double ax = a.x - p.x, ay = a.y - p.y;
    long double bx = b.x - p.x, by = b.y - p.y;
    long double cx = c.x - p.x, cy = c.y - p.y;
    long double al = ax * ax + ay * ay;
    long double bl = bx * bx + by * by;
    long double cl = cx * cx + cy * cy;
    long double det = ax * (by * cl - bl * cy) - ay * (bx * cl - bl * cx) + al * (bx * cy - by * cx);
    long double mag = (al + bl + cl) * 1e-13L + 1e-300L;
    return det > mag;
  }

  int locate(const Vec2& p) const {
    int t = last_tri;
    if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) {
      t = -1;
      for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
        if (tris[i].alive) { t = i; break; }
      if (t < 0) return -1;
    }
    size_t guard = tris.size() * 4 + 64;
    while (guard--) {
      const Tri& tr = tris[t];
      int next = -1;
      double worst = 0.0;
      for (int i = 0; i < 3; ++i) {
        const Vec2& a = pts[tr.v[i]];
        const Vec2& b = pts[tr.v[(i + 1) % 3]];
        double o = orient2d(a, b, p);
        if (o < -orient_eps(a, b, p) && o < worst) {
          worst = o;
          next = tr.adj[i];
        }
      }
      if (next == -1) return t;
      t = next;
    }
    // Walk failed to settle; fall back to a scan.
    for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
      if (!tris[i].alive) continue;
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k) {
        const Vec2& a = pts[tris[i].v[k]];
        const Vec2& b = pts[tris[i].v[(k + 1) % 3]];
        inside = orient2d(a, b, p) >= -orient_eps(a, b, p);
      }
      if (inside) return i;
    }
    return -1;
  }

  void set_adj(int t, int old_nb, int new_nb) {
    if (t < 0) return;
    for (int i = 0; i < 3; ++i)
      if (tris[t].adj[i] == old_nb) { tris[t].adj[i] = new_nb; return; }
  }

  void insert_point(int ip) {
    const Vec2 p = pts[ip];
    int t0 = locate(p);
    if (t0 < 0) return;

    // Grow the cavity of triangles whose circumcircle contains p. A point
    // sitting on an edge of t0 forces the neighbor across that edge in,
    // or a degenerate sliver would be left behind.
    cavity_stamp.resize(tris.size() + 8, 0);
    ++epoch;
    std::vector<int> cavity;
    std::vector<int> stack{t0};
    cavity_stamp[t0] = epoch;
    for (int k = 0; k < 3; ++k) {
      const Vec2& ea = pts[tris[t0].v[k]];
      const Vec2& eb = pts[tris[t0].v[(k + 1) % 3]];
      int nb = tris[t0].adj[k];
      if (nb < 0 || cavity_stamp[nb] == epoch) continue;
      if (std::abs(orient2d(ea, eb, p)) <= 4.0 * orient_eps(ea, eb, p)) {
        cavity_stamp[nb] = epoch;
        stack.push_back(nb);
      }
    }
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      for (int i = 0; i < 3; ++i) {
        int nb = tris[t].adj[i];
        if (nb >= 0 && cavity_stamp[nb] != epoch && in_circumcircle(tris[nb], p)) {
          cavity_stamp[nb] = epoch;
          stack.push_back(nb);
        }
      }
    }

    struct BEdge { int a, b, outside; };
    auto collect_boundary = [&](const std::vector<int>& cav, std::vector<BEdge>& out) {
      out.clear();
      for (int t : cav) {
        for (int i = 0; i < 3; ++i) {
          int nb = tris[t].adj[i];
          if (nb < 0 || cavity_stamp[nb] != epoch)
            out.push_back({tris[t].v[i], tris[t].v[(i + 1) % 3], nb});
        }
      }
    };

    std::vector<BEdge> boundary;
    collect_boundary(cavity, boundary);

    // The boundary must be one simple cycle and no cavity vertex may end up
    // strictly interior to it (that would orphan the vertex). Degenerate
    // predicate results can break either; retry with the minimal cavity.
    auto cycle_ok = [&]() {
      std::unordered_map<int, int> starts;
      for (size_t i = 0; i < boundary.size(); ++i)
        if (!starts.emplace(boundary[i].a, static_cast<int>(i)).second) return false;
      if (boundary.empty()) return false;
      for (int t : cavity) {
        for (int k = 0; k < 3; ++k) {
          if (!starts.count(tris[t].v[k])) return false;
        }
      }
      return true;
    };
    if (!cycle_ok()) {
      ++epoch;
      cavity = {t0};
      cavity_stamp[t0] = epoch;
      collect_boundary(cavity, boundary);
      if (!cycle_ok()) return;
    }

    for (int t : cavity) tris[t].alive = false;

    std::unordered_map<int, int> tri_of_start;
    std::vector<int> fresh(boundary.size());
    for (size_t i = 0; i < boundary.size(); ++i) {
      fresh[i] = static_cast<int>(tris.size());
      tris.push_back({{ip, boundary[i].a, boundary[i].b}, {-1, boundary[i].outside, -1}, true});
      tri_of_start[boundary[i].a] = fresh[i];
    }
    cavity_stamp.resize(tris.size() + 8, 0);
    for (size_t i = 0; i < boundary.size(); ++i) {
      int t = fresh[i];
      // edge 1 = (a, b): repoint the outside triangle's (b, a) edge to us.
      int outside = boundary[i].outside;
      if (outside >= 0) {
        for (int k = 0; k < 3; ++k) {
          if (tris[outside].v[k] == boundary[i].b &&
              tris[outside].v[(k + 1) % 3] == boundary[i].a) {
            tris[outside].adj[k] = t;
            break;
          }
        }
      }
      // edge 2 = (b, ip) pairs with edge 0 = (ip, b) of the edge starting at b
      auto it = tri_of_start.find(boundary[i].b);
      if (it != tri_of_start.end()) {
        tris[t].adj[2] = it->second;
        tris[it->second].adj[0] = t;
      }
      vert2tri[boundary[i].a] = t;
      vert2tri[boundary[i].b] = t;
    }
    vert2tri[ip] = fresh.empty() ? -1 : fresh[0];
    last_tri = vert2tri[ip];
  }

  // Find a live triangle containing directed or undirected edge (a, b).
  bool find_edge(int a, int b, int& t_out, int& i_out) const {
    int start = vert2tri[a];
    if (start < 0) return false;
    int t = start;
    size_t guard = tris.size() + 8;
    // Rotate around a; fans are closed while the super-triangle is present.
    while (guard--) {
      const Tri& tr = tris[t];
      int k = -1;
      for (int i = 0; i < 3; ++i)
        if (tr.v[i] == a) { k = i; break; }
      if (k < 0) return false;
      if (tr.v[(k + 1) % 3] == b) { t_out = t; i_out = k; return true; }
      if (tr.v[(k + 2) % 3] == b) { t_out = t; i_out = (k + 2) % 3; return true; }
      int nxt = tr.adj[k];  // across edge (a, v[k+1]): rotates around a
      if (nxt < 0 || nxt == start) break;
      t = nxt;
      if (t == start) break;
    }
    return false;
  }

  int opposite_vertex(int t, int i) const { return tris[t].v[(i + 2) % 3]; }

  // Flip the edge (v[i], v[i+1]) of triangle t with its neighbor.
  // Returns false when the surrounding quad is not strictly convex.
  bool flip(int t, int i) {
    int u = tris[t].adj[i];
    if (u < 0) return false;
    int a = tris[t].v[i];
    int b = tris[t].v[(i + 1) % 3];
    int c = tris[t].v[(i + 2) % 3];
    int j = -1;
    for (int k = 0; k < 3; ++k)
      if (tris[u].v[k] == b && tris[u].v[(k + 1) % 3] == a) { j = k; break; }
    if (j < 0) return false;
    int d = tris[u].v[(j + 2) % 3];

    const Vec2 &pa = pts[a], &pb = pts[b], &pc = pts[c], &pd = pts[d];
    if (!(orient2d(pc, pd, pa) * orient2d(pc, pd, pb) < 0 &&
          orient2d(pa, pb, pc) * orient2d(pa, pb, pd) < 0))
      return false;

    int t_ad = tris[u].adj[(j + 1) % 3];
    int t_ca = tris[t].adj[(i + 2) % 3];
    int u_db = tris[u].adj[(j + 2) % 3];
    int u_bc = tris[t].adj[(i + 1) % 3];

    tris[t].v[0] = a; tris[t].v[1] = d; tris[t].v[2] = c;
    tris[t].adj[0] = t_ad; tris[t].adj[1] = u; tris[t].adj[2] = t_ca;
    tris[u].v[0] = d; tris[u].v[1] = b; tris[u].v[2] = c;
    tris[u].adj[0] = u_db; tris[u].adj[1] = u_bc; tris[u].adj[2] = t;

    set_adj(t_ad, u, t);
    set_adj(u_bc, t, u);
    vert2tri[a] = t; vert2tri[c] = t; vert2tri[d] = t; vert2tri[b] = u;
    return true;
  }

  bool segment_crosses(const Vec2& a, const Vec2& b, const Vec2& u, const Vec2& v) const {
    double o1 = orient2d(a, b, u), o2 = orient2d(a, b, v);
    double o3 = orient2d(u, v, a), o4 = orient2d(u, v, b);
    double e12 = std::max(orient_eps(a, b, u), orient_eps(a, b, v));
    double e34 = std::max(orient_eps(u, v, a), orient_eps(u, v, b));
    return ((o1 > e12 && o2 < -e12) || (o1 < -e12 && o2 > e12)) &&
           ((o3 > e34 && o4 < -e34) || (o3 < -e34 && o4 > e34));
  }

  // A vertex sitting on the open segment (a, b) splits the insertion.
  int on_segment_vertex(int va, int vb) const {
    const Vec2 a = pts[va], b = pts[vb];
    Vec2 d = b - a;
    double len2 = dot(d, d);
    if (len2 < 1e-24) return -1;
    double tol = std::max(1e-9, 1e-9 * std::sqrt(len2));
    for (int v = 0; v < n_real; ++v) {
      if (v == va || v == vb) continue;
      double t = dot(pts[v] - a, d) / len2;
      if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
      Vec2 foot = a + d * t;
      if (std::abs(foot.x - pts[v].x) <= tol && std::abs(foot.y - pts[v].y) <= tol) return v;
    }
    return -1;
  }

  void insert_constraint(int va, int vb, int depth = 0) {
    if (va == vb || depth > 48) return;
    int t, i;
    if (find_edge(va, vb, t, i)) {
      constrained.insert(edge_key(va, vb));
      return;
    }
    const Vec2 a = pts[va], b = pts[vb];

    // First crossed edge: scan the fan around va.
    int start = vert2tri[va];
    int cur = start;
    int cross_u = -1, cross_v = -1;
    size_t guard = tris.size() + 8;
    while (guard--) {
      const Tri& tr = tris[cur];
      int k = -1;
      for (int n = 0; n < 3; ++n)
        if (tr.v[n] == va) { k = n; break; }
      if (k < 0) break;
      int x = tr.v[(k + 1) % 3], y = tr.v[(k + 2) % 3];
      // A proper segment-segment crossing already implies the exit edge
      // lies between a and b.
      if (segment_crosses(a, b, pts[x], pts[y])) {
        cross_u = x;
        cross_v = y;
        break;
      }
      int nxt = tr.adj[k];
      if (nxt < 0 || nxt == start) break;
      cur = nxt;
    }
    if (cross_u < 0) {
      // A vertex collinear with the segment blocks a strict crossing;
      // split the constraint there and recurse.
      int mid = on_segment_vertex(va, vb);
      if (mid >= 0) {
        insert_constraint(va, mid, depth + 1);
        insert_constraint(mid, vb, depth + 1);
        return;
      }
      LK_WARN("constraint (%d,%d) could not be inserted (no crossing found)", va, vb);
      return;
    }

    std::deque<std::pair<int, int>> crossing;
    crossing.emplace_back(cross_u, cross_v);

    // Walk toward vb collecting every crossed edge. `cur` is the fan
    // triangle (va, cross_u, cross_v); step across the crossed edge.
    {
      auto has_vert = [&](int tt, int vv) {
        return tris[tt].v[0] == vv || tris[tt].v[1] == vv || tris[tt].v[2] == vv;
      };
      int far_t = -1;
      for (int n = 0; n < 3; ++n) {
        int eu = tris[cur].v[n], ev = tris[cur].v[(n + 1) % 3];
        if ((eu == cross_u && ev == cross_v) || (eu == cross_v && ev == cross_u)) {
          far_t = tris[cur].adj[n];
          break;
        }
      }
      size_t walk_guard = tris.size() + 8;
      int prev_u = cross_u, prev_v = cross_v;
      while (far_t >= 0 && walk_guard--) {
        if (has_vert(far_t, vb)) break;
        bool advanced = false;
        for (int n = 0; n < 3; ++n) {
          int eu = tris[far_t].v[n], ev = tris[far_t].v[(n + 1) % 3];
          if ((eu == prev_u && ev == prev_v) || (eu == prev_v && ev == prev_u)) continue;
          if (segment_crosses(a, b, pts[eu], pts[ev])) {
            crossing.emplace_back(eu, ev);
            prev_u = eu; prev_v = ev;
            far_t = tris[far_t].adj[n];
            advanced = true;
            break;
          }
        }
        if (!advanced) break;
      }
    }

    size_t spin = crossing.size() * crossing.size() * 8 + 64;
    while (!crossing.empty() && spin--) {
      auto [u, v] = crossing.front();
      crossing.pop_front();
      int et, ei;
      if (!find_edge(u, v, et, ei)) continue;  // already flipped away
      if (tris[et].v[ei] != u) {
        // find_edge may return the (v,u) direction; normalize
        u = tris[et].v[ei];
        v = tris[et].v[(ei + 1) % 3];
      }
      int c = opposite_vertex(et, ei);
      int nb = tris[et].adj[ei];
      if (nb < 0) continue;
      int d = -1;
      for (int k = 0; k < 3; ++k)
        if (tris[nb].v[k] == v && tris[nb].v[(k + 1) % 3] == u) d = tris[nb].v[(k + 2) % 3];
      if (d < 0) continue;
      if (!flip(et, ei)) {
        crossing.emplace_back(u, v);
        continue;
      }
      if (segment_crosses(a, b, pts[c], pts[d])) crossing.emplace_back(c, d);
    }

    int ft, fi;
    if (find_edge(va, vb, ft, fi)) {
      constrained.insert(edge_key(va, vb));
    } else {
      int mid = on_segment_vertex(va, vb);
      if (mid >= 0 && depth <= 48) {
        insert_constraint(va, mid, depth + 1);
        insert_constraint(mid, vb, depth + 1);
        return;
      }
      if (depth <= 44) {
        // flips changed the neighborhood; a fresh crossing walk usually
        // completes the insertion
        insert_constraint(va, vb, depth + 4);
        return;
      }
      LK_WARN("constraint (%d,%d) missing after flips", va, vb);
    }
  }

  // Restore the Delaunay criterion where constraints allow.
  void legalize_all() {
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < 16) {
      changed = false;
      for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        if (!tris[t].alive) continue;
        for (int i = 0; i < 3; ++i) {
          int nb = tris[t].adj[i];
          if (nb < 0 || nb < t) continue;
          int a = tris[t].v[i], b = tris[t].v[(i + 1) % 3];
          if (constrained.count(edge_key(a, b))) continue;
          int d = -1;
          for (int k = 0; k < 3; ++k)
            if (tris[nb].v[k] == b && tris[nb].v[(k + 1) % 3] == a) d = tris[nb].v[(k + 2) % 3];
          if (d < 0) continue;
          if (in_circumcircle(tris[t], pts[d])) {
            if (flip(t, i)) changed = true;
          }
        }
      }
    }
  }

  TriMesh finalize() const {
    TriMesh out;
    std::vector<int> remap(pts.size(), -1);
    std::vector<int> tri_remap(tris.size(), -1);
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      bool super = false;
      for (int k = 0; k < 3; ++k) super |= tris[t].v[k] >= n_real;
      if (super) continue;
      tri_remap[t] = static_cast<int>(out.tris.size());
      std::array<int, 3> tv{};
      for (int k = 0; k < 3; ++k) {
        int v = tris[t].v[k];
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(out.points.size());
          out.points.push_back(pts[v]);
        }
        tv[k] = remap[v];
      }
      out.tris.push_back(tv);
    }
    out.adj.assign(out.tris.size(), {-1, -1, -1});
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (tri_remap[t] < 0) continue;
      for (int k = 0; k < 3; ++k) {
        int nb = tris[t].adj[k];
        out.adj[tri_remap[t]][k] = (nb >= 0 && tri_remap[nb] >= 0) ? tri_remap[nb] : -1;
      }
    }
    return out;
  }
};

}  // namespace

double triangle_circumradius(const Vec2& a, const Vec2& b, const Vec2& c) {
  double la = norm(b - c), lb = norm(a - c), lc = norm(a - b);
  double area = 0.5 * std::abs(cross(b - a, c - a));
  if (area < 1e-300) return std::numeric_limits<double>::infinity();
  return la * lb * lc / (4.0 * area);
}

int SegmentArrangement::add_point(const Vec2& p) {
  // Grid hash over cells of size 4*eps; scan the 3x3 neighborhood.
  const double cell = eps * 4.0;
  auto cell_key = [&](double x, double y) {
    return std::pair<long long, long long>(static_cast<long long>(std::floor(x / cell)),
                                           static_cast<long long>(std::floor(y / cell)));
  };
  static_assert(sizeof(long long) >= 8);
  auto [cx, cy] = cell_key(p.x, p.y);
  // linear probe over small local map; grid_ stores flattened buckets keyed by hash
  auto bucket_hash = [&](long long a, long long b) {
    return static_cast<size_t>((a * 73856093LL) ^ (b * 19349663LL)) % 262144;
  };
  for (long long dx = -1; dx <= 1; ++dx) {
    for (long long dy = -1; dy <= 1; ++dy) {
      size_t h = bucket_hash(cx + dx, cy + dy);
      if (h >= grid_.size()) continue;
      for (int idx : grid_[h]) {
        const Vec2& q = points[idx];
        if (std::abs(q.x - p.x) <= eps && std::abs(q.y - p.y) <= eps) return idx;
      }
    }
  }
  if (grid_.empty()) grid_.resize(262144);
  int idx = static_cast<int>(points.size());
  points.push_back(p);
  grid_[bucket_hash(cx, cy)].push_back(idx);
  return idx;
}

SegmentArrangement arrange_segments(const std::vector<std::pair<Vec2, Vec2>>& segs, double eps) {
  SegmentArrangement arr;
  arr.eps = eps;

  struct RawSeg { int a, b; };
  std::vector<RawSeg> raw;
  raw.reserve(segs.size());
  for (const auto& [p, q] : segs) {
    int a = arr.add_point(p);
    int b = arr.add_point(q);
    if (a != b) raw.push_back({a, b});
  }
  if (raw.empty()) return arr;

  double lo_x = arr.points[0].x, hi_x = lo_x, lo_y = arr.points[0].y, hi_y = lo_y;
  for (const Vec2& p : arr.points) {
    lo_x = std::min(lo_x, p.x); hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y); hi_y = std::max(hi_y, p.y);
  }
  double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  double cell = std::max(span / 256.0, eps * 16.0);

  auto cells_of_segment = [&](const Vec2& a, const Vec2& b, auto&& visit) {
    double len = norm(b - a);
    int steps = std::max(1, static_cast<int>(std::ceil(len / cell)) * 2);
    long long px = std::numeric_limits<long long>::min(), py = px;
    for (int s = 0; s <= steps; ++s) {
      Vec2 p = a + (b - a) * (static_cast<double>(s) / steps);
      long long gx = static_cast<long long>(std::floor((p.x - lo_x) / cell));
      long long gy = static_cast<long long>(std::floor((p.y - lo_y) / cell));
      if (gx == px && gy == py) continue;
      px = gx; py = gy;
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy) visit(gx + dx, gy + dy);
    }
  };

  // Pairwise proper crossings become new points.
  std::map<std::pair<long long, long long>, std::vector<int>> seg_cells;
  for (int si = 0; si < static_cast<int>(raw.size()); ++si) {
    cells_of_segment(arr.points[raw[si].a], arr.points[raw[si].b],
                     [&](long long gx, long long gy) {
                       auto& v = seg_cells[{gx, gy}];
                       if (v.empty() || v.back() != si) v.push_back(si);
                     });
  }
  std::unordered_set<uint64_t> tested;
  for (const auto& [key, list] : seg_cells) {
    for (size_t i = 0; i < list.size(); ++i) {
      for (size_t j = i + 1; j < list.size(); ++j) {
        int s1 = list[i], s2 = list[j];
        if (!tested.insert(edge_key(s1, s2)).second) continue;
        const Vec2 &p1 = arr.points[raw[s1].a], &p2 = arr.points[raw[s1].b];
        const Vec2 &p3 = arr.points[raw[s2].a], &p4 = arr.points[raw[s2].b];
        Vec2 d1 = p2 - p1, d2 = p4 - p3;
        double denom = cross(d1, d2);
        if (std::abs(denom) < 1e-14 * (norm(d1) * norm(d2) + 1e-300)) continue;
        double t = cross(p3 - p1, d2) / denom;
        double u = cross(p3 - p1, d1) / denom;
        if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12) continue;
        arr.add_point(p1 + d1 * t);
      }
    }
  }

  // Split every segment at all points on it (endpoints, T-junctions,
  // crossings, collinear overlaps), then dedupe sub-segments.
  std::map<std::pair<long long, long long>, std::vector<int>> point_cells;
  for (int pi = 0; pi < static_cast<int>(arr.points.size()); ++pi) {
    long long gx = static_cast<long long>(std::floor((arr.points[pi].x - lo_x) / cell));
    long long gy = static_cast<long long>(std::floor((arr.points[pi].y - lo_y) / cell));
    point_cells[{gx, gy}].push_back(pi);
  }

  std::unordered_set<uint64_t> seen;
  for (const RawSeg& s : raw) {
    const Vec2 a = arr.points[s.a], b = arr.points[s.b];
    Vec2 d = b - a;
    double len2 = norm2(d);
    std::vector<std::pair<double, int>> on_seg{{0.0, s.a}, {1.0, s.b}};
    std::unordered_set<int> seen_pts{s.a, s.b};
    cells_of_segment(a, b, [&](long long gx, long long gy) {
      auto it = point_cells.find({gx, gy});
      if (it == point_cells.end()) return;
      for (int pi : it->second) {
        if (seen_pts.count(pi)) continue;
        const Vec2& p = arr.points[pi];
        double t = dot(p - a, d) / len2;
        if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
        Vec2 foot = a + d * t;
        if (std::abs(foot.x - p.x) <= eps && std::abs(foot.y - p.y) <= eps) {
          seen_pts.insert(pi);
          on_seg.emplace_back(t, pi);
        }
      }
    });
    std::sort(on_seg.begin(), on_seg.end());
    for (size_t i = 0; i + 1 < on_seg.size(); ++i) {
      int u = on_seg[i].second, v = on_seg[i + 1].second;
      if (u == v) continue;
      if (seen.insert(edge_key(u, v)).second) arr.segments.emplace_back(u, v);
    }
  }
  return arr;
}

TriMesh delaunay_of(const std::vector<Vec2>& points) {
  SegmentArrangement dedup;
  dedup.eps = 1e-9;
  std::vector<Vec2> unique_pts;
  for (const Vec2& p : points) {
    int before = static_cast<int>(dedup.points.size());
    int idx = dedup.add_point(p);
    if (idx == before) unique_pts.push_back(p);
  }
  BWMesh bw;
  bw.init(unique_pts);
  bw.legalize_all();
  return bw.finalize();
}

TriMesh constrained_delaunay(const SegmentArrangement& arr) {
  BWMesh bw;
  bw.init(arr.points);
  for (const auto& [a, b] : arr.segments) bw.insert_constraint(a, b);
  bw.legalize_all();
  return bw.finalize();
}

namespace {

Vec2 tri_centroid(const TriMesh& m, int t) {
  return (m.points[m.tris[t][0]] + m.points[m.tris[t][1]] + m.points[m.tris[t][2]]) / 3.0;
}

bool region_valid(const Polygon2& region) {
  if (region.outer.size() < 3) return false;
  if (std::abs(ring_area(region.outer)) < 1e-12) return false;
  if (!ring_is_simple(region.outer)) return false;
  for (const Ring2& h : region.holes) {
    if (h.size() < 3 || !ring_is_simple(h)) return false;
  }
  return true;
}

}  // namespace

TriMesh cdt_triangulate(const Polygon2& region,
                        const std::vector<std::pair<Vec2, Vec2>>& constraints) {
  if (!region_valid(region)) throw std::invalid_argument("cdt_triangulate: invalid region");

  std::vector<std::pair<Vec2, Vec2>> segs;
  auto add_ring = [&](const Ring2& r) {
    for (size_t i = 0; i < r.size(); ++i) segs.emplace_back(r[i], r[(i + 1) % r.size()]);
  };
  add_ring(region.outer);
  for (const Ring2& h : region.holes) add_ring(h);
  for (const auto& c : constraints)
    if (norm2(c.second - c.first) > 1e-18) segs.push_back(c);

  // Micron-scale snapping keeps near-coincident crossing points (e.g. an
  // intersection line grazing a candidate corner) from degenerating the
  // triangulation; ring vertices themselves pass through unchanged.
  SegmentArrangement arr = arrange_segments(segs, 1e-6);
  TriMesh full = constrained_delaunay(arr);

  std::vector<char> kept(full.tris.size(), 0);
  for (size_t t = 0; t < full.tris.size(); ++t)
    kept[t] = point_in_polygon_2d(tri_centroid(full, static_cast<int>(t)), region, 0.0) ? 1 : 0;

  // Compact to the kept subset.
  TriMesh out;
  std::vector<int> remap(full.points.size(), -1);
  std::vector<int> tri_remap(full.tris.size(), -1);
  for (size_t t = 0; t < full.tris.size(); ++t) {
    if (!kept[t]) continue;
    tri_remap[t] = static_cast<int>(out.tris.size());
    std::array<int, 3> tv{};
    for (int k = 0; k < 3; ++k) {
      int v = full.tris[t][k];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.points.size());
        out.points.push_back(full.points[v]);
      }
      tv[k] = remap[v];
    }
    out.tris.push_back(tv);
  }
  out.adj.assign(out.tris.size(), {-1, -1, -1});
  for (size_t t = 0; t < full.tris.size(); ++t) {
    if (tri_remap[t] < 0) continue;
    for (int k = 0; k < 3; ++k) {
      int nb = full.adj[t][k];
      out.adj[tri_remap[t]][k] = (nb >= 0 && tri_remap[nb] >= 0) ? tri_remap[nb] : -1;
    }
  }
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(),
            [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& a, const Vec2& b) { return a == b; }),
               points.end());
  if (points.size() < 3) return points;
  std::vector<Vec2> hull(2 * points.size());
  size_t k = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 1e-15) --k;
    hull[k++] = points[i];
  }
  size_t lower = k + 1;
  for (size_t i = points.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 1e-15) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<BoundaryLoop> boundary_loops(const TriMesh& mesh, const std::vector<char>& kept) {
  auto is_kept = [&](int t) { return t >= 0 && kept[t]; };
  std::vector<std::array<char, 3>> visited(mesh.tris.size(), {0, 0, 0});
  std::vector<BoundaryLoop> loops;

  for (int t0 = 0; t0 < static_cast<int>(mesh.tris.size()); ++t0) {
    if (!kept[t0]) continue;
    for (int i0 = 0; i0 < 3; ++i0) {
      if (visited[t0][i0] || is_kept(mesh.adj[t0][i0])) continue;

      BoundaryLoop loop;
      loop.seed_triangle = t0;
      int t = t0, i = i0;
      size_t guard = mesh.tris.size() * 6 + 16;
      while (guard--) {
        if (visited[t][i]) break;
        visited[t][i] = 1;
        loop.vertices.push_back(mesh.tris[t][i]);
        int b = mesh.tris[t][(i + 1) % 3];
        // Pivot clockwise around b through kept triangles to the next
        // boundary edge starting at b.
        int ct = t;
        size_t pivot_guard = mesh.tris.size() + 8;
        while (pivot_guard--) {
          int k = -1;
          for (int n = 0; n < 3; ++n)
            if (mesh.tris[ct][n] == b) { k = n; break; }
          if (k < 0) { ct = -1; break; }
          if (!is_kept(mesh.adj[ct][k])) { t = ct; i = k; break; }
          ct = mesh.adj[ct][k];
        }
        if (ct < 0) break;
        if (t == t0 && i == i0) break;
      }
      if (loop.vertices.size() >= 3) loops.push_back(std::move(loop));
    }
  }
  return loops;
}

Ring2 concave_hull(const std::vector<Vec2>& points, double alpha) {
  if (points.size() < 3) return {};
  TriMesh mesh = delaunay_of(points);
  if (mesh.tris.empty()) return {};

  std::vector<char> kept(mesh.tris.size(), 0);
  bool any = false;
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    double r = triangle_circumradius(mesh.points[mesh.tris[t][0]], mesh.points[mesh.tris[t][1]],
                                     mesh.points[mesh.tris[t][2]]);
    kept[t] = r <= alpha ? 1 : 0;
    any |= kept[t] != 0;
  }
  if (!any) {
    Ring2 hull = convex_hull(points);
    return hull;
  }

  // Largest connected component by area.
  std::vector<int> comp(mesh.tris.size(), -1);
  int n_comp = 0;
  std::vector<double> comp_area;
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    if (!kept[t] || comp[t] >= 0) continue;
    double area = 0.0;
    std::vector<int> stack{static_cast<int>(t)};
    comp[t] = n_comp;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      const auto& tv = mesh.tris[cur];
      area += 0.5 * std::abs(cross(mesh.points[tv[1]] - mesh.points[tv[0]],
                                   mesh.points[tv[2]] - mesh.points[tv[0]]));
      for (int k = 0; k < 3; ++k) {
        int nb = mesh.adj[cur][k];
        if (nb >= 0 && kept[nb] && comp[nb] < 0) {
          comp[nb] = n_comp;
          stack.push_back(nb);
        }
      }
    }
    comp_area.push_back(area);
    ++n_comp;
  }
  int best = static_cast<int>(std::max_element(comp_area.begin(), comp_area.end()) -
                              comp_area.begin());
  std::vector<char> kept_best(mesh.tris.size(), 0);
  for (size_t t = 0; t < mesh.tris.size(); ++t) kept_best[t] = kept[t] && comp[t] == best;

  auto loops = boundary_loops(mesh, kept_best);
  Ring2 outer;
  double best_area = 0.0;
  for (const BoundaryLoop& loop : loops) {
    Ring2 ring;
    ring.reserve(loop.vertices.size());
    for (int v : loop.vertices) ring.push_back(mesh.points[v]);
    double a = ring_area(ring);
    if (a > best_area) {
      best_area = a;
      outer = std::move(ring);
    }
  }
  return outer;
}

}  // namespace layoutkit::geom

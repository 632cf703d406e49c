#include "layoutkit/geom/boolean2d.hpp"

#include <algorithm>
#include <cmath>

#include "layoutkit/geom/delaunay.hpp"

namespace layoutkit::geom {

namespace {

Vec2 snap(const Vec2& p, double tol) {
  return {std::round(p.x / tol) * tol, std::round(p.y / tol) * tol};
}

Ring2 snap_ring(const Ring2& ring, double tol) {
  Ring2 out;
  for (const Vec2& p : ring) {
    Vec2 q = snap(p, tol);
    if (out.empty() || !(out.back() == q)) out.push_back(q);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

bool usable_ring(const Ring2& r) { return r.size() >= 3 && std::abs(ring_area(r)) > 1e-12; }

enum class Op { Union, Difference, Intersection };

std::vector<Polygon2> overlay(const std::vector<Polygon2>& group_a,
                              const std::vector<Polygon2>& group_b, Op op) {
  std::vector<Polygon2> a_snapped, b_snapped;
  std::vector<std::pair<Vec2, Vec2>> segs;
  auto add_poly = [&](const Polygon2& p, std::vector<Polygon2>& dst) {
    Polygon2 q;
    q.outer = snap_ring(p.outer, kSnapTol);
    if (!usable_ring(q.outer)) return;
    for (const Ring2& h : p.holes) {
      Ring2 hs = snap_ring(h, kSnapTol);
      if (usable_ring(hs)) q.holes.push_back(std::move(hs));
    }
    normalize_orientation(q);
    auto add_ring = [&](const Ring2& r) {
      for (std::size_t i = 0; i < r.size(); ++i) segs.emplace_back(r[i], r[(i + 1) % r.size()]);
    };
    add_ring(q.outer);
    for (const Ring2& h : q.holes) add_ring(h);
    dst.push_back(std::move(q));
  };
  for (const Polygon2& p : group_a) add_poly(p, a_snapped);
  for (const Polygon2& p : group_b) add_poly(p, b_snapped);

  if (a_snapped.empty() && b_snapped.empty()) return {};
  if (segs.empty()) return {};

  SegmentArrangement arr = arrange_segments(segs, kSnapTol * 0.25);
  TriMesh mesh = constrained_delaunay(arr);
  if (mesh.tris.empty()) return {};

  auto inside_group = [](const Vec2& p, const std::vector<Polygon2>& group) {
    for (const Polygon2& poly : group)
      if (point_in_polygon_2d(p, poly, 0.0)) return true;
    return false;
  };

  std::vector<char> kept(mesh.tris.size(), 0);
  for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
    Vec2 c = (mesh.points[mesh.tris[t][0]] + mesh.points[mesh.tris[t][1]] +
              mesh.points[mesh.tris[t][2]]) /
             3.0;
    bool in_a = inside_group(c, a_snapped);
    bool in_b = inside_group(c, b_snapped);
    switch (op) {
      case Op::Union: kept[t] = in_a || in_b; break;
      case Op::Difference: kept[t] = in_a && !in_b; break;
      case Op::Intersection: kept[t] = in_a && in_b; break;
    }
  }

  // Connected components of the kept set.
  std::vector<int> comp(mesh.tris.size(), -1);
  int n_comp = 0;
  for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
    if (!kept[t] || comp[t] >= 0) continue;
    std::vector<int> stack{static_cast<int>(t)};
    comp[t] = n_comp;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        int nb = mesh.adj[cur][k];
        if (nb >= 0 && kept[nb] && comp[nb] < 0) {
          comp[nb] = n_comp;
          stack.push_back(nb);
        }
      }
    }
    ++n_comp;
  }
  if (n_comp == 0) return {};

  auto loops = boundary_loops(mesh, kept);
  std::vector<Polygon2> out(n_comp);
  std::vector<bool> have_outer(n_comp, false);
  for (const BoundaryLoop& loop : loops) {
    Ring2 ring;
    ring.reserve(loop.vertices.size());
    for (int v : loop.vertices) ring.push_back(mesh.points[v]);
    ring = collapse_collinear(ring, 1e-9);
    if (ring.size() < 3) continue;
    int c = comp[loop.seed_triangle];
    if (ring_area(ring) > 0) {
      out[c].outer = std::move(ring);
      have_outer[c] = true;
    } else {
      out[c].holes.push_back(std::move(ring));
    }
  }

  std::vector<Polygon2> final_out;
  for (int c = 0; c < n_comp; ++c) {
    if (!have_outer[c] || !usable_ring(out[c].outer)) continue;
    final_out.push_back(std::move(out[c]));
  }
  return final_out;
}

}  // namespace

Polygon2 snap_polygon(const Polygon2& poly, double tol) {
  Polygon2 out;
  out.outer = snap_ring(poly.outer, tol);
  for (const Ring2& h : poly.holes) {
    Ring2 hs = snap_ring(h, tol);
    if (usable_ring(hs)) out.holes.push_back(std::move(hs));
  }
  return out;
}

std::vector<Polygon2> polygon_union_2d(const std::vector<Polygon2>& polys) {
  if (polys.empty()) return {};
  return overlay(polys, {}, Op::Union);
}

std::vector<Polygon2> polygon_difference_2d(const std::vector<Polygon2>& minuend,
                                            const std::vector<Polygon2>& subtrahend) {
  if (minuend.empty()) return {};
  if (subtrahend.empty()) return overlay(minuend, {}, Op::Union);
  return overlay(minuend, subtrahend, Op::Difference);
}

std::vector<Polygon2> polygon_intersection_2d(const std::vector<Polygon2>& a,
                                              const std::vector<Polygon2>& b) {
  if (a.empty() || b.empty()) return {};
  return overlay(a, b, Op::Intersection);
}

}  // namespace layoutkit::geom

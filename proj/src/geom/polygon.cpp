#include "layoutkit/geom/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace layoutkit::geom {

double ring_area(const Ring2& ring) {
  double a = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

double polygon_area(const Polygon2& poly) {
  double a = std::abs(ring_area(poly.outer));
  for (const Ring2& h : poly.holes) a -= std::abs(ring_area(h));
  return a;
}

namespace {

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                                 double eps) {
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

double point_segment_distance2(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  Vec2 foot = a + ab * t;
  return norm2(p - foot);
}

}  // namespace

bool ring_is_simple(const Ring2& ring, double eps) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    if (norm2(b - a) < eps * eps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Vec2& c = ring[j];
      const Vec2& d = ring[(j + 1) % n];
      if (segments_properly_intersect(a, b, c, d, eps)) return false;
    }
  }
  return true;
}

bool point_in_ring(const Vec2& p, const Ring2& ring, double boundary_eps) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  if (boundary_eps > 0) {
    double be2 = boundary_eps * boundary_eps;
    for (std::size_t i = 0; i < n; ++i) {
      if (point_segment_distance2(p, ring[i], ring[(i + 1) % n]) <= be2) return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon_2d(const Vec2& p, const Polygon2& poly, double boundary_eps) {
  if (!point_in_ring(p, poly.outer, boundary_eps)) return false;
  for (const Ring2& h : poly.holes) {
    // On a hole boundary still counts as on the polygon.
    bool on_boundary = false;
    if (boundary_eps > 0) {
      double be2 = boundary_eps * boundary_eps;
      const std::size_t n = h.size();
      for (std::size_t i = 0; i < n && !on_boundary; ++i)
        on_boundary = point_segment_distance2(p, h[i], h[(i + 1) % n]) <= be2;
    }
    if (!on_boundary && point_in_ring(p, h, 0.0)) return false;
  }
  return true;
}

void normalize_orientation(Polygon2& poly) {
  if (ring_area(poly.outer) < 0) std::reverse(poly.outer.begin(), poly.outer.end());
  for (Ring2& h : poly.holes) {
    if (ring_area(h) > 0) std::reverse(h.begin(), h.end());
  }
}

Ring2 collapse_collinear(const Ring2& ring, double eps) {
  Ring2 out;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = ring[(i + n - 1) % n];
    const Vec2& cur = ring[i];
    const Vec2& next = ring[(i + 1) % n];
    if (norm(cur - prev) < eps) continue;
    double dev = std::abs(cross(next - prev, cur - prev));
    double base = norm(next - prev);
    if (base > eps && dev / base < eps) continue;
    out.push_back(cur);
  }
  return out.size() >= 3 ? out : ring;
}

namespace {

void rdp_recurse(const std::vector<Vec2>& pts, std::size_t lo, std::size_t hi, double tol,
                 std::vector<char>& flags) {
  if (hi <= lo + 1) return;
  double best = -1.0;
  std::size_t best_i = lo;
  const Vec2& a = pts[lo];
  const Vec2& b = pts[hi];
  Vec2 ab = b - a;
  double len = norm(ab);
  for (std::size_t i = lo + 1; i < hi; ++i) {
    double d = len < 1e-15 ? norm(pts[i] - a) : std::abs(cross(ab, pts[i] - a)) / len;
    if (d > best) { best = d; best_i = i; }
  }
  if (best > tol) {
    flags[best_i] = 1;
    rdp_recurse(pts, lo, best_i, tol, flags);
    rdp_recurse(pts, best_i, hi, tol, flags);
  }
}

}  // namespace

std::vector<Vec2> rdp_polyline(const std::vector<Vec2>& pts, double tolerance) {
  if (pts.size() <= 2) return pts;
  std::vector<char> flags(pts.size(), 0);
  flags.front() = flags.back() = 1;
  rdp_recurse(pts, 0, pts.size() - 1, tolerance, flags);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (flags[i]) out.push_back(pts[i]);
  return out;
}

Ring2 rdp_simplify(const Ring2& ring, double tolerance, const std::vector<char>& keep) {
  const std::size_t n = ring.size();
  if (n <= 3) return ring;

  // Anchor the closed ring at point 0 and the farthest point from it, then
  // simplify the two arcs independently. Forced-keep points stay anchors.
  std::size_t far_i = 1;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    double d = norm2(ring[i] - ring[0]);
    if (d > far_d) { far_d = d; far_i = i; }
  }

  std::vector<char> flags(n, 0);
  flags[0] = flags[far_i] = 1;
  if (!keep.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      if (keep[i]) flags[i] = 1;
  }

  // Simplify between consecutive anchors around the ring.
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < n; ++i)
    if (flags[i]) anchors.push_back(i);
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    std::size_t lo = anchors[a];
    std::size_t hi = anchors[(a + 1) % anchors.size()];
    std::vector<Vec2> arc;
    std::vector<std::size_t> idx;
    for (std::size_t i = lo;; i = (i + 1) % n) {
      arc.push_back(ring[i]);
      idx.push_back(i);
      if (i == hi && arc.size() > 1) break;
      if (arc.size() > n + 1) break;
    }
    if (arc.size() <= 2) continue;
    std::vector<char> arc_flags(arc.size(), 0);
    arc_flags.front() = arc_flags.back() = 1;
    rdp_recurse(arc, 0, arc.size() - 1, tolerance, arc_flags);
    for (std::size_t i = 0; i < arc.size(); ++i)
      if (arc_flags[i]) flags[idx[i]] = 1;
  }

  Ring2 out;
  for (std::size_t i = 0; i < n; ++i)
    if (flags[i]) out.push_back(ring[i]);
  if (out.size() < 3) {
    // Degenerate fallback: retain the two anchors plus the max-deviation point.
    out = {ring[0], ring[far_i]};
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || i == far_i) continue;
      double d = norm2(ring[i] - ring[0]) + norm2(ring[i] - ring[far_i]);
      if (d > best) { best = d; best_i = i; }
    }
    out.insert(out.begin() + 1, ring[best_i]);
  }
  return out;
}

std::vector<Vec3> ring_points(const Polygon3& poly, const std::vector<Vec3>& pool) {
  std::vector<Vec3> pts;
  pts.reserve(poly.ring.size());
  for (std::uint32_t id : poly.ring) pts.push_back(pool[id]);
  return pts;
}

}  // namespace layoutkit::geom

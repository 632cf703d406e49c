#include "layoutkit/fit/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "layoutkit/fit/losses.hpp"
#include "layoutkit/geom/boolean2d.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::fit {

using geom::Plane;
using geom::Vec2;
using geom::Vec3;

namespace {

constexpr double kMergeNormalDot = 0.93969262078590838;  // cos(20 deg)

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

// Step (1): union pool vertices closer than tau_merge, nearest pairs first.
// A merge is rejected when the merged vertex cannot sit on all owning
// planes within the fit tolerance (near-parallel owners).
int merge_vertex_pairs(PrototypeSet& set, double tau_merge) {
  const std::size_t nv = set.vertices.size();
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);

  struct Pair {
    double dist;
    int a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t j = i + 1; j < nv; ++j) {
      double d = geom::norm(set.vertices[i] - set.vertices[j]);
      if (d < tau_merge) pairs.push_back({d, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return x.dist < y.dist || (x.dist == y.dist && (x.a < y.a || (x.a == y.a && x.b < y.b)));
  });

  auto owners = vertex_owners(set);
  int merged = 0;
  for (const Pair& pr : pairs) {
    int ra = find_root(parent, pr.a);
    int rb = find_root(parent, pr.b);
    if (ra == rb) continue;
    if (ra > rb) std::swap(ra, rb);
    if (geom::norm(set.vertices[ra] - set.vertices[rb]) >= tau_merge) continue;

    std::vector<int> joint = owners[ra];
    for (int p : owners[rb])
      if (std::find(joint.begin(), joint.end(), p) == joint.end()) joint.push_back(p);
    std::sort(joint.begin(), joint.end());

    Vec3 mid = (set.vertices[ra] + set.vertices[rb]) * 0.5;
    Vec3 proj = project_vertex(mid, joint, set, false).position;
    double resid = 0.0;
    for (int p : joint)
      resid = std::max(resid, std::abs(set.polygons[p].plane.signed_distance(proj)));
    if (resid > kFitTol) continue;  // owners disagree; keep the vertices apart

    parent[rb] = ra;
    set.vertices[ra] = proj;
    owners[ra] = joint;
    ++merged;
  }
  if (merged == 0) return 0;

  for (geom::Polygon3& poly : set.polygons) {
    for (std::uint32_t& v : poly.ring)
      v = static_cast<std::uint32_t>(find_root(parent, static_cast<int>(v)));
  }
  compact(set);
  return merged;
}

// Step (2): RDP per polygon in plane coordinates; vertices shared with
// other polygons are never removed.
int rdp_rings(PrototypeSet& set, double tau_merge) {
  auto owners = vertex_owners(set);
  int removed = 0;
  for (geom::Polygon3& poly : set.polygons) {
    if (poly.ring.size() <= 3) continue;
    auto basis = poly.plane.basis();
    geom::Ring2 ring2(poly.ring.size());
    std::vector<char> keep(poly.ring.size(), 0);
    for (std::size_t i = 0; i < poly.ring.size(); ++i) {
      ring2[i] = poly.plane.to_plane(set.vertices[poly.ring[i]], basis);
      keep[i] = owners[poly.ring[i]].size() >= 2 ? 1 : 0;
    }
    geom::Ring2 simplified = geom::rdp_simplify(ring2, tau_merge, keep);
    if (simplified.size() >= poly.ring.size()) continue;

    // Map retained 2D points back to ring ids by order.
    std::vector<std::uint32_t> new_ring;
    std::size_t cursor = 0;
    for (const Vec2& q : simplified) {
      while (cursor < ring2.size() && !(ring2[cursor] == q)) ++cursor;
      if (cursor >= ring2.size()) break;
      new_ring.push_back(poly.ring[cursor]);
      ++cursor;
    }
    if (new_ring.size() == simplified.size() && new_ring.size() >= 3) {
      removed += static_cast<int>(poly.ring.size() - new_ring.size());
      poly.ring = std::move(new_ring);
    }
  }
  if (removed > 0) compact(set);
  return removed;
}

double min_vertex_surface_distance(const PrototypeSet& set, std::size_t p, std::size_t q) {
  std::vector<Vec3> ring_p = geom::ring_points(set.polygons[p], set.vertices);
  std::vector<Vec3> ring_q = geom::ring_points(set.polygons[q], set.vertices);
  geom::PolygonView vp{ring_p, set.polygons[p].plane};
  geom::PolygonView vq{ring_q, set.polygons[q].plane};
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& v : ring_p) best = std::min(best, geom::point_to_polygon_distance(v, vq));
  for (const Vec3& v : ring_q) best = std::min(best, geom::point_to_polygon_distance(v, vp));
  return best;
}

double prox_of(const PrototypeSet& set, std::span<const Vec3> skeleton, ExecMode mode) {
  FitState st = FitState::build(set, false);
  return loss_prox(st, skeleton, nullptr, mode);
}

// Step (3): merge polygon pairs that are close, near-parallel and share a
// class, unless L_prox degrades or the vertex pool would grow.
int merge_polygon_pairs(PrototypeSet& set, double tau_merge,
                        std::span<const Vec3> skeleton, ExecMode mode, int* rejected) {
  int merges = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    double base_prox = skeleton.empty() ? 0.0 : prox_of(set, skeleton, mode);
    for (std::size_t p = 0; p < set.polygons.size() && !changed; ++p) {
      for (std::size_t q = p + 1; q < set.polygons.size() && !changed; ++q) {
        if (set.polygons[p].sem_class != set.polygons[q].sem_class) continue;
        double ndot = geom::dot(set.polygons[p].plane.normal, set.polygons[q].plane.normal);
        if (std::abs(ndot) < kMergeNormalDot) continue;
        if (set.polygons[p].ring.size() < 3 || set.polygons[q].ring.size() < 3) continue;
        if (min_vertex_surface_distance(set, p, q) >= tau_merge) continue;

        // Refit a joint plane and union the footprints in its coordinates.
        std::vector<Vec3> pts = geom::ring_points(set.polygons[p], set.vertices);
        std::vector<Vec3> pts_q = geom::ring_points(set.polygons[q], set.vertices);
        pts.insert(pts.end(), pts_q.begin(), pts_q.end());
        Plane joint;
        try {
          Vec3 ref = set.polygons[p].plane.normal;
          Vec3 nq = set.polygons[q].plane.normal;
          joint = geom::fit_plane(pts, {ref, ndot >= 0 ? nq : -nq});
        } catch (const std::exception&) {
          continue;
        }
        auto basis = joint.basis();
        auto to2 = [&](const std::vector<Vec3>& ring) {
          geom::Ring2 r(ring.size());
          for (std::size_t i = 0; i < ring.size(); ++i) r[i] = joint.to_plane(ring[i], basis);
          return r;
        };
        geom::Polygon2 poly_p{to2(geom::ring_points(set.polygons[p], set.vertices)), {}};
        geom::Polygon2 poly_q{to2(geom::ring_points(set.polygons[q], set.vertices)), {}};
        auto unioned = geom::polygon_union_2d({poly_p, poly_q});
        if (unioned.size() != 1) continue;  // not actually contiguous
        geom::Ring2 outline = geom::rdp_simplify(
            geom::collapse_collinear(unioned[0].outer, 1e-9), tau_merge);
        if (outline.size() < 3 || !geom::ring_is_simple(outline)) continue;

        // Build the candidate set: replace p and q with the merged polygon.
        PrototypeSet cand = set;
        geom::Polygon3 merged_poly;
        merged_poly.plane = joint;
        merged_poly.sem_class = set.polygons[p].sem_class;
        for (const Vec2& q2 : outline) {
          Vec3 w = joint.to_world(q2, basis);
          // Reuse a source ring vertex when the outline point coincides.
          std::uint32_t best_id = UINT32_MAX;
          double best_d = 1e-7;
          for (std::uint32_t vid : set.polygons[p].ring) {
            double d = geom::norm(set.vertices[vid] - w);
            if (d < best_d) { best_d = d; best_id = vid; }
          }
          for (std::uint32_t vid : set.polygons[q].ring) {
            double d = geom::norm(set.vertices[vid] - w);
            if (d < best_d) { best_d = d; best_id = vid; }
          }
          if (best_id == UINT32_MAX) {
            best_id = static_cast<std::uint32_t>(cand.vertices.size());
            cand.vertices.push_back(w);
          }
          if (merged_poly.ring.empty() || merged_poly.ring.back() != best_id)
            merged_poly.ring.push_back(best_id);
        }
        if (merged_poly.ring.size() < 3) continue;
        cand.polygons[p] = merged_poly;
        cand.polygons.erase(cand.polygons.begin() + static_cast<std::ptrdiff_t>(q));
        compact(cand);
        project_all_vertices(cand);
        if (!all_rings_simple(cand)) { if (rejected) ++*rejected; continue; }
        if (cand.vertices.size() > set.vertices.size()) { if (rejected) ++*rejected; continue; }

        if (!skeleton.empty()) {
          double cand_prox = prox_of(cand, skeleton, mode);
          if (cand_prox > base_prox * 1.10 + 1e-12) {
            if (rejected) ++*rejected;
            continue;
          }
        }
        set = std::move(cand);
        ++merges;
        changed = true;
      }
    }
  }
  return merges;
}

}  // namespace

MergeReport merge_and_simplify(PrototypeSet& set, double tau_merge,
                               std::span<const Vec3> skeleton_points, ExecMode mode) {
  MergeReport report;
  report.merged_vertices = merge_vertex_pairs(set, tau_merge);
  report.rdp_removed = rdp_rings(set, tau_merge);
  report.merged_polygons =
      merge_polygon_pairs(set, tau_merge, skeleton_points, mode, &report.rejected_polygon_merges);
  compact(set);
  return report;
}

}  // namespace layoutkit::fit

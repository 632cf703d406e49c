#include "layoutkit/fit/init.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "layoutkit/geom/delaunay.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::fit {

using geom::Plane;
using geom::Ring2;
using geom::Vec2;
using geom::Vec3;

namespace {

struct PlaneSplit {
  Plane plane;
  std::vector<std::uint32_t> inliers;
};

// RANSAC split of one superpoint's vertices into planes, seeded per
// superpoint for determinism. Refits each winner by least squares.
std::vector<PlaneSplit> ransac_planes(const std::vector<Vec3>& pts, double inlier_tol,
                                      int trials, int min_points, std::uint64_t seed) {
  std::vector<PlaneSplit> out;
  std::vector<std::uint32_t> active(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) active[i] = static_cast<std::uint32_t>(i);
  std::mt19937_64 rng(seed);

  while (static_cast<int>(active.size()) >= min_points && out.size() < 8) {
    int best_count = 0;
    Plane best_plane;
    for (int trial = 0; trial < trials; ++trial) {
      std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
      Vec3 a = pts[active[pick(rng)]];
      Vec3 b = pts[active[pick(rng)]];
      Vec3 c = pts[active[pick(rng)]];
      Vec3 n = geom::cross(b - a, c - a);
      double len = geom::norm(n);
      if (len < 1e-12) continue;
      Plane cand{n / len, geom::dot(n / len, a)};
      int count = 0;
      for (std::uint32_t id : active)
        if (std::abs(cand.signed_distance(pts[id])) <= inlier_tol) ++count;
      if (count > best_count) {
        best_count = count;
        best_plane = cand;
      }
    }
    if (best_count < min_points) break;

    std::vector<std::uint32_t> inliers, rest;
    for (std::uint32_t id : active) {
      if (std::abs(best_plane.signed_distance(pts[id])) <= inlier_tol) inliers.push_back(id);
      else rest.push_back(id);
    }
    // Least-squares refinement, then re-collect.
    std::vector<Vec3> in_pts;
    in_pts.reserve(inliers.size());
    for (std::uint32_t id : inliers) in_pts.push_back(pts[id]);
    try {
      best_plane = geom::fit_plane(in_pts, {best_plane.normal});
    } catch (const std::exception&) {
      // keep the sampled plane
    }
    inliers.clear();
    rest.clear();
    for (std::uint32_t id : active) {
      if (std::abs(best_plane.signed_distance(pts[id])) <= inlier_tol) inliers.push_back(id);
      else rest.push_back(id);
    }
    if (static_cast<int>(inliers.size()) < min_points) break;
    out.push_back({best_plane, inliers});
    active = std::move(rest);
  }
  return out;
}

}  // namespace

PrototypeSet init_polygons(const skel::SkeletonBundle& bundle, const FitConfig& cfg,
                           const skel::SuperpointConfig& sp_cfg) {
  const io::LabeledMesh& mesh = bundle.structural;
  PrototypeSet set;
  if (mesh.vertices.empty()) return set;

  // Vertices sit in exactly one superpoint, so a cluster loses the boundary
  // row shared with its neighbors. Widen each cluster's support by adjacent
  // vertices lying on its plane before fitting.
  auto adjacency = io::vertex_adjacency(mesh);

  for (const skel::Superpoint& sp : bundle.superpoints) {
    if (sp.vertices.size() < 3) {
      LK_WARN("superpoint %d skipped: %zu vertices", sp.id, sp.vertices.size());
      continue;
    }
    std::vector<char> in_support(mesh.vertices.size(), 0);
    std::vector<std::uint32_t> support = sp.vertices;
    for (std::uint32_t v : sp.vertices) in_support[v] = 1;
    for (std::uint32_t v : sp.vertices) {
      for (std::uint32_t nb : adjacency[v]) {
        if (in_support[nb]) continue;
        if (std::abs(sp.plane.signed_distance(mesh.vertices[nb])) <= sp_cfg.plane_dist) {
          in_support[nb] = 1;
          support.push_back(nb);
        }
      }
    }
    std::vector<Vec3> pts;
    pts.reserve(support.size());
    for (std::uint32_t v : support) pts.push_back(mesh.vertices[v]);

    auto splits = ransac_planes(pts, sp_cfg.plane_dist, cfg.ransac_trials,
                                std::min<int>(cfg.min_polygon_points,
                                              static_cast<int>(pts.size())),
                                cfg.seed ^ (0x9e3779b97f4a7c15ULL * (sp.id + 1)));
    if (splits.empty() && pts.size() >= 3) {
      // fall back to a single fitted plane over the whole superpoint
      try {
        Plane pl = geom::fit_plane(pts, {sp.plane.normal});
        PlaneSplit all;
        all.plane = pl;
        for (std::size_t i = 0; i < pts.size(); ++i)
          all.inliers.push_back(static_cast<std::uint32_t>(i));
        splits.push_back(std::move(all));
      } catch (const std::exception&) {
        LK_WARN("superpoint %d skipped: degenerate geometry", sp.id);
        continue;
      }
    }

    for (const PlaneSplit& split : splits) {
      auto basis = split.plane.basis();
      std::vector<Vec2> pts2;
      pts2.reserve(split.inliers.size());
      // Bound the hull cost on dense superpoints with a deterministic stride.
      std::size_t stride = std::max<std::size_t>(1, split.inliers.size() / 8000);
      for (std::size_t i = 0; i < split.inliers.size(); i += stride) {
        Vec3 proj = split.plane.project(pts[split.inliers[i]]);
        pts2.push_back(split.plane.to_plane(proj, basis));
      }
      if (pts2.size() < 3) {
        LK_WARN("superpoint %d plane skipped: %zu boundary points", sp.id, pts2.size());
        continue;
      }
      Ring2 hull = geom::concave_hull(pts2, cfg.alpha_hull);
      if (hull.size() < 3) hull = geom::convex_hull(pts2);
      if (hull.size() < 3) {
        LK_WARN("superpoint %d plane skipped: degenerate hull", sp.id);
        continue;
      }
      Ring2 outline = geom::rdp_simplify(geom::collapse_collinear(hull, 1e-9), cfg.tau_merge);
      if (outline.size() < 3 || !geom::ring_is_simple(outline)) continue;

      geom::Polygon3 poly;
      poly.plane = split.plane;
      poly.sem_class = static_cast<int>(sp.label);
      for (const Vec2& q : outline) {
        poly.ring.push_back(static_cast<std::uint32_t>(set.vertices.size()));
        set.vertices.push_back(split.plane.to_world(q, basis));
      }
      set.polygons.push_back(std::move(poly));
    }
  }
  project_all_vertices(set);
  return set;
}

}  // namespace layoutkit::fit

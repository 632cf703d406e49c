#include "layoutkit/skel/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>

#include "layoutkit/geom/kdtree.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::skel {

using geom::Vec3;
using io::LabeledMesh;
using io::SemanticClass;

std::vector<SemanticClass> vote_vertex_labels(const LabeledMesh& mesh,
                                              const std::vector<io::LabeledPoint>& points,
                                              ExecMode mode) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<SemanticClass> labels(nv, SemanticClass::Unknown);
  if (nv == 0 || points.empty()) return labels;

  geom::KdTree3 tree(mesh.vertices);

  // Parallel map: nearest vertex per point; votes accumulate in point order.
  std::vector<int> nearest(points.size());
  indexed_for(mode, static_cast<std::int64_t>(points.size()),
              [&](std::size_t i) { nearest[i] = tree.nearest(points[i].position); });

  std::vector<std::array<std::uint32_t, io::kNumSemanticClasses>> votes(
      nv, std::array<std::uint32_t, io::kNumSemanticClasses>{});
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (nearest[i] < 0) continue;
    votes[nearest[i]][static_cast<int>(points[i].label)]++;
  }

  for (std::size_t v = 0; v < nv; ++v) {
    std::uint32_t best = 0;
    int best_class = 0;  // lowest id wins ties
    for (int c = 0; c < io::kNumSemanticClasses; ++c) {
      if (votes[v][c] > best) {
        best = votes[v][c];
        best_class = c;
      }
    }
    labels[v] = best == 0 ? SemanticClass::Unknown : static_cast<SemanticClass>(best_class);
  }
  return labels;
}

namespace {

// Incrementally maintained plane fit from accumulated point moments.
struct RunningPlane {
  Vec3 sum{0, 0, 0};
  double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;
  std::size_t n = 0;
  geom::Plane plane;
  Vec3 orient{0, 0, 1};

  void add(const Vec3& p) {
    sum += p;
    sxx += p.x * p.x; sxy += p.x * p.y; sxz += p.x * p.z;
    syy += p.y * p.y; syz += p.y * p.z; szz += p.z * p.z;
    ++n;
  }
  void refit() {
    if (n < 3) return;
    double inv = 1.0 / static_cast<double>(n);
    Vec3 c = sum * inv;
    double a00 = sxx - c.x * sum.x, a01 = sxy - c.x * sum.y, a02 = sxz - c.x * sum.z;
    double a11 = syy - c.y * sum.y, a12 = syz - c.y * sum.z, a22 = szz - c.z * sum.z;
    auto eig = geom::sym_eigen3(a00, a01, a02, a11, a12, a22);
    Vec3 nrm = eig.vectors[0];
    double len = geom::norm(nrm);
    if (len < 1e-300) return;
    nrm = nrm / len;
    if (geom::dot(nrm, orient) < 0) nrm = -nrm;
    plane = geom::Plane{nrm, geom::dot(nrm, c)};
  }
};

}  // namespace

std::vector<Superpoint> compute_superpoints(const LabeledMesh& mesh, const SuperpointConfig& cfg) {
  const std::size_t nt = mesh.triangles.size();
  const std::size_t nv = mesh.vertices.size();
  std::vector<Superpoint> out;
  if (nt == 0) {
    // Isolated vertices (no triangles) each form their own cluster.
    for (std::size_t v = 0; v < nv; ++v) {
      Superpoint sp;
      sp.id = static_cast<int>(v);
      sp.vertices = {static_cast<std::uint32_t>(v)};
      sp.label = mesh.vertex_labels.empty() ? SemanticClass::Unknown : mesh.vertex_labels[v];
      out.push_back(std::move(sp));
    }
    return out;
  }

  auto tri_adj = io::triangle_adjacency(mesh);
  const double cos_thresh = std::cos(cfg.normal_angle_deg * M_PI / 180.0);

  std::vector<double> areas(nt);
  std::vector<Vec3> normals(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    areas[t] = mesh.triangle_area(t);
    normals[t] = mesh.triangle_normal(t);
  }

  std::vector<std::size_t> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return areas[a] > areas[b] || (areas[a] == areas[b] && a < b);
  });

  std::vector<int> region_of(nt, -1);
  int n_regions = 0;

  for (std::size_t seed : order) {
    if (region_of[seed] >= 0) continue;
    int region = n_regions++;
    RunningPlane rp;
    rp.orient = normals[seed];
    for (int k = 0; k < 3; ++k) rp.add(mesh.vertices[mesh.triangles[seed][k]]);
    rp.refit();
    if (rp.n < 3 || geom::norm2(rp.plane.normal) < 0.5)
      rp.plane = geom::Plane{normals[seed], geom::dot(normals[seed], mesh.triangle_centroid(seed))};

    region_of[seed] = region;
    std::queue<std::size_t> frontier;
    frontier.push(seed);
    while (!frontier.empty()) {
      std::size_t t = frontier.front();
      frontier.pop();
      for (int k = 0; k < 3; ++k) {
        std::int64_t nb = tri_adj[t][k];
        if (nb < 0 || region_of[nb] >= 0) continue;
        if (geom::dot(normals[nb], rp.plane.normal) < cos_thresh) continue;
        bool coplanar = true;
        for (int j = 0; j < 3 && coplanar; ++j)
          coplanar = std::abs(rp.plane.signed_distance(
                         mesh.vertices[mesh.triangles[nb][j]])) <= cfg.plane_dist;
        if (!coplanar) continue;
        region_of[nb] = region;
        for (int j = 0; j < 3; ++j) rp.add(mesh.vertices[mesh.triangles[nb][j]]);
        rp.refit();
        frontier.push(nb);
      }
    }
  }

  // Assign each vertex to the region holding the most incident triangle area.
  auto assign_vertices = [&](std::vector<std::vector<std::uint32_t>>& verts_of) {
    std::vector<std::vector<std::pair<int, double>>> weight(nv);
    for (std::size_t t = 0; t < nt; ++t) {
      for (int k = 0; k < 3; ++k) {
        auto& w = weight[mesh.triangles[t][k]];
        bool found = false;
        for (auto& [r, a] : w)
          if (r == region_of[t]) { a += areas[t]; found = true; break; }
        if (!found) w.emplace_back(region_of[t], areas[t]);
      }
    }
    verts_of.assign(static_cast<std::size_t>(std::max(n_regions, 1)), {});
    for (std::size_t v = 0; v < nv; ++v) {
      if (weight[v].empty()) continue;  // isolated vertex, dropped
      int best_r = -1;
      double best_a = -1.0;
      for (auto& [r, a] : weight[v]) {
        if (a > best_a || (a == best_a && r < best_r)) { best_a = a; best_r = r; }
      }
      verts_of[best_r].push_back(static_cast<std::uint32_t>(v));
    }
  };

  std::vector<std::vector<std::uint32_t>> verts_of;
  assign_vertices(verts_of);

  // Merge undersized regions into the most coplanar adjacent region.
  std::vector<geom::Plane> region_plane(n_regions);
  auto refit_region_planes = [&]() {
    std::vector<RunningPlane> acc(n_regions);
    for (std::size_t t = 0; t < nt; ++t) {
      int r = region_of[t];
      if (acc[r].n == 0) acc[r].orient = normals[t];
      for (int k = 0; k < 3; ++k) acc[r].add(mesh.vertices[mesh.triangles[t][k]]);
    }
    for (int r = 0; r < n_regions; ++r) {
      acc[r].refit();
      region_plane[r] = acc[r].plane;
    }
  };
  refit_region_planes();

  bool merged = true;
  int rounds = 0;
  while (merged && rounds++ < 8) {
    merged = false;
    std::vector<std::vector<std::size_t>> tris_of(n_regions);
    for (std::size_t t = 0; t < nt; ++t) tris_of[region_of[t]].push_back(t);
    for (int r = 0; r < n_regions; ++r) {
      if (verts_of[r].empty() ||
          static_cast<int>(verts_of[r].size()) >= cfg.min_vertices)
        continue;
      // Neighbor regions across triangle edges.
      int best_nb = -1;
      double best_dot = -2.0;
      for (std::size_t t : tris_of[r]) {
        if (region_of[t] != r) continue;
        for (int k = 0; k < 3; ++k) {
          std::int64_t nb = tri_adj[t][k];
          if (nb < 0 || region_of[nb] == r) continue;
          int nr = region_of[nb];
          if (verts_of[nr].empty()) continue;
          double d = std::abs(geom::dot(region_plane[r].normal, region_plane[nr].normal));
          if (d > best_dot || (d == best_dot && nr < best_nb)) { best_dot = d; best_nb = nr; }
        }
      }
      if (best_nb < 0) continue;
      for (std::size_t t : tris_of[r]) region_of[t] = best_nb;
      merged = true;
    }
    if (merged) {
      assign_vertices(verts_of);
      refit_region_planes();
    }
  }

  // Compact regions into superpoints.
  for (int r = 0; r < n_regions; ++r) {
    if (verts_of[r].empty()) continue;
    Superpoint sp;
    sp.id = static_cast<int>(out.size());
    sp.vertices = verts_of[r];
    std::sort(sp.vertices.begin(), sp.vertices.end());
    sp.plane = region_plane[r];

    if (!mesh.vertex_labels.empty()) {
      std::array<std::uint32_t, io::kNumSemanticClasses> counts{};
      for (std::uint32_t v : sp.vertices) counts[static_cast<int>(mesh.vertex_labels[v])]++;
      std::uint32_t best = 0;
      int best_c = 0;
      for (int c = 1; c < io::kNumSemanticClasses; ++c) {  // skip unknown unless unanimous
        if (counts[c] > best) { best = counts[c]; best_c = c; }
      }
      sp.label = best == 0 ? SemanticClass::Unknown : static_cast<SemanticClass>(best_c);
    }
    out.push_back(std::move(sp));
  }
  return out;
}

std::vector<SemanticClass> refine_labels(const LabeledMesh& mesh,
                                         const std::vector<Superpoint>& superpoints) {
  std::vector<SemanticClass> labels = mesh.vertex_labels;
  for (const Superpoint& sp : superpoints) {
    std::array<std::uint32_t, io::kNumSemanticClasses> counts{};
    for (std::uint32_t v : sp.vertices) counts[static_cast<int>(labels[v])]++;
    std::uint32_t best = 0;
    int best_c = 0;
    for (int c = 1; c < io::kNumSemanticClasses; ++c) {
      if (counts[c] > best) { best = counts[c]; best_c = c; }
    }
    SemanticClass lbl = best == 0 ? SemanticClass::Unknown : static_cast<SemanticClass>(best_c);
    for (std::uint32_t v : sp.vertices) labels[v] = lbl;
  }
  return labels;
}

SkeletonBundle split_by_category(const LabeledMesh& mesh,
                                 const std::vector<Superpoint>& superpoints) {
  SkeletonBundle bundle;
  LabeledMesh* target[4] = {&bundle.structural, &bundle.inaccurate, &bundle.objects,
                            &bundle.stairs};
  std::vector<std::vector<std::uint32_t>> remap(4,
                                                std::vector<std::uint32_t>(mesh.vertices.size(),
                                                                           UINT32_MAX));

  auto map_vertex = [&](int cat, std::uint32_t v) {
    if (remap[cat][v] == UINT32_MAX) {
      remap[cat][v] = static_cast<std::uint32_t>(target[cat]->vertices.size());
      target[cat]->vertices.push_back(mesh.vertices[v]);
      target[cat]->vertex_labels.push_back(mesh.vertex_labels[v]);
    }
    return remap[cat][v];
  };

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    int counts[4] = {0, 0, 0, 0};
    for (int k = 0; k < 3; ++k)
      counts[static_cast<int>(io::coarse_category(mesh.vertex_labels[tri[k]]))]++;
    int cat = 0;
    for (int c = 1; c < 4; ++c)
      if (counts[c] > counts[cat]) cat = c;
    target[cat]->triangles.push_back(
        {map_vertex(cat, tri[0]), map_vertex(cat, tri[1]), map_vertex(cat, tri[2])});
  }

  // Restrict superpoints to the structural submesh.
  for (const Superpoint& sp : superpoints) {
    Superpoint restricted;
    restricted.plane = sp.plane;
    restricted.label = sp.label;
    for (std::uint32_t v : sp.vertices) {
      if (remap[0][v] != UINT32_MAX) restricted.vertices.push_back(remap[0][v]);
    }
    if (restricted.vertices.empty()) continue;
    restricted.id = static_cast<int>(bundle.superpoints.size());
    bundle.superpoints.push_back(std::move(restricted));
  }
  return bundle;
}

}  // namespace layoutkit::skel

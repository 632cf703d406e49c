#pragma once
#include <span>

#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/parallel.hpp"

namespace layoutkit::fit {

struct MergeReport {
  int merged_vertices = 0;
  int rdp_removed = 0;
  int merged_polygons = 0;
  int rejected_polygon_merges = 0;
};

// (1) merge vertex pairs closer than tau_merge (the source of shared
// vertices), (2) per-polygon RDP with tolerance tau_merge keeping shared
// vertices, (3) merge close same-class polygon pairs with normals within
// 20 degrees, rejected when L_prox grows more than 10% or the pool would
// grow. Never increases the vertex pool and leaves no dangling vertices.
MergeReport merge_and_simplify(PrototypeSet& set, double tau_merge,
                               std::span<const geom::Vec3> skeleton_points,
                               ExecMode mode = ExecMode::Parallel);

}  // namespace layoutkit::fit

#pragma once
#include <cstdint>
#include <vector>

#include "layoutkit/geom/plane.hpp"
#include "layoutkit/io/mesh.hpp"
#include "layoutkit/io/observation.hpp"
#include "layoutkit/parallel.hpp"

namespace layoutkit::skel {

struct SuperpointConfig {
  double normal_angle_deg = 20.0;  // theta_sp
  double plane_dist = 0.05;        // delta_sp, meters
  int min_vertices = 10;
};

// A connected, near-planar cluster of mesh vertices.
struct Superpoint {
  int id = 0;
  std::vector<std::uint32_t> vertices;
  geom::Plane plane;
  io::SemanticClass label = io::SemanticClass::Unknown;
};

// The four-category split of the input mesh. Submeshes partition the input
// triangles; superpoints cover the structural submesh.
struct SkeletonBundle {
  io::LabeledMesh structural;
  io::LabeledMesh objects;
  io::LabeledMesh stairs;
  io::LabeledMesh inaccurate;
  std::vector<Superpoint> superpoints;  // over structural vertices
};

// Plurality vote of back-projected points onto their nearest mesh vertex.
// Zero-vote vertices stay unknown; ties resolve to the lowest class id.
std::vector<io::SemanticClass> vote_vertex_labels(const io::LabeledMesh& mesh,
                                                  const std::vector<io::LabeledPoint>& points,
                                                  ExecMode mode = ExecMode::Parallel);

// Greedy region growing over triangle adjacency, seeds in area-descending
// order. Clusters smaller than min_vertices merge into the most coplanar
// neighbor. Every vertex lands in exactly one superpoint.
std::vector<Superpoint> compute_superpoints(const io::LabeledMesh& mesh,
                                            const SuperpointConfig& cfg = {});

// Each vertex takes its superpoint's plurality label; unknown votes are
// ignored unless the cluster is all-unknown. Idempotent.
std::vector<io::SemanticClass> refine_labels(const io::LabeledMesh& mesh,
                                             const std::vector<Superpoint>& superpoints);

// Partition triangles by the majority coarse category of their vertices.
SkeletonBundle split_by_category(const io::LabeledMesh& mesh,
                                 const std::vector<Superpoint>& superpoints);

}  // namespace layoutkit::skel

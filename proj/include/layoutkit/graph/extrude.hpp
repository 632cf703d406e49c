#pragma once
#include <vector>

#include "layoutkit/geom/delaunay.hpp"
#include "layoutkit/geom/plane.hpp"
#include "layoutkit/geom/polygon.hpp"
#include "layoutkit/graph/levels.hpp"

namespace layoutkit::graph {

struct CeilingCandidate {
  geom::Plane plane;
  geom::Polygon2 footprint;  // XY projection
  double area = 0.0;
};

enum class FaceKind { Floor, Ceiling, Wall, Seam };

struct ShellFace {
  FaceKind kind = FaceKind::Floor;
  std::vector<geom::Vec3> ring;
};

struct RoomShell {
  std::vector<ShellFace> faces;
  bool used_default_ceiling = false;

  // Entity-level polygons derived from the shell.
  std::vector<geom::Vec3> floor_ring;
  std::vector<std::vector<geom::Vec3>> wall_polys;
  std::vector<std::vector<geom::Vec3>> ceiling_polys;
};

// Fig.-style extrusion: CDT the footprint constrained by candidate edges and
// pairwise plane intersection lines, assign triangles to ceiling planes by
// upward rays, extrude to a closed shell with seam rectangles along ceiling
// discontinuities. Falls back to a flat default ceiling with a warning.
RoomShell extrude_room(const geom::Polygon2& footprint,
                       std::vector<CeilingCandidate> candidates,
                       const geom::Plane& floor_plane, const GraphConfig& cfg);

// Every shell edge is incident to exactly two faces (after splitting edges
// at shell vertices lying on them).
bool shell_watertight(const RoomShell& shell);

// Number of ceiling faces pierced by a vertical ray from (xy, below).
int ceiling_hits(const RoomShell& shell, const geom::Vec2& xy);

}  // namespace layoutkit::graph

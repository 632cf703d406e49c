#pragma once
#include <array>
#include <vector>

#include "layoutkit/geom/plane.hpp"
#include "layoutkit/graph/extrude.hpp"
#include "layoutkit/graph/levels.hpp"
#include "layoutkit/io/camera.hpp"
#include "layoutkit/io/mesh.hpp"

namespace layoutkit::graph {

struct StairEdge {
  int level_a = -1, level_b = -1;
  int room_a = -1, room_b = -1;  // room indices (global), -1 when unresolved
  std::vector<geom::Vec3> geometry;  // ramp-plane polygon
  double width = 0.0;
  geom::Plane ramp_plane;
};

// A room's footprint placed on a level (global room indexing).
struct PlacedRoom {
  int level_id = 0;
  geom::Polygon2 footprint;
};

// Connected components of the stair submesh become edges between the levels
// (and rooms) containing their lowest and highest points. Components smaller
// than min_stair_vertices are dropped; single-level components are
// suppressed with a warning.
std::vector<StairEdge> detect_stairs(const io::LabeledMesh& stairs_mesh,
                                     const std::vector<PlacedRoom>& rooms,
                                     const std::vector<Level>& levels, const GraphConfig& cfg);

struct WindowRect {
  int wall_room = -1;   // owning room (global index)
  int wall_index = -1;  // wall polygon within the room
  std::array<geom::Vec3, 4> corners;
};

// Back-projects window-labeled pixels onto room walls, filters outliers by
// local outlier factor, clusters per wall with DBSCAN, and fits axis-aligned
// rectangles (world-up and in-plane-perpendicular axes). Rectangles must
// exceed window_min_size on both sides.
std::vector<WindowRect> detect_windows(const std::vector<io::CameraFrame>& frames,
                                       const std::vector<RoomShell>& rooms,
                                       const GraphConfig& cfg);

}  // namespace layoutkit::graph

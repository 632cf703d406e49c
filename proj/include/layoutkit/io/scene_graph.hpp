#pragma once
#include <array>
#include <string>
#include <vector>

#include "layoutkit/geom/vec.hpp"

namespace layoutkit::io {

struct SceneLevel {
  int id = 0;
  double height_m = 0.0;
};

struct SceneRoom {
  int id = 0;
  int level_id = 0;
  std::vector<geom::Vec3> floor;                  // one boundary ring
  std::vector<std::vector<geom::Vec3>> walls;     // polygons
  std::vector<std::vector<geom::Vec3>> ceilings;  // polygons
  std::vector<std::array<geom::Vec3, 4>> windows; // rectangles
};

enum class EdgeKind { Door, Opening, Stairs };
const char* edge_kind_name(EdgeKind k);

struct SceneEdge {
  EdgeKind kind = EdgeKind::Opening;
  int room_a = -1;
  int room_b = -1;
  std::vector<geom::Vec3> geometry;  // 4-corner rectangle or polygon
  double width_m = 0.0;
};

struct SceneGraph {
  std::vector<SceneLevel> levels;
  std::vector<SceneRoom> rooms;
  std::vector<SceneEdge> edges;

  // Throws InvariantError naming the offending entity. Checks that edge
  // endpoints reference existing rooms and doors are narrower than 1.5 m.
  void validate() const;
  // Distinct vertex count over all geometry (1e-6 quantization).
  std::size_t distinct_vertex_count() const;
};

// Byte-stable writer: fixed key order, coordinates with 6 decimal places.
// write -> read -> write produces identical bytes.
void write_scene_graph(const SceneGraph& graph, const std::string& path);
SceneGraph load_scene_graph(const std::string& path);

}  // namespace layoutkit::io

#pragma once
#include <vector>

#include "layoutkit/graph/extrude.hpp"
#include "layoutkit/graph/features.hpp"
#include "layoutkit/graph/levels.hpp"
#include "layoutkit/graph/rooms.hpp"
#include "layoutkit/io/scene_graph.hpp"

namespace layoutkit::graph {

struct RoomRecord {
  int level_id = 0;
  geom::Polygon2 footprint;
  RoomShell shell;
};

// Openings placed on a level with their floor height resolved.
struct PlacedOpening {
  int room_a = -1, room_b = -1;  // global room indices
  geom::Vec2 a, b;
  double width = 0.0;
  double floor_z = 0.0;
};

// Classifies openings (doors below 1.5 m, strict), attaches stairs and
// windows, cuts door holes out of host walls (up to 4 sub-rectangles), and
// validates the graph. Coordinates are quantized to 1e-6 m.
io::SceneGraph assemble_scene_graph(const std::vector<Level>& levels,
                                    const std::vector<RoomRecord>& rooms,
                                    const std::vector<PlacedOpening>& openings,
                                    const std::vector<StairEdge>& stairs,
                                    const std::vector<WindowRect>& windows,
                                    const GraphConfig& cfg);

}  // namespace layoutkit::graph

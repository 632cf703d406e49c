#pragma once
#include <vector>

#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/geom/polygon.hpp"
#include "layoutkit/graph/levels.hpp"

namespace layoutkit::graph {

// A passage between two segmented rooms found along the watershed boundary.
struct Opening {
  int room_a = -1;
  int room_b = -1;
  geom::Vec2 a, b;      // interface segment endpoints (XY)
  double width = 0.0;   // boundary arc length, meters
};

struct Segmentation {
  std::vector<geom::Polygon2> rooms;  // footprints partitioning the floorplan
  std::vector<Opening> openings;
};

// Distance-transform watershed on a 0.05 m occupancy grid: floorplan
// interior is free, wall footprints dilated by the wall thickness are
// blocked. Every free cell gets a region; blocked interior cells are then
// annexed by the nearest region so footprints partition the floorplan.
// Region interfaces not covered by walls become openings.
Segmentation segment_rooms(const std::vector<geom::Polygon2>& floorplan,
                           const fit::PrototypeSet& proto,
                           const std::vector<std::size_t>& wall_polys,
                           const GraphConfig& cfg);

}  // namespace layoutkit::graph

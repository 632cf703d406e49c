#pragma once
#include <vector>

#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/geom/polygon.hpp"

namespace layoutkit::graph {

struct GraphConfig {
  double level_merge = 0.5;       // h_merge, meters
  double cell_size = 0.05;        // occupancy grid cell
  double wall_thickness = 0.10;   // wall dilation radius for blocking
  double seed_separation = 0.4;   // watershed seed suppression radius
  double room_rdp = 0.05;         // footprint vectorization tolerance
  double door_width_max = 1.5;    // strict: >= 1.5 stays an opening
  double door_height = 2.1;       // clamped to the local ceiling
  double default_ceiling = 2.5;   // fallback extrusion height
  int max_ceilings = 30;          // largest candidates kept per room
  int min_stair_vertices = 50;
  int window_min_cluster = 10;    // k
  double window_min_size = 0.30;  // meters, width and height
  double window_dbscan_eps = 0.2;
  int window_dbscan_minpts = 5;
  int lof_k = 20;
  double lof_threshold = 1.5;
  int window_pixel_stride = 1;
};

// One building level: floor height plus the prototype polygons feeding it.
struct Level {
  int id = 0;
  double height = 0.0;  // area-weighted floor height
  std::vector<std::size_t> floor_polys;
  std::vector<std::size_t> ceiling_polys;
  std::vector<geom::Polygon2> floorplan;  // XY footprint, possibly several components
};

// 1D clustering of floor polygons by area-weighted plane height; clusters
// closer than level_merge fuse. Throws InputError when no floors exist.
std::vector<Level> detect_levels(const fit::PrototypeSet& proto, const GraphConfig& cfg);

// Union of the level's floor footprints with its ceiling-candidate
// footprints, minus interior voids of higher levels' floors.
// Throws InputError when the union comes out empty.
void build_floorplan(Level& level, const fit::PrototypeSet& proto,
                     const std::vector<Level>& levels, const GraphConfig& cfg);

// XY projection of a prototype polygon ring.
geom::Polygon2 polygon_xy(const fit::PrototypeSet& proto, std::size_t poly);

}  // namespace layoutkit::graph

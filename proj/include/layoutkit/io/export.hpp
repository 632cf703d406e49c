#pragma once
#include <string>
#include <vector>

#include "layoutkit/geom/polygon.hpp"
#include "layoutkit/geom/vec.hpp"

namespace layoutkit::io {

// A labeled polygon destined for OBJ export.
struct ExportPolygon {
  int sem_class = 0;
  std::vector<geom::Vec3> ring;
};

// OBJ with one `g <class>_<index>` group per polygon, fan-triangulated.
void write_layout_obj(const std::vector<ExportPolygon>& polys, const std::string& path);

// Per-level floorplan SVG for inspection: polylines only, 1 unit = 1 m.
void write_floorplan_svg(const std::vector<geom::Polygon2>& rooms,
                         const std::vector<geom::Polygon2>& floorplan, const std::string& path);

}  // namespace layoutkit::io

#include "layoutkit/graph/levels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "layoutkit/geom/boolean2d.hpp"
#include "layoutkit/io/semantic.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::graph {

using geom::Polygon2;
using geom::Ring2;
using geom::Vec2;

Polygon2 polygon_xy(const fit::PrototypeSet& proto, std::size_t poly) {
  Polygon2 out;
  for (std::uint32_t v : proto.polygons[poly].ring)
    out.outer.push_back({proto.vertices[v].x, proto.vertices[v].y});
  if (geom::ring_area(out.outer) < 0) std::reverse(out.outer.begin(), out.outer.end());
  return out;
}

std::vector<Level> detect_levels(const fit::PrototypeSet& proto, const GraphConfig& cfg) {
  struct FloorInfo {
    std::size_t poly;
    double height;
    double area;
  };
  std::vector<FloorInfo> floors;
  for (std::size_t p = 0; p < proto.polygons.size(); ++p) {
    const geom::Polygon3& poly = proto.polygons[p];
    if (poly.sem_class != static_cast<int>(io::SemanticClass::Floor) || poly.ring.size() < 3)
      continue;
    floors.push_back({p, fit::polygon_centroid(proto, p).z, fit::polygon_area_3d(proto, p)});
  }
  if (floors.empty()) throw InputError("detect_levels: no floor polygons in prototype");

  std::sort(floors.begin(), floors.end(), [](const FloorInfo& a, const FloorInfo& b) {
    return a.height < b.height || (a.height == b.height && a.poly < b.poly);
  });

  std::vector<Level> levels;
  std::size_t i = 0;
  while (i < floors.size()) {
    std::size_t j = i;
    while (j + 1 < floors.size() && floors[j + 1].height - floors[j].height < cfg.level_merge)
      ++j;
    Level level;
    double wsum = 0.0, hsum = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
      level.floor_polys.push_back(floors[k].poly);
      wsum += floors[k].area;
      hsum += floors[k].area * floors[k].height;
    }
    level.height = wsum > 0 ? hsum / wsum : floors[i].height;
    level.id = static_cast<int>(levels.size());
    levels.push_back(std::move(level));
    i = j + 1;
  }

  // Ceiling candidates: height strictly between this level's floor and the next.
  for (std::size_t li = 0; li < levels.size(); ++li) {
    double lo = levels[li].height;
    double hi = li + 1 < levels.size() ? levels[li + 1].height
                                       : std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < proto.polygons.size(); ++p) {
      const geom::Polygon3& poly = proto.polygons[p];
      if (poly.sem_class != static_cast<int>(io::SemanticClass::Ceiling) ||
          poly.ring.size() < 3)
        continue;
      double h = fit::polygon_centroid(proto, p).z;
      if (h > lo && h < hi) levels[li].ceiling_polys.push_back(p);
    }
  }
  return levels;
}

void build_floorplan(Level& level, const fit::PrototypeSet& proto,
                     const std::vector<Level>& levels, const GraphConfig& cfg) {
  (void)cfg;
  std::vector<Polygon2> pieces;
  for (std::size_t p : level.floor_polys) pieces.push_back(polygon_xy(proto, p));
  for (std::size_t p : level.ceiling_polys) pieces.push_back(polygon_xy(proto, p));
  std::vector<Polygon2> merged = geom::polygon_union_2d(pieces);
  if (merged.empty()) throw InputError("build_floorplan: empty floorplan union");

  // Clip away interior voids of higher levels' floors.
  std::vector<Polygon2> voids;
  for (const Level& other : levels) {
    if (other.height <= level.height) continue;
    std::vector<Polygon2> other_floor;
    for (std::size_t p : other.floor_polys) other_floor.push_back(polygon_xy(proto, p));
    for (const Polygon2& piece : geom::polygon_union_2d(other_floor)) {
      for (const Ring2& hole : piece.holes) {
        Polygon2 v;
        v.outer = hole;
        std::reverse(v.outer.begin(), v.outer.end());
        voids.push_back(std::move(v));
      }
    }
  }
  if (!voids.empty()) {
    merged = geom::polygon_difference_2d(merged, voids);
    if (merged.empty()) throw InputError("build_floorplan: floorplan clipped away entirely");
  }
  level.floorplan = std::move(merged);
}

}  // namespace layoutkit::graph

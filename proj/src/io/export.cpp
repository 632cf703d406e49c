#include "layoutkit/io/export.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "layoutkit/io/semantic.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::io {

void write_layout_obj(const std::vector<ExportPolygon>& polys, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write OBJ: " + path);

  char buf[128];
  std::map<int, int> class_counter;
  std::size_t vertex_base = 1;
  for (const ExportPolygon& poly : polys) {
    int idx = class_counter[poly.sem_class]++;
    out << "g " << semantic_class_name(static_cast<SemanticClass>(poly.sem_class)) << "_" << idx
        << "\n";
    for (const geom::Vec3& v : poly.ring) {
      std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
      out << buf;
    }
    for (std::size_t k = 1; k + 1 < poly.ring.size(); ++k) {
      out << "f " << vertex_base << " " << vertex_base + k << " " << vertex_base + k + 1 << "\n";
    }
    vertex_base += poly.ring.size();
  }
  if (!out) throw InputError("OBJ write failed: " + path);
}

void write_floorplan_svg(const std::vector<geom::Polygon2>& rooms,
                         const std::vector<geom::Polygon2>& floorplan, const std::string& path) {
  double lo_x = 0, lo_y = 0, hi_x = 1, hi_y = 1;
  bool first = true;
  auto grow = [&](const geom::Ring2& r) {
    for (const geom::Vec2& p : r) {
      if (first) { lo_x = hi_x = p.x; lo_y = hi_y = p.y; first = false; }
      lo_x = std::min(lo_x, p.x); hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y); hi_y = std::max(hi_y, p.y);
    }
  };
  for (const auto& p : floorplan) { grow(p.outer); for (const auto& h : p.holes) grow(h); }
  for (const auto& p : rooms) { grow(p.outer); for (const auto& h : p.holes) grow(h); }

  std::ofstream out(path);
  if (!out) throw InputError("cannot write SVG: " + path);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.3f %.3f %.3f %.3f\">\n",
                lo_x - 0.5, lo_y - 0.5, hi_x - lo_x + 1.0, hi_y - lo_y + 1.0);
  out << buf;
  auto emit = [&](const geom::Ring2& r, const char* color, double w) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << w
        << "\" points=\"";
    for (std::size_t i = 0; i <= r.size(); ++i) {
      const geom::Vec2& p = r[i % r.size()];
      std::snprintf(buf, sizeof(buf), "%.4f,%.4f ", p.x, p.y);
      out << buf;
    }
    out << "\"/>\n";
  };
  for (const auto& p : floorplan) {
    emit(p.outer, "#222222", 0.04);
    for (const auto& h : p.holes) emit(h, "#222222", 0.04);
  }
  for (const auto& p : rooms) {
    emit(p.outer, "#1f77b4", 0.02);
    for (const auto& h : p.holes) emit(h, "#1f77b4", 0.02);
  }
  out << "</svg>\n";
}

}  // namespace layoutkit::io

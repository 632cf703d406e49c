#include "layoutkit/graph/rooms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "layoutkit/log.hpp"

namespace layoutkit::graph {

using geom::Polygon2;
using geom::Ring2;
using geom::Vec2;

namespace {

// Exact 1D squared Euclidean distance transform (Felzenszwalb-Huttenlocher).
void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n, 0);
  std::vector<double> z(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) { --k; continue; }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

struct Grid {
  int nx = 0, ny = 0;
  double cell = 0.05;
  Vec2 origin;
  int idx(int x, int y) const { return y * nx + x; }
  Vec2 center(int x, int y) const {
    return {origin.x + (x + 0.5) * cell, origin.y + (y + 0.5) * cell};
  }
  Vec2 corner(int x, int y) const { return {origin.x + x * cell, origin.y + y * cell}; }
};

// Boundary loops of a cell set, walked with the region interior on the left.
std::vector<Ring2> trace_cell_boundary(const Grid& g, const std::vector<char>& in_region) {
  // Directed boundary edges keyed by start corner.
  struct DirEdge { int x0, y0, x1, y1; };
  std::map<std::pair<int, int>, std::vector<DirEdge>> from;
  auto add_edge = [&](int x0, int y0, int x1, int y1) {
    from[{x0, y0}].push_back({x0, y0, x1, y1});
  };
  auto inside = [&](int x, int y) {
    return x >= 0 && x < g.nx && y >= 0 && y < g.ny && in_region[g.idx(x, y)];
  };
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      if (!in_region[g.idx(x, y)]) continue;
      if (!inside(x, y - 1)) add_edge(x, y, x + 1, y);          // bottom, +x
      if (!inside(x + 1, y)) add_edge(x + 1, y, x + 1, y + 1);  // right, +y
      if (!inside(x, y + 1)) add_edge(x + 1, y + 1, x, y + 1);  // top, -x
      if (!inside(x - 1, y)) add_edge(x, y + 1, x, y);          // left, -y
    }
  }

  std::vector<Ring2> loops;
  std::vector<char> used;
  std::vector<DirEdge> all;
  std::map<std::pair<int, int>, std::vector<std::size_t>> by_start;
  for (auto& [key, edges] : from)
    for (const DirEdge& e : edges) {
      by_start[key].push_back(all.size());
      all.push_back(e);
    }
  used.assign(all.size(), 0);

  for (std::size_t start = 0; start < all.size(); ++start) {
    if (used[start]) continue;
    Ring2 loop;
    std::size_t cur = start;
    std::size_t guard = all.size() + 4;
    while (guard--) {
      if (used[cur]) break;
      used[cur] = 1;
      const DirEdge& e = all[cur];
      loop.push_back(g.corner(e.x0, e.y0));
      auto it = by_start.find({e.x1, e.y1});
      if (it == by_start.end()) break;
      // Prefer the left turn relative to the incoming direction so touching
      // corners stay separate loops.
      int dx = e.x1 - e.x0, dy = e.y1 - e.y0;
      std::size_t next = SIZE_MAX;
      int best_pri = -10;
      for (std::size_t cand : it->second) {
        if (used[cand]) continue;
        int cdx = all[cand].x1 - all[cand].x0, cdy = all[cand].y1 - all[cand].y0;
        int crossv = dx * cdy - dy * cdx;
        int pri = crossv > 0 ? 2 : (crossv == 0 ? 1 : 0);
        if (pri > best_pri) { best_pri = pri; next = cand; }
      }
      if (next == SIZE_MAX) break;
      cur = next;
      if (cur == start) break;
    }
    if (loop.size() >= 4) loops.push_back(geom::collapse_collinear(loop, 1e-12));
  }
  return loops;
}

}  // namespace

Segmentation segment_rooms(const std::vector<Polygon2>& floorplan,
                           const fit::PrototypeSet& proto,
                           const std::vector<std::size_t>& wall_polys,
                           const GraphConfig& cfg) {
  Segmentation out;
  if (floorplan.empty()) return out;

  // Grid over the floorplan bbox, aligned to cell multiples.
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (const Polygon2& poly : floorplan) {
    for (const Vec2& p : poly.outer) {
      lo_x = std::min(lo_x, p.x); hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y); hi_y = std::max(hi_y, p.y);
    }
  }
  Grid g;
  g.cell = cfg.cell_size;
  g.origin = {std::floor(lo_x / g.cell - 2.0) * g.cell, std::floor(lo_y / g.cell - 2.0) * g.cell};
  g.nx = static_cast<int>(std::ceil((hi_x - g.origin.x) / g.cell)) + 2;
  g.ny = static_cast<int>(std::ceil((hi_y - g.origin.y) / g.cell)) + 2;
  if (g.nx <= 0 || g.ny <= 0) return out;
  const int n_cells = g.nx * g.ny;

  // interior: cell center in any floorplan component
  std::vector<char> interior(n_cells, 0);
  std::vector<int> component(n_cells, -1);
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      Vec2 c = g.center(x, y);
      for (std::size_t f = 0; f < floorplan.size(); ++f) {
        if (geom::point_in_polygon_2d(c, floorplan[f], 0.0)) {
          interior[g.idx(x, y)] = 1;
          component[g.idx(x, y)] = static_cast<int>(f);
          break;
        }
      }
    }
  }

  // blocked: within wall_thickness of a wall footprint (XY ring edges)
  std::vector<char> blocked(n_cells, 0);
  for (std::size_t wp : wall_polys) {
    const geom::Polygon3& wall = proto.polygons[wp];
    const std::size_t n = wall.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a{proto.vertices[wall.ring[i]].x, proto.vertices[wall.ring[i]].y};
      Vec2 b{proto.vertices[wall.ring[(i + 1) % n]].x, proto.vertices[wall.ring[(i + 1) % n]].y};
      double pad = cfg.wall_thickness + g.cell;
      int x0 = std::max(0, static_cast<int>((std::min(a.x, b.x) - pad - g.origin.x) / g.cell));
      int x1 = std::min(g.nx - 1, static_cast<int>((std::max(a.x, b.x) + pad - g.origin.x) / g.cell));
      int y0 = std::max(0, static_cast<int>((std::min(a.y, b.y) - pad - g.origin.y) / g.cell));
      int y1 = std::min(g.ny - 1, static_cast<int>((std::max(a.y, b.y) + pad - g.origin.y) / g.cell));
      Vec2 ab = b - a;
      double len2 = geom::norm2(ab);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          Vec2 c = g.center(x, y);
          double t = len2 > 0 ? std::clamp(geom::dot(c - a, ab) / len2, 0.0, 1.0) : 0.0;
          if (geom::norm(c - (a + ab * t)) <= cfg.wall_thickness) blocked[g.idx(x, y)] = 1;
        }
      }
    }
  }

  // Euclidean distance transform over free cells (distance to nearest
  // blocked-or-outside cell).
  const double kInf = 1e12;
  std::vector<double> dist2(n_cells);
  for (int i = 0; i < n_cells; ++i)
    dist2[i] = (interior[i] && !blocked[i]) ? kInf : 0.0;
  {
    std::vector<double> col(g.ny), out_col(g.ny);
    for (int x = 0; x < g.nx; ++x) {
      for (int y = 0; y < g.ny; ++y) col[y] = dist2[g.idx(x, y)];
      edt_1d(col, out_col);
      for (int y = 0; y < g.ny; ++y) dist2[g.idx(x, y)] = out_col[y];
    }
    std::vector<double> row(g.nx), out_row(g.nx);
    for (int y = 0; y < g.ny; ++y) {
      for (int x = 0; x < g.nx; ++x) row[x] = dist2[g.idx(x, y)];
      edt_1d(row, out_row);
      for (int x = 0; x < g.nx; ++x) dist2[g.idx(x, y)] = out_row[x];
    }
  }
  std::vector<double> dist(n_cells);
  for (int i = 0; i < n_cells; ++i) dist[i] = std::sqrt(dist2[i]) * g.cell;

  // Seeds: local maxima of the distance map, greedily kept with a minimum
  // separation, never two seeds in the same floorplan component... separation
  // applies globally.
  struct Seed { double d; int x, y; };
  std::vector<Seed> maxima;
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      int i = g.idx(x, y);
      if (!interior[i] || blocked[i] || dist[i] <= 0) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1 && is_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx2 = x + dx, ny2 = y + dy;
          if (nx2 < 0 || nx2 >= g.nx || ny2 < 0 || ny2 >= g.ny) continue;
          if (dist[g.idx(nx2, ny2)] > dist[i]) is_max = false;
        }
      if (is_max) maxima.push_back({dist[i], x, y});
    }
  }
  std::sort(maxima.begin(), maxima.end(), [&](const Seed& a, const Seed& b) {
    return a.d > b.d || (a.d == b.d && g.idx(a.x, a.y) < g.idx(b.x, b.y));
  });
  std::vector<Seed> seeds;
  for (const Seed& s : maxima) {
    bool ok = true;
    for (const Seed& kept : seeds) {
      double dx = (s.x - kept.x) * g.cell, dy = (s.y - kept.y) * g.cell;
      if (dx * dx + dy * dy < cfg.seed_separation * cfg.seed_separation) { ok = false; break; }
    }
    if (ok) seeds.push_back(s);
  }
  if (seeds.empty()) {
    // No free cell at all: degenerate, one room equal to the floorplan.
    for (const Polygon2& poly : floorplan) out.rooms.push_back(poly);
    return out;
  }

  // Watershed flooding in decreasing distance order.
  std::vector<int> region(n_cells, -1);
  struct QEntry {
    double d;
    int order;  // insertion order for deterministic ties
    int cell;
    int reg;
    bool operator<(const QEntry& o) const {
      if (d != o.d) return d < o.d;  // max-heap on distance
      return order > o.order;
    }
  };
  std::priority_queue<QEntry> queue;
  int order = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s)
    queue.push({seeds[s].d, order++, g.idx(seeds[s].x, seeds[s].y), static_cast<int>(s)});
  const int dx4[4] = {1, -1, 0, 0};
  const int dy4[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    QEntry e = queue.top();
    queue.pop();
    if (region[e.cell] >= 0) continue;
    region[e.cell] = e.reg;
    int x = e.cell % g.nx, y = e.cell / g.nx;
    for (int k = 0; k < 4; ++k) {
      int nx2 = x + dx4[k], ny2 = y + dy4[k];
      if (nx2 < 0 || nx2 >= g.nx || ny2 < 0 || ny2 >= g.ny) continue;
      int ni = g.idx(nx2, ny2);
      if (region[ni] >= 0 || !interior[ni] || blocked[ni]) continue;
      queue.push({dist[ni], order++, ni, e.reg});
    }
  }

  // Ridge plateaus seed several basins inside one open space. Merge region
  // pairs whose saddle is nearly as deep as the shallower peak: a genuine
  // doorway has a much tighter saddle than the rooms it separates.
  {
    struct Saddle { double depth = 0.0; };
    std::map<std::pair<int, int>, Saddle> saddles;
    for (int y = 0; y < g.ny; ++y) {
      for (int x = 0; x < g.nx; ++x) {
        int i = g.idx(x, y);
        if (region[i] < 0) continue;
        for (int k = 0; k < 2; ++k) {
          int nx2 = x + (k == 0 ? 1 : 0), ny2 = y + (k == 0 ? 0 : 1);
          if (nx2 >= g.nx || ny2 >= g.ny) continue;
          int j = g.idx(nx2, ny2);
          if (region[j] < 0 || region[j] == region[i]) continue;
          auto key = std::minmax(region[i], region[j]);
          Saddle& s = saddles[{key.first, key.second}];
          s.depth = std::max(s.depth, std::min(dist[i], dist[j]));
        }
      }
    }
    std::vector<double> peak(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) peak[s] = seeds[s].d;
    std::vector<int> root(seeds.size());
    std::iota(root.begin(), root.end(), 0);
    auto find_root = [&](int r) {
      while (root[r] != r) { root[r] = root[root[r]]; r = root[r]; }
      return r;
    };
    std::vector<std::pair<double, std::pair<int, int>>> ordered;
    for (const auto& [key, s] : saddles) ordered.push_back({s.depth, key});
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    const double kMergeRatio = 0.6;
    for (const auto& [depth, key] : ordered) {
      int ra = find_root(key.first), rb = find_root(key.second);
      if (ra == rb) continue;
      if (depth >= kMergeRatio * std::min(peak[ra], peak[rb])) {
        int keep = std::min(ra, rb), drop = std::max(ra, rb);
        root[drop] = keep;
        peak[keep] = std::max(peak[keep], peak[drop]);
      }
    }
    for (int i = 0; i < n_cells; ++i)
      if (region[i] >= 0) region[i] = find_root(region[i]);
  }

  // Openings: free-cell interfaces between regions. Interface midpoints
  // carry whether stepping past the run's end lands in a wall-blocked cell;
  // such ends grew out of the wall dilation and get the radius added back.
  struct InterfaceKey {
    int ra, rb;
    bool operator<(const InterfaceKey& o) const {
      return ra < o.ra || (ra == o.ra && rb < o.rb);
    }
  };
  struct InterfaceSeg {
    Vec2 a, b;
    bool end_blocked[2] = {false, false};  // beyond midpoint along -dir / +dir
  };
  std::map<InterfaceKey, std::vector<InterfaceSeg>> interfaces;
  auto blocked_at = [&](int x, int y) {
    return x >= 0 && x < g.nx && y >= 0 && y < g.ny && blocked[g.idx(x, y)] &&
           interior[g.idx(x, y)];
  };
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      int i = g.idx(x, y);
      if (region[i] < 0) continue;
      // right neighbor: vertical interface, runs extend along y
      if (x + 1 < g.nx) {
        int j = g.idx(x + 1, y);
        if (region[j] >= 0 && region[j] != region[i]) {
          InterfaceKey key{std::min(region[i], region[j]), std::max(region[i], region[j])};
          InterfaceSeg seg;
          seg.a = g.corner(x + 1, y);
          seg.b = g.corner(x + 1, y + 1);
          seg.end_blocked[0] = blocked_at(x, y - 1) || blocked_at(x + 1, y - 1);
          seg.end_blocked[1] = blocked_at(x, y + 1) || blocked_at(x + 1, y + 1);
          interfaces[key].push_back(seg);
        }
      }
      if (y + 1 < g.ny) {
        int j = g.idx(x, y + 1);
        if (region[j] >= 0 && region[j] != region[i]) {
          InterfaceKey key{std::min(region[i], region[j]), std::max(region[i], region[j])};
          InterfaceSeg seg;
          seg.a = g.corner(x, y + 1);
          seg.b = g.corner(x + 1, y + 1);
          seg.end_blocked[0] = blocked_at(x - 1, y) || blocked_at(x - 1, y + 1);
          seg.end_blocked[1] = blocked_at(x + 1, y) || blocked_at(x + 1, y + 1);
          interfaces[key].push_back(seg);
        }
      }
    }
  }

  // Annex blocked interior cells to the nearest region (BFS from assigned).
  {
    std::queue<int> bfs;
    for (int i = 0; i < n_cells; ++i)
      if (region[i] >= 0) bfs.push(i);
    while (!bfs.empty()) {
      int i = bfs.front();
      bfs.pop();
      int x = i % g.nx, y = i / g.nx;
      for (int k = 0; k < 4; ++k) {
        int nx2 = x + dx4[k], ny2 = y + dy4[k];
        if (nx2 < 0 || nx2 >= g.nx || ny2 < 0 || ny2 >= g.ny) continue;
        int ni = g.idx(nx2, ny2);
        if (region[ni] >= 0 || !interior[ni]) continue;
        region[ni] = region[i];
        bfs.push(ni);
      }
    }
  }

  // Vectorize each region's cells back to polygons; drop empty regions and
  // remap opening endpoints onto surviving room indices.
  int n_regions = static_cast<int>(seeds.size());
  std::vector<int> room_of_region(n_regions, -1);
  for (int r = 0; r < n_regions; ++r) {
    std::vector<char> in_region(n_cells, 0);
    int count = 0;
    for (int i = 0; i < n_cells; ++i)
      if (region[i] == r) { in_region[i] = 1; ++count; }
    if (count == 0) continue;
    auto loops = trace_cell_boundary(g, in_region);
    Polygon2 poly;
    double best_area = 0.0;
    int best_loop = -1;
    for (std::size_t li = 0; li < loops.size(); ++li) {
      double a = geom::ring_area(loops[li]);
      if (a > best_area) { best_area = a; best_loop = static_cast<int>(li); }
    }
    for (std::size_t li = 0; li < loops.size(); ++li) {
      Ring2 simplified = geom::rdp_simplify(loops[li], cfg.room_rdp);
      if (simplified.size() < 3) continue;
      if (static_cast<int>(li) == best_loop) poly.outer = simplified;
      else if (geom::ring_area(loops[li]) < 0) poly.holes.push_back(simplified);
    }
    if (poly.outer.size() < 3) continue;
    room_of_region[r] = static_cast<int>(out.rooms.size());
    out.rooms.push_back(std::move(poly));
  }

  // Openings: split each region-pair interface into connected runs so two
  // separate doorways between the same rooms stay distinct.
  for (const auto& [key, segs] : interfaces) {
    if (room_of_region[key.ra] < 0 || room_of_region[key.rb] < 0) continue;
    std::vector<int> run(segs.size(), -1);
    int n_runs = 0;
    double link = 2.5 * g.cell;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (run[i] >= 0) continue;
      run[i] = n_runs;
      std::vector<std::size_t> stack{i};
      while (!stack.empty()) {
        std::size_t cur = stack.back();
        stack.pop_back();
        Vec2 mc = (segs[cur].a + segs[cur].b) / 2.0;
        for (std::size_t j = 0; j < segs.size(); ++j) {
          if (run[j] >= 0) continue;
          Vec2 mj = (segs[j].a + segs[j].b) / 2.0;
          if (geom::norm(mc - mj) <= link) {
            run[j] = n_runs;
            stack.push_back(j);
          }
        }
      }
      ++n_runs;
    }
    for (int rr = 0; rr < n_runs; ++rr) {
      Opening op;
      op.room_a = room_of_region[key.ra];
      op.room_b = room_of_region[key.rb];
      int count = 0;
      double best = -1.0;
      std::size_t ext_i = SIZE_MAX, ext_j = SIZE_MAX;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        if (run[i] != rr) continue;
        ++count;
        for (std::size_t j = 0; j < segs.size(); ++j) {
          if (run[j] != rr) continue;
          Vec2 m1 = (segs[i].a + segs[i].b) / 2.0;
          Vec2 m2 = (segs[j].a + segs[j].b) / 2.0;
          double d = geom::norm(m1 - m2);
          if (d > best) { best = d; op.a = m1; op.b = m2; ext_i = i; ext_j = j; }
        }
      }
      op.width = static_cast<double>(count) * g.cell;
      // Ends eaten by the wall dilation get the blocking radius added back so
      // the width reflects the wall-tip-to-wall-tip span.
      if (ext_i != SIZE_MAX) {
        if (segs[ext_i].end_blocked[0] || segs[ext_i].end_blocked[1])
          op.width += cfg.wall_thickness;
        if (ext_j != ext_i && (segs[ext_j].end_blocked[0] || segs[ext_j].end_blocked[1]))
          op.width += cfg.wall_thickness;
      }
      out.openings.push_back(op);
    }
  }
  return out;
}

}  // namespace layoutkit::graph

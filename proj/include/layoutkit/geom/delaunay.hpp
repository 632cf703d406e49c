#pragma once
#include <array>
#include <utility>
#include <vector>

#include "layoutkit/geom/polygon.hpp"
#include "layoutkit/geom/vec.hpp"

namespace layoutkit::geom {

// Finalized 2D triangulation. tris are CCW; adj[t][i] is the triangle across
// edge (tris[t][i], tris[t][(i+1)%3]) or -1 on the boundary.
struct TriMesh {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 3>> adj;
};

// Segments split at every point lying on them and at pairwise crossings, so
// no two output segments properly intersect and no point sits on a segment
// interior. Points are deduplicated within eps.
struct SegmentArrangement {
  std::vector<Vec2> points;
  std::vector<std::pair<int, int>> segments;

  int add_point(const Vec2& p);  // dedupe within eps via grid hash
  double eps = 1e-7;

 private:
  friend SegmentArrangement arrange_segments(const std::vector<std::pair<Vec2, Vec2>>&, double);
  std::vector<std::vector<int>> grid_;
};

SegmentArrangement arrange_segments(const std::vector<std::pair<Vec2, Vec2>>& segs,
                                    double eps = 1e-7);

// Plain Delaunay triangulation; near-duplicate points (1e-9) are merged.
TriMesh delaunay_of(const std::vector<Vec2>& points);

// Constrained Delaunay over an arrangement: all arrangement segments appear
// as triangulation edges. Covers the convex hull of the points.
TriMesh constrained_delaunay(const SegmentArrangement& arr);

// Triangulation covering exactly the interior of `region`, with every
// constraint sub-segment inside the region realized as triangle edges.
// Throws InputError-style std::invalid_argument on an invalid region.
TriMesh cdt_triangulate(const Polygon2& region,
                        const std::vector<std::pair<Vec2, Vec2>>& constraints = {});

double triangle_circumradius(const Vec2& a, const Vec2& b, const Vec2& c);

// Outer boundary ring of the alpha shape (triangles with circumradius <=
// alpha), largest component. Falls back to the convex hull when the filter
// empties the triangulation.
Ring2 concave_hull(const std::vector<Vec2>& points, double alpha);

std::vector<Vec2> convex_hull(std::vector<Vec2> points);

// Boundary loops of a kept-triangle subset, walked with the kept interior on
// the left: outer loops come out CCW, holes CW. Each loop reports one kept
// triangle adjacent to its first edge (for component bookkeeping).
struct BoundaryLoop {
  std::vector<int> vertices;
  int seed_triangle = -1;
};
std::vector<BoundaryLoop> boundary_loops(const TriMesh& mesh, const std::vector<char>& kept);

}  // namespace layoutkit::geom
